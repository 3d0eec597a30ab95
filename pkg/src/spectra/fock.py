"""Truncated full Fock space: a brute-force oracle for free elements.

The space over ``r`` generators truncated at depth ``d`` is spanned by
all words over ``{1..r}`` of length at most ``d``, enumerated
length-lexicographically (so matrix layouts are reproducible).  The
creation operator for letter ``i`` prepends ``i`` to a word and kills
words of maximal length; its adjoint strips a leading ``i``.  The
vacuum state is the empty word.

Vacuum expectations of words in the generators are exact up to total
degree ``d`` (a degree-k product applied to the vacuum never needs
depth beyond k), which makes the truncated model an exact moment
oracle and a monotone-from-below norm oracle.
"""

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import BasisSizeError

__all__ = [
    "FockBasis",
    "FockOperator",
    "make_basis",
    "identity_op",
    "default_depth",
    "word_count",
    "creation",
    "annihilation",
    "semicircular_op",
    "circular_op",
    "vacuum_expectation",
    "fock_norm",
    "evaluate_poly",
    "pair_partition_moment",
]

MAX_WORDS = 100_000
_DENSE_NORM_LIMIT = 1500


def word_count(num_gens, depth):
    """Number of words over ``{1..num_gens}`` of length <= depth."""
    if num_gens == 1:
        return depth + 1
    return (num_gens ** (depth + 1) - 1) // (num_gens - 1)


def default_depth(num_gens, max_words=MAX_WORDS):
    """Depth 12 for one or two generators, else the deepest basis under the cap."""
    if num_gens <= 2:
        return 12
    d = 0
    while word_count(num_gens, d + 1) <= max_words:
        d += 1
    return d


@dataclass(frozen=True)
class FockBasis:
    """Enumerated word basis of the truncation: fields num_gens, depth, words, index."""

    num_gens: int
    depth: int
    words: tuple
    index: dict

    def __repr__(self):
        return f"FockBasis(num_gens={self.num_gens}, depth={self.depth}, dim={len(self.words)})"


def make_basis(num_gens, depth, max_words=MAX_WORDS):
    """Build the length-lexicographic word basis.

    Raises :class:`~spectra.BasisSizeError` when the word count exceeds
    ``max_words`` (pass a larger cap explicitly for big sparse runs).
    """
    if num_gens < 1 or depth < 0:
        raise ValueError("need num_gens >= 1 and depth >= 0")
    total = word_count(num_gens, depth)
    if total > max_words:
        raise BasisSizeError(
            f"basis would hold {total} words, over the cap of {max_words}; "
            f"pass max_words explicitly to override")
    words = []
    for k in range(depth + 1):
        words.extend(itertools.product(range(1, num_gens + 1), repeat=k))
    index = {w: i for i, w in enumerate(words)}
    return FockBasis(num_gens=num_gens, depth=depth, words=tuple(words), index=index)


@dataclass(frozen=True)
class FockOperator:
    """Sparse operator on a truncated Fock basis; supports +, -, scalar *, @, .H."""

    basis: FockBasis
    matrix: sp.spmatrix

    def __post_init__(self):
        dim = len(self.basis.words)
        if self.matrix.shape != (dim, dim):
            raise ValueError(f"matrix shape {self.matrix.shape} does not match basis dim {dim}")

    def _check(self, other):
        if self.basis is not other.basis and self.basis != other.basis:
            raise ValueError("operators live on different bases")

    def __add__(self, other):
        self._check(other)
        return FockOperator(self.basis, self.matrix + other.matrix)

    def __sub__(self, other):
        self._check(other)
        return FockOperator(self.basis, self.matrix - other.matrix)

    def __mul__(self, scalar):
        return FockOperator(self.basis, self.matrix * scalar)

    __rmul__ = __mul__

    def __matmul__(self, other):
        self._check(other)
        return FockOperator(self.basis, (self.matrix @ other.matrix).tocsr())

    @property
    def H(self):
        """Adjoint operator."""
        return FockOperator(self.basis, self.matrix.conj().T.tocsr())

    def toarray(self):
        return self.matrix.toarray()


def identity_op(basis):
    dim = len(basis.words)
    return FockOperator(basis, sp.identity(dim, dtype=complex, format="csr"))


def creation(basis, i):
    """Creation operator for letter ``i``: word w -> i.w, top-length words -> 0."""
    if not (1 <= i <= basis.num_gens):
        raise ValueError(f"generator index {i} outside 1..{basis.num_gens}")
    rows, cols = [], []
    for k, w in enumerate(basis.words):
        if len(w) < basis.depth:
            rows.append(basis.index[(i,) + w])
            cols.append(k)
    dim = len(basis.words)
    mat = sp.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(dim, dim), dtype=complex)
    return FockOperator(basis, mat)


def annihilation(basis, i):
    """Adjoint of :func:`creation`: strips a leading ``i``, kills the vacuum."""
    return creation(basis, i).H


def semicircular_op(basis, i):
    """Standard semicircular element ``creation(i) + creation(i)*`` (Hermitian, tau(x^2)=1)."""
    c = creation(basis, i)
    return c + c.H


def circular_op(basis, i):
    """Standard circular element ``creation(2i-1) + creation(2i)*`` (tau(y*y)=1).

    Needs a basis with at least ``2i`` generators.
    """
    if 2 * i > basis.num_gens:
        raise ValueError(f"circular element {i} needs >= {2 * i} generators, basis has {basis.num_gens}")
    return creation(basis, 2 * i - 1) + creation(basis, 2 * i).H


def vacuum_expectation(op):
    """Vacuum state ``<T vacuum, vacuum>``; exact for words of total degree <= depth."""
    return complex(op.matrix[0, 0])


def fock_norm(op, tol=1e-8):
    """Largest singular value on the truncated space.

    A lower bound for the untruncated norm, nondecreasing in the depth;
    report it together with the basis depth, not as a limit.  Dense SVD
    below ``_DENSE_NORM_LIMIT``, Lanczos (scipy svds) above.
    """
    dim = op.matrix.shape[0]
    if dim <= _DENSE_NORM_LIMIT:
        return float(np.linalg.svd(op.matrix.toarray(), compute_uv=False)[0])
    vals = spla.svds(op.matrix.tocsr(), k=1, return_singular_vectors=False,
                     tol=tol, maxiter=5000)
    return float(vals[0])


def evaluate_poly(p, basis):
    """Evaluate a noncommutative polynomial on the truncated semicircular family.

    Variables ``x_i`` map to ``semicircular_op(basis, i)``; vacuum
    moments of the result are exact when ``p`` has degree <= depth.
    """
    gens = [semicircular_op(basis, i) for i in range(1, p.num_vars + 1)]
    out = identity_op(basis) * 0.0
    for w, c in p.terms.items():
        term = identity_op(basis)
        for i in w:
            term = term @ gens[i - 1]
        out = out + term * c
    return out


@lru_cache(maxsize=None)
def pair_partition_moment(word):
    """Mixed moment of a free standard semicircular family, combinatorially.

    Counts non-crossing pair partitions of the positions of ``word``
    (a tuple of generator indices) in which paired positions carry the
    same generator.  Independent of the matrix model; intended as the
    cross-check oracle for low degrees.
    """
    word = tuple(word)
    k = len(word)
    if k == 0:
        return 1
    if k % 2 == 1:
        return 0
    total = 0
    for j in range(1, k, 2):
        if word[j] == word[0]:
            total += (pair_partition_moment(word[1:j])
                      * pair_partition_moment(word[j + 1:]))
    return total
