"""Noncommutative *-polynomials, matrix pencils and block linearizations.

Polynomials live in the free *-algebra over indeterminates ``x1..xr``;
a word is a tuple of 1-based variable indices and the empty word is the
unit.  Coefficients are complex; exact zeros are never stored, so the
representation is canonical and equality is structural.

A :class:`Pencil` is the coefficient tuple ``(a0, ..., ar)`` of
Hermitian ``m x m`` matrices defining the linear matrix expression
``a0 (x) 1 + sum_i ai (x) x_i``; :class:`GeneralPencil` drops the
hermiticity requirement and is what the quadratic linearization
produces.
"""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "NCPolynomial",
    "GeneralPencil",
    "Pencil",
    "star",
    "evaluate",
    "pencil_evaluate",
    "selfadjoint_embed",
    "linearize_quadratic",
    "degree",
    "is_selfadjoint",
]

HERMITIAN_TOL = 1e-12


def _clean(terms):
    return {w: complex(c) for w, c in terms.items() if c != 0}


@dataclass(frozen=True)
class NCPolynomial:
    """Formal *-polynomial: map word -> coefficient, plus the variable count."""

    terms: dict
    num_vars: int

    def __post_init__(self):
        object.__setattr__(self, "terms", _clean(self.terms))
        for w in self.terms:
            if any(not (1 <= i <= self.num_vars) for i in w):
                raise ValueError(f"word {w} uses variables outside 1..{self.num_vars}")

    # -- constructors ------------------------------------------------

    @staticmethod
    def zero(num_vars):
        return NCPolynomial({}, num_vars)

    @staticmethod
    def one(num_vars):
        return NCPolynomial({(): 1.0}, num_vars)

    @staticmethod
    def variable(i, num_vars):
        """The generator ``x_i`` (1-based)."""
        if not (1 <= i <= num_vars):
            raise ValueError(f"variable index {i} outside 1..{num_vars}")
        return NCPolynomial({(i,): 1.0}, num_vars)

    @staticmethod
    def monomial(coeff, word, num_vars):
        return NCPolynomial({tuple(word): coeff}, num_vars)

    # -- ring structure ----------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        terms = dict(self.terms)
        for w, c in other.terms.items():
            terms[w] = terms.get(w, 0.0) + c
        return NCPolynomial(terms, max(self.num_vars, other.num_vars))

    def __radd__(self, other):
        return self + other

    def __neg__(self):
        return NCPolynomial({w: -c for w, c in self.terms.items()}, self.num_vars)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if np.isscalar(other):
            return NCPolynomial({w: c * other for w, c in self.terms.items()}, self.num_vars)
        other = self._coerce(other)
        terms = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = w1 + w2
                terms[w] = terms.get(w, 0.0) + c1 * c2
        return NCPolynomial(terms, max(self.num_vars, other.num_vars))

    def __rmul__(self, other):
        if np.isscalar(other):
            return self * other
        return self._coerce(other) * self

    def __pow__(self, k):
        if k < 0:
            raise ValueError("negative powers are not defined")
        out = NCPolynomial.one(self.num_vars)
        for _ in range(int(k)):
            out = out * self
        return out

    def _coerce(self, other):
        if isinstance(other, NCPolynomial):
            return other
        if np.isscalar(other):
            return NCPolynomial({(): complex(other)}, self.num_vars)
        return NotImplemented

    def __eq__(self, other):
        if np.isscalar(other):
            other = self._coerce(other)
        if not isinstance(other, NCPolynomial):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    # -- queries -----------------------------------------------------

    def star(self):
        """Adjoint: conjugate coefficients, reverse words."""
        return NCPolynomial({w[::-1]: np.conj(c) for w, c in self.terms.items()}, self.num_vars)

    def degree(self):
        """Length of the longest stored word; zero polynomial has degree 0."""
        return max((len(w) for w in self.terms), default=0)

    def is_selfadjoint(self):
        return self.terms == self.star().terms

    def __repr__(self):
        if not self.terms:
            return "NCPolynomial<0>"
        parts = []
        for w in sorted(self.terms, key=lambda w: (len(w), w)):
            c = self.terms[w]
            word = "*".join(f"x{i}" for i in w) if w else "1"
            parts.append(f"({c:g})*{word}")
        return "NCPolynomial<" + " + ".join(parts) + ">"


def star(p):
    """Module-level alias for :meth:`NCPolynomial.star`."""
    return p.star()


def degree(p):
    return p.degree()


def is_selfadjoint(p):
    return p.is_selfadjoint()


def evaluate(p, mats):
    """Evaluate ``p`` on a tuple of equal-size square matrices.

    Word-by-word product and sum; the empty word contributes
    ``coeff * identity``.
    """
    mats = [np.asarray(M) for M in mats]
    if len(mats) != p.num_vars:
        raise ValueError(f"need {p.num_vars} matrices, got {len(mats)}")
    if p.num_vars == 0:
        raise ValueError("evaluation needs at least one matrix to fix the dimension")
    k = mats[0].shape[0]
    for M in mats:
        if M.shape != (k, k):
            raise ValueError("matrices must be square and of equal size")
    out = np.zeros((k, k), dtype=complex)
    eye = np.eye(k)
    for w, c in p.terms.items():
        term = eye
        for i in w:
            term = term @ mats[i - 1]
        out = out + c * term
    return out


@dataclass(frozen=True)
class GeneralPencil:
    """Coefficients ``(b0, ..., br)`` of a linear matrix expression, no symmetry assumed."""

    a: list

    def __post_init__(self):
        mats = [np.asarray(ai, dtype=complex) for ai in self.a]
        if not mats:
            raise ValueError("a pencil needs at least the constant coefficient a0")
        m = mats[0].shape[0]
        for ai in mats:
            if ai.shape != (m, m):
                raise ValueError("all pencil coefficients must be square of equal size")
        object.__setattr__(self, "a", mats)

    @property
    def m(self):
        return self.a[0].shape[0]

    @property
    def r(self):
        return len(self.a) - 1

    def evaluate(self, mats):
        return pencil_evaluate(self, mats)

    def shifted(self, lam):
        """Pencil with ``a0`` replaced by ``a0 - lam * I``."""
        a = [self.a[0] - lam * np.eye(self.m)] + list(self.a[1:])
        return type(self)(a)


class Pencil(GeneralPencil):
    """Pencil with Hermitian coefficients, validated on construction."""

    def __post_init__(self):
        super().__post_init__()
        for k, ai in enumerate(self.a):
            if np.max(np.abs(ai - ai.conj().T)) > HERMITIAN_TOL:
                raise ValueError(f"coefficient a{k} is not Hermitian within {HERMITIAN_TOL}")


def pencil_evaluate(P, mats):
    """Kronecker-structured sum ``a0 (x) 1_n + sum_i ai (x) mats[i-1]``."""
    mats = [np.asarray(M) for M in mats]
    if len(mats) != P.r:
        raise ValueError(f"pencil has r={P.r} variables, got {len(mats)} matrices")
    n = mats[0].shape[0] if mats else 1
    for M in mats:
        if M.shape != (n, n):
            raise ValueError("matrices must be square and of equal size")
    S = np.kron(P.a[0], np.eye(n))
    for ai, M in zip(P.a[1:], mats):
        S = S + np.kron(ai, M)
    return S


def selfadjoint_embed(b):
    """Hermitian doubling of general coefficients.

    Each ``b_i`` becomes ``[[0, b_i*], [b_i, 0]]``; the doubled pencil
    evaluated on a Hermitian tuple is invertible exactly when the
    original combination is, and its spectrum is symmetric about 0.
    Accepts a list of matrices or a :class:`GeneralPencil`.
    """
    if isinstance(b, GeneralPencil):
        b = b.a
    mats = [np.asarray(bi, dtype=complex) for bi in b]
    m = mats[0].shape[0]
    z = np.zeros((m, m))
    doubled = [np.block([[z, bi.conj().T], [bi, z]]) for bi in mats]
    return Pencil(doubled)


def linearize_quadratic(a):
    """Block linearization of ``a0 (x) 1 + sum ai (x) x_i + a_{r+1} (x) sum x_i^2``.

    Input is the list ``(a0, ..., a_{r+1})`` of ``m x m`` matrices
    (r+2 of them); output is the :class:`GeneralPencil` of dimension
    ``(r+1) m`` whose evaluation on a tuple ``(x_1..x_r)`` is invertible
    exactly when the quadratic expression is.  Block layout:

    * ``b0``: ``a0`` at block (1,1), ``a_i`` at block (i+1, 1),
      identities on the remaining diagonal;
    * ``b_i``: ``-1`` at block (1, i+1) and ``a_{r+1}`` at block (i+1, 1).
    """
    mats = [np.asarray(ai, dtype=complex) for ai in a]
    if len(mats) < 2:
        raise ValueError("need at least (a0, a1) with the quadratic coefficient last")
    m = mats[0].shape[0]
    r = len(mats) - 2
    dim = (r + 1) * m
    eye = np.eye(m)

    def block(B, i, j, val):
        B[i * m:(i + 1) * m, j * m:(j + 1) * m] = val

    b0 = np.zeros((dim, dim), dtype=complex)
    block(b0, 0, 0, mats[0])
    for i in range(1, r + 1):
        block(b0, i, 0, mats[i])
        block(b0, i, i, eye)
    bs = [b0]
    for i in range(1, r + 1):
        bi = np.zeros((dim, dim), dtype=complex)
        block(bi, 0, i, -eye)
        block(bi, i, 0, mats[r + 1])
        bs.append(bi)
    return GeneralPencil(bs)
