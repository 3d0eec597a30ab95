"""Seeded samplers for the Gaussian matrix ensembles and derived unitaries.

All samplers are pure functions of a :class:`SeedSpec`: the same seed
always reproduces the same matrix (bit for bit, for a fixed build of
numpy), and distinct ``(trial_index, stream_index)`` pairs give
statistically independent streams.  Gaussians come from numpy's
ziggurat transform applied to a counter-seeded PCG64 stream, so trials
can be generated in any order or in parallel.

Conventions
-----------
``sample_sgrm(n, sigma2)`` draws the Hermitian ensemble in which the
diagonal entries, ``sqrt(2)*Re X[i,j]`` and ``sqrt(2)*Im X[i,j]``
(``i < j``) are ``n**2`` i.i.d. real ``N(0, sigma2)`` variables; with
``sigma2 = 1/n`` this is the standard GUE normalization whose spectral
law converges to the semicircle on ``[-2, 2]``.

``sample_grm(n, sigma2)`` draws the square Ginibre ensemble with i.i.d.
complex entries of mean zero and ``E|y_ij|^2 = sigma2``, realised as
``(X1 + i*X2)/sqrt(2)`` for two independent Hermitian draws.
"""

from dataclasses import dataclass

import numpy as np

from . import NumericFailure

__all__ = [
    "SeedSpec",
    "GaussianHermitian",
    "GinibreMatrix",
    "sample_sgrm",
    "sample_grm",
    "phi",
    "psi",
    "pseudo_haar_unitary",
    "haar_unitary_qr",
]

_MAX_SEED = 2**64


@dataclass(frozen=True)
class SeedSpec:
    """Addressable point in the random source.

    ``master_seed`` identifies the whole experiment, ``trial_index`` the
    Monte-Carlo trial and ``stream_index`` the matrix within a trial.
    """

    master_seed: int
    trial_index: int = 0
    stream_index: int = 0

    def __post_init__(self):
        if not (0 <= int(self.master_seed) < _MAX_SEED):
            raise ValueError(f"master_seed must be a 64-bit unsigned integer, got {self.master_seed}")
        if self.trial_index < 0 or self.stream_index < 0:
            raise ValueError("trial_index and stream_index must be nonnegative")

    def trial(self, t):
        """Seed for trial ``t`` of the same experiment."""
        return SeedSpec(self.master_seed, t, self.stream_index)

    def stream(self, s):
        """Seed for stream ``s`` within the same trial."""
        return SeedSpec(self.master_seed, self.trial_index, s)

    def rng(self):
        """A fresh ``numpy.random.Generator`` for this seed address."""
        ss = np.random.SeedSequence(
            entropy=int(self.master_seed),
            spawn_key=(int(self.trial_index), int(self.stream_index)),
        )
        return np.random.default_rng(ss)


@dataclass(frozen=True)
class GaussianHermitian:
    """Hermitian Gaussian sample; ``entries`` equals its conjugate transpose exactly."""

    n: int
    sigma2: float
    entries: np.ndarray


@dataclass(frozen=True)
class GinibreMatrix:
    """Square complex Gaussian sample with i.i.d. entries, ``E|y_ij|^2 = sigma2``."""

    n: int
    sigma2: float
    entries: np.ndarray


def _check_params(n, sigma2):
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    if not sigma2 > 0:
        raise ValueError(f"variance must be > 0, got {sigma2}")


def _standard_hermitian(rng, n):
    """Hermitian matrix with the sigma2 = 1 entry layout.

    Draw order is fixed (diagonal, upper real, upper imaginary) so that
    scaling by sigma commutes with sampling.  Mirrored entries are
    written explicitly, making X == X.conj().T an exact identity.
    """
    diag = rng.standard_normal(n)
    k = n * (n - 1) // 2
    re = rng.standard_normal(k)
    im = rng.standard_normal(k)
    X = np.zeros((n, n), dtype=complex)
    iu = np.triu_indices(n, 1)
    upper = (re + 1j * im) / np.sqrt(2.0)
    X[iu] = upper
    X[(iu[1], iu[0])] = upper.conj()
    X[np.diag_indices(n)] = diag
    return X


def sample_sgrm(n, sigma2, seed):
    """Draw a Hermitian Gaussian matrix from the self-adjoint ensemble.

    Parameters
    ----------
    n : int
        Matrix dimension.
    sigma2 : float
        Entry variance; diagonal entries are real ``N(0, sigma2)`` and
        off-diagonal entries have ``E|X_ij|^2 = sigma2``.
    seed : SeedSpec
        Stream address; identical seeds reproduce identical matrices.
    """
    _check_params(n, sigma2)
    X = _standard_hermitian(seed.rng(), n)
    X *= np.sqrt(sigma2)
    return GaussianHermitian(n=n, sigma2=sigma2, entries=X)


def sample_grm(n, sigma2, seed):
    """Draw a square Ginibre matrix, built as ``(X1 + i*X2)/sqrt(2)``.

    The two Hermitian components are independent draws from a single
    stream (disjoint consecutive blocks of the generator).
    """
    _check_params(n, sigma2)
    rng = seed.rng()
    X1 = _standard_hermitian(rng, n)
    X2 = _standard_hermitian(rng, n)
    Y = (X1 + 1j * X2) / np.sqrt(2.0)
    Y *= np.sqrt(sigma2)
    return GinibreMatrix(n=n, sigma2=sigma2, entries=Y)


def phi(t):
    """Antiderivative of ``sqrt(4 - s^2)`` rescaled to saturate at +-pi.

    Closed form ``t/2*sqrt(4-t^2) + 2*arcsin(t/2)`` on ``[-2, 2]``,
    clamped to ``-pi`` for ``t <= -2`` and ``pi`` for ``t >= 2``.
    Accepts scalars or arrays.
    """
    t_arr = np.asarray(t, dtype=float)
    tc = np.clip(t_arr, -2.0, 2.0)
    out = tc / 2.0 * np.sqrt(np.maximum(4.0 - tc * tc, 0.0)) + 2.0 * np.arcsin(tc / 2.0)
    if np.isscalar(t) or t_arr.ndim == 0:
        return float(out)
    return out


def psi(t):
    """Unit-modulus function ``exp(i*phi(t))`` mapping the semicircle law to the circle."""
    return np.exp(1j * phi(t))


def pseudo_haar_unitary(n, seed):
    """Unitary obtained by applying ``psi`` to a fresh GUE draw.

    Functional calculus through a Hermitian eigendecomposition:
    ``U = V diag(psi(w)) V*`` where ``X = V diag(w) V*`` and
    ``X ~ sample_sgrm(n, 1/n)``.  The eigenvalue angles are
    asymptotically uniform on the circle, but the matrix is not
    Haar-distributed at finite n (see :func:`haar_unitary_qr`).
    """
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    X = sample_sgrm(n, 1.0 / n, seed).entries
    try:
        w, V = np.linalg.eigh(X)
    except np.linalg.LinAlgError as exc:
        raise NumericFailure(f"eigendecomposition failed for n={n}: {exc}") from exc
    return (V * psi(w)) @ V.conj().T


def haar_unitary_qr(n, seed):
    """Exactly Haar-distributed unitary via QR of a Ginibre draw.

    The QR factorization is made unique (and the distribution Haar) by
    rescaling each column of Q with the phase of the corresponding
    diagonal entry of R.  A degenerate draw (zero diagonal in R) is
    retried once from the continuation of the stream.
    """
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    rng = seed.rng()
    for attempt in range(2):
        Z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
        Q, R = np.linalg.qr(Z)
        d = np.diagonal(R)
        if np.all(np.abs(d) > 0.0):
            return Q * (d / np.abs(d))
    raise NumericFailure("degenerate Ginibre draw twice in a row (QR diagonal hit zero)")
