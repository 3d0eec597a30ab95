"""Shared dense/implicit linear-algebra kernels for the experiment harness."""

import numpy as np

__all__ = [
    "hermitian_norm",
    "spectral_norm",
    "kron_sum_norm",
    "partial_trace",
    "entrywise_stderr",
]

_DENSE_SVD_LIMIT = 2048


def hermitian_norm(A):
    """Operator norm of a Hermitian matrix via its eigenvalues."""
    w = np.linalg.eigvalsh(A)
    return float(max(-w[0], w[-1]))


def spectral_norm(A):
    """Largest singular value of a dense matrix.

    Full singular values for moderate sizes; power iteration on the
    normal operator above ``_DENSE_SVD_LIMIT``.
    """
    A = np.asarray(A)
    if min(A.shape) <= _DENSE_SVD_LIMIT:
        return float(np.linalg.svd(A, compute_uv=False)[0])
    return _power_norm(lambda x: A @ x, lambda x: A.conj().T @ x, A.shape, A.dtype)


def _power_norm(apply_a, apply_ah, shape, dtype, max_iter=1500, rtol=1e-10, seed=0):
    """Power iteration on A^H A; the Rayleigh quotient ascends to ||A||^2."""
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(shape[1]) + 1j * rng.standard_normal(shape[1])
    x /= np.linalg.norm(x)
    rq_prev = 0.0
    for _ in range(max_iter):
        y = apply_ah(apply_a(x))
        rq = float(np.real(np.vdot(x, y)))
        nrm = np.linalg.norm(y)
        if nrm == 0.0:
            return 0.0
        x = y / nrm
        if abs(rq - rq_prev) <= rtol * max(rq, 1e-300):
            break
        rq_prev = rq
    return float(np.sqrt(max(rq, 0.0)))


def kron_sum_norm(us, vs, max_iter=1500, rtol=1e-10, seed=0):
    """Operator norm of ``sum_i us[i] (x) vs[i]`` without forming the Kronecker product.

    Row-major vec identity: ``kron(u, v) vec(X) = vec(u X v^T)``.
    Power iteration on the normal operator; the returned value is a
    monotone lower bound converging to the true norm (relative accuracy
    ~1e-3 or better for the clustered spectra seen here, far below the
    tolerances it is used with).
    """
    n = us[0].shape[0]
    m = vs[0].shape[0]

    def apply_a(x):
        X = x.reshape(n, m)
        return sum(u @ X @ v.T for u, v in zip(us, vs)).ravel()

    def apply_ah(x):
        X = x.reshape(n, m)
        return sum(u.conj().T @ X @ v.conj() for u, v in zip(us, vs)).ravel()

    return _power_norm(apply_a, apply_ah, (n * m, n * m), complex,
                       max_iter=max_iter, rtol=rtol, seed=seed)


def partial_trace(M, m, n):
    """Normalized partial trace over the second tensor factor.

    For ``M`` acting on C^m (x) C^n (Kronecker index order), returns the
    m x m matrix ``(id_m (x) tr_n)[M]``.
    """
    R = np.asarray(M).reshape(m, n, m, n)
    return np.einsum("juku->jk", R) / n


def entrywise_stderr(samples):
    """Entrywise absolute standard error of a stack of complex matrices.

    ``samples`` has shape (T, ...); the absolute variance of a complex
    entry is Var(Re) + Var(Im), and the SE scales with 1/sqrt(T).
    """
    samples = np.asarray(samples)
    T = samples.shape[0]
    if T < 2:
        return np.zeros(samples.shape[1:], dtype=float)
    var = samples.real.var(axis=0, ddof=1) + samples.imag.var(axis=0, ddof=1)
    return np.sqrt(var / T)
