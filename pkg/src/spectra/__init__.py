"""Random-matrix ensembles, matrix Dyson equation, Fock-space oracle, experiments.

The package is organised in five layers:

* :mod:`spectra.sampling` -- seeded samplers for Hermitian Gaussian,
  Ginibre and (pseudo-)Haar unitary ensembles.
* :mod:`spectra.ncpoly` -- noncommutative *-polynomials, their evaluation
  on matrix tuples, and block linearizations of quadratic expressions.
* :mod:`spectra.dyson` -- fixed-point solver for the quadratic matrix
  equation of the operator-valued Stieltjes transform, density and
  support reconstruction.
* :mod:`spectra.fock` -- truncated full Fock space as a brute-force
  oracle for moments and norms of free elements.
* :mod:`spectra.experiments` -- seeded Monte-Carlo harness comparing
  sampled spectra against the deterministic predictions.

:mod:`spectra.cli` exposes all of it as the ``spectra`` command.
"""

__version__ = "0.1.0"


class SolverFailure(RuntimeError):
    """Fixed-point solver did not reach the requested residual.

    Carries the last residual in ``residual`` and the number of
    iterations performed in ``iterations``.
    """

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class NumericFailure(RuntimeError):
    """A dense linear-algebra kernel (eigensolver, QR) failed."""


class BasisSizeError(ValueError):
    """Requested truncated Fock basis exceeds the configured word cap."""


from . import sampling, ncpoly, dyson, fock, experiments  # noqa: E402,F401
