"""Potential functions steering the solver.

Two potentials appear: the cosh centrality potential sum_i cosh(lambda r_i)
whose boundedness certifies multiplicative closeness of x s to t, and the
piecewise-quadratic soft-threshold potential that measures how far maintained
weights have drifted past the tolerance, together with the non-increasing
per-rank weight schedule used for amortized cost accounting.

All "log n" appearing in derived parameters is the natural logarithm with n
clamped to >= 3 (shared convention across the package).
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, PotentialOverflowError
from .linalg import as_vector

OVERFLOW_LIMIT = 700.0


def clamped_log(n):
    """Natural log of max(n, 3)."""
    return math.log(max(float(n), 3.0))


@dataclass(frozen=True)
class CoshPotential:
    """Phi(r) = sum_i cosh(lam * r_i)."""

    lam: float

    def __post_init__(self):
        if not (self.lam > 0.0 and math.isfinite(self.lam)):
            raise DomainError(f"lambda must be finite and positive, got {self.lam}")

    def _scaled(self, r):
        z = self.lam * as_vector(r, "r")
        if z.size and np.abs(z).max() > OVERFLOW_LIMIT:
            raise PotentialOverflowError(
                "cosh argument exceeds the overflow clamp; iterate diverged")
        return z

    def value(self, r):
        """Phi(r); always >= len(r)."""
        return float(np.cosh(self._scaled(r)).sum())

    def gradient(self, r):
        """Component i is lam * sinh(lam * r_i)."""
        return self.lam * np.sinh(self._scaled(r))


@dataclass(frozen=True)
class SoftErrorPotential:
    """The plateau function: quadratic up to eps_mp, capped at eps_mp past 2 eps_mp."""

    eps_mp: float

    def __post_init__(self):
        if not (0.0 < self.eps_mp <= 0.25):
            raise DomainError(
                f"eps_mp must lie in (0, 1/4], got {self.eps_mp}")

    def value(self, x):
        e = self.eps_mp
        ax = np.abs(np.asarray(x, dtype=np.float64))
        inner = ax * ax / (2.0 * e)
        mid = e - (2.0 * e - ax) ** 2 / (2.0 * e)
        out = np.where(ax <= e, inner, np.where(ax <= 2.0 * e, mid, e))
        return float(out) if out.ndim == 0 else out

    def derivative(self, x):
        e = self.eps_mp
        x = np.asarray(x, dtype=np.float64)
        ax = np.abs(x)
        mag = np.where(ax <= e, ax / e,
                       np.where(ax <= 2.0 * e, (2.0 * e - ax) / e, 0.0))
        out = np.sign(x) * mag
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class WeightSchedule:
    """Non-increasing per-rank weights g_1 >= ... >= g_n.

    Flat at n^{-a} below rank n^a, then a power law chosen so that rank-r
    batch cost is proportional to r * g_r.  omega enters only as a schedule
    parameter (no fast matrix multiplication is performed anywhere).
    """

    n: int
    a: float
    omega: float = 2.373

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"n must be positive, got {self.n}")
        if not (0.0 < self.a < 1.0):
            raise DomainError(f"a must lie in (0, 1), got {self.a}")
        if not (2.0 <= self.omega <= 3.0):
            raise DomainError(
                f"omega must lie in [2, 3], got {self.omega}")

    def weight(self, i):
        """g_i for a 1-based rank i."""
        if not 1 <= i <= self.n:
            raise DomainError(f"rank {i} outside [1, {self.n}]")
        return float(_kernels_g(float(i), float(self.n), self.a, self.omega))

    def table(self):
        """All weights g_1..g_n as an array (for full scans)."""
        return np.array([self.weight(i) for i in range(1, self.n + 1)])


def _kernels_g(i, n, a, omega):
    from ._kernels import g_weight
    return g_weight(i, n, a, omega)
