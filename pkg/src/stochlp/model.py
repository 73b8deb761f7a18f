"""LP instance representation, the feasible-start reformulation and recovery.

Instances are standard form: min c.x subject to A x = b, x >= 0, with a
trusted l1 diameter bound R (every feasible x has ||x||_1 <= R) and a
Lipschitz bound L >= ||c||_inf.

The reformulation embeds the instance into a slightly larger program whose
central path at t = 1 starts next to the all-ones point, so the solver never
needs a phase-1 procedure.  The textbook construction appends two rows that
are exact negatives of each other, which makes the constraint matrix rank
deficient; we emit the single merged row (1^T, 1, 0) with right-hand side
n + 1 and compensate with y0 = (0_d, -1) so the dual slack s0 is unchanged.
This preserves the feasible region and every recovery guarantee while keeping
A full row rank.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ShapeError
from .linalg import as_matrix, as_vector, cholesky_check

_L_FLOOR = 1e-30


@dataclass
class LinearProgram:
    """Standard-form instance (A, b, c) with diameter bound R and Lipschitz bound L.

    L may be omitted; it then defaults to max(||c||_inf, 1e-30).  A must have
    full row rank (checked through a factorization of A A^T).
    """

    A: np.ndarray
    b: np.ndarray
    c: np.ndarray
    R: float
    L: float = None

    def __post_init__(self):
        self.A = as_matrix(self.A, "A")
        self.b = as_vector(self.b, "b")
        self.c = as_vector(self.c, "c")
        d, n = self.A.shape
        if d > n:
            raise ShapeError(f"need d <= n, got d={d}, n={n}")
        if self.b.shape[0] != d:
            raise ShapeError(f"b has length {self.b.shape[0]}, expected {d}")
        if self.c.shape[0] != n:
            raise ShapeError(f"c has length {self.c.shape[0]}, expected {n}")
        self.R = float(self.R)
        if not (self.R > 0.0 and np.isfinite(self.R)):
            raise DomainError(f"R must be positive and finite, got {self.R}")
        cinf = float(np.abs(self.c).max()) if n else 0.0
        if self.L is None:
            self.L = max(cinf, _L_FLOOR)
        else:
            self.L = float(self.L)
            if self.L < cinf:
                raise DomainError(
                    f"L={self.L} is below ||c||_inf={cinf}")
        if not cholesky_check(self.A @ self.A.T):
            raise DomainError("A is rank deficient (A A^T is not SPD)")

    @property
    def d(self):
        return self.A.shape[0]

    @property
    def n(self):
        return self.A.shape[1]


@dataclass
class ReformulatedLP:
    """Feasible-start embedding of a LinearProgram.

    lpbar has d+1 rows and n+2 columns; (x0, y0, s0) is the feasible initial
    triple with x0 s0 within a factor (1 +- delta) of the all-ones vector.
    """

    lpbar: LinearProgram
    x0: np.ndarray
    y0: np.ndarray
    s0: np.ndarray
    delta: float
    original_n: int
    original_d: int


def reformulate(lp, delta):
    """Build the feasible-start program for accuracy parameter delta in (0, 1]."""
    if not (0.0 < delta <= 1.0):
        raise DomainError(f"delta must lie in (0, 1], got {delta}")
    d, n = lp.d, lp.n
    abar = np.zeros((d + 1, n + 2))
    abar[:d, :n] = lp.A
    abar[:d, n + 1] = lp.b / lp.R - lp.A.sum(axis=1)
    abar[d, :n] = 1.0
    abar[d, n] = 1.0
    bbar = np.concatenate([lp.b / lp.R, [float(n + 1)]])
    cbar = np.concatenate([(delta / lp.L) * lp.c, [0.0, 1.0]])

    x0 = np.ones(n + 2)
    y0 = np.zeros(d + 1)
    y0[d] = -1.0
    s0 = cbar - abar.T @ y0

    lpbar = LinearProgram(abar, bbar, cbar, R=float(n + 3), L=None)
    return ReformulatedLP(lpbar=lpbar, x0=x0, y0=y0, s0=s0, delta=float(delta),
                          original_n=n, original_d=d)


def recover_solution(xbar, refm, lp):
    """Map a reformulated iterate back: x_hat = R * xbar[:n].

    Entries below -1e-12 are rejected; tiny negative roundoff is clipped to
    zero.  When the duality gap of the final triple is <= delta^2 the result
    satisfies c.x_hat <= OPT + L R delta and
    ||A x_hat - b||_1 <= 2 delta (R sum|A_ij| + ||b||_1); those guarantees are
    exercised by the acceptance suite rather than asserted here.
    """
    xbar = as_vector(xbar, "xbar")
    if xbar.shape[0] != refm.original_n + 2:
        raise ShapeError(
            f"xbar has length {xbar.shape[0]}, expected {refm.original_n + 2}")
    if xbar.min(initial=0.0) < -1e-12:
        raise DomainError(
            f"xbar has a negative entry {xbar.min():.3e} beyond -1e-12")
    xhat = lp.R * np.clip(xbar[:refm.original_n], 0.0, None)
    return xhat


def duality_gap(x, s):
    """sum_i x_i s_i for a primal/dual slack pair."""
    x = as_vector(x, "x")
    s = as_vector(s, "s")
    if x.shape[0] != s.shape[0]:
        raise ShapeError(
            f"length mismatch: {x.shape[0]} vs {s.shape[0]}")
    return float(np.dot(x, s))
