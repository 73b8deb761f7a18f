"""Sparse direction sampling and the stochastic Newton step.

One step rescales the iterate so that xbar/sbar equals the maintainer's
reported weights while xbar sbar = x s exactly, samples an unbiased sparse
surrogate of the requested mu-direction, pushes it through the maintained
projection, and resamples until both relative moves are bounded by
1/(100 log n).  The random stream is a splitmix64 generator owned per solve
and consumed only for coordinates whose keep-probability is below one, so a
saturated direction (k >= n) is deterministic regardless of seed.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import (DomainError, FactorizationError, PositivityLostError,
                     ShapeError, StepUnboundedError)
from .linalg import as_vector
from .potentials import clamped_log


class RngState:
    """Seeded splitmix64 stream shared with the compiled kernels."""

    def __init__(self, seed=0):
        self.state = _kernels.seed_state(int(seed) & 0xFFFFFFFFFFFFFFFF)

    def uniform(self):
        """Next float64 in [0, 1)."""
        return float(_kernels._rng_u01(self.state))


@dataclass
class SparseDirection:
    """A sampled surrogate direction: zero off support, delta/p on it."""

    values: np.ndarray
    support: np.ndarray
    probs: np.ndarray
    resample_count: int


@dataclass
class StepResult:
    x_new: np.ndarray
    s_new: np.ndarray
    delta_x: np.ndarray
    delta_s: np.ndarray
    xbar: np.ndarray
    sbar: np.ndarray
    direction: SparseDirection


def sample_sparse_direction(delta_mu, k, rng):
    """Draw one sparse surrogate of delta_mu.

    Coordinate i survives with probability
    p_i = min(1, k (delta_i^2 / sum_l delta_l^2 + 1/n)) and is scaled by
    1/p_i, so the draw is unbiased with second moment at most
    sum delta^2 / k + delta_i^2 per coordinate.  An all-zero delta_mu yields
    an empty support (degenerate draw).
    """
    delta_mu = as_vector(delta_mu, "delta_mu")
    if not k >= 1.0:
        raise DomainError(f"k must be >= 1, got {k}")
    n = delta_mu.shape[0]
    values = np.empty(n)
    probs = np.empty(n)
    kept = np.empty(n, np.uint8)
    _kernels.sample_direction(delta_mu, float(k), rng.state, values, probs,
                              kept)
    support = np.flatnonzero(kept)
    return SparseDirection(values=values, support=support, probs=probs,
                           resample_count=1)


def stochastic_step(mp, x, s, delta_mu, k, eps, rng, *, max_resamples=100):
    """One stochastic central-path step through the maintainer mp.

    eps is carried for interface fidelity with the solver loop (the resample
    bound uses the fixed 1/(100 log n) threshold, not eps).  Raises
    StepUnboundedError when the resample cap is exhausted and
    PositivityLostError when the accepted move leaves the positive orthant;
    the solver reacts to both by falling back to the classical step.
    """
    x = as_vector(x, "x")
    s = as_vector(s, "s")
    delta_mu = as_vector(delta_mu, "delta_mu")
    n = mp.n
    if x.shape[0] != n or s.shape[0] != n or delta_mu.shape[0] != n:
        raise ShapeError("x, s and delta_mu must all have length n")
    if np.any(x <= 0.0) or np.any(s <= 0.0):
        raise DomainError("x and s must be strictly positive")
    if not k >= 1.0:
        raise DomainError(f"k must be >= 1, got {k}")

    dx = np.empty(n)
    ds = np.empty(n)
    xbar = np.empty(n)
    sbar = np.empty(n)
    tdm = np.empty(n)
    probs = np.empty(n)
    kept = np.empty(n, np.uint8)
    out = np.empty(5)
    _kernels.step_once(mp.A, mp.w, mp.v, mp.vtilde, mp.M, mp.eps_mp,
                       mp.a_exp, mp.omega, float(mp.rebuild_every),
                       mp._counters, x, s, delta_mu, np.zeros(n), float(k),
                       int(max_resamples), clamped_log(n), rng.state,
                       False, dx, ds, xbar, sbar, tdm, probs, kept, out)
    status = int(out[3])
    if status == _kernels.STEP_FACTORIZATION_FAILED:
        raise FactorizationError("projection maintenance factorization failed")
    direction = SparseDirection(values=tdm, support=np.flatnonzero(kept),
                                probs=probs, resample_count=int(out[2]))
    if status == _kernels.STEP_UNBOUNDED:
        raise StepUnboundedError(
            f"no bounded step after {int(out[2])} resamples")
    x_new = x + dx
    s_new = s + ds
    if np.any(x_new <= 0.0) or np.any(s_new <= 0.0):
        raise PositivityLostError("step left the positive orthant")
    return StepResult(x_new=x_new, s_new=s_new, delta_x=dx, delta_s=ds,
                      xbar=xbar, sbar=sbar, direction=direction)
