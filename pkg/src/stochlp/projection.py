"""Projection maintenance under slowly drifting diagonal weights.

The maintainer keeps M = A^T (A V A^T)^{-1} A for a lazily updated copy v of
the target weights w.  When enough coordinates drift past the multiplicative
tolerance eps_mp, the most-drifted batch (greedily expanded by the 1.5x rule)
is folded into M with a single rank-r Woodbury correction; queries apply the
projection at the reported weights vtilde, correcting on the fly for the few
coordinates where w escaped the tolerance.

Single-writer discipline: update/query mutate one instance and are not
reentrant.  The instance may be moved between threads but must not be shared
during a call.
"""

import math

import numpy as np

from . import _kernels
from .errors import DomainError, FactorizationError, ShapeError
from .linalg import as_matrix, as_vector

COUNTER_NAMES = (
    ("updates", _kernels.CTR_UPDATES),
    ("rank_total", _kernels.CTR_RANK_TOTAL),
    ("weighted_cost", _kernels.CTR_WEIGHTED_COST),
    ("queries", _kernels.CTR_QUERIES),
    ("rebuild_fallback", _kernels.CTR_REBUILD_FALLBACK),
    ("query_fallback", _kernels.CTR_QUERY_FALLBACK),
    ("periodic_rebuilds", _kernels.CTR_PERIODIC_REBUILDS),
    ("woodbury_updates", _kernels.CTR_WOODBURY_UPDATES),
)


class ProjectionMaintainer:
    """Maintains M = A^T (A V A^T)^{-1} A under drifting weights.

    Parameters
    ----------
    a : (d, n) array
        Full-row-rank constraint matrix.
    w : (n,) array
        Initial strictly positive weights.
    eps_mp : float
        Multiplicative tolerance in (0, 1/4).
    a_exp : float
        Batch exponent in (0, 1); rebuilds trigger once more than n**a_exp
        coordinates drift past eps_mp.
    omega : float, optional
        Matrix-multiplication exponent parameter of the rank-weight schedule
        (cost accounting only).
    rebuild_every : int, optional
        Silent full refresh of M after this many Woodbury updates, bounding
        cumulative floating-point drift.
    """

    def __init__(self, a, w, eps_mp, a_exp, *, omega=2.373, rebuild_every=50):
        a = as_matrix(a, "A")
        w = as_vector(w, "w")
        d, n = a.shape
        if w.shape[0] != n:
            raise ShapeError(f"w has length {w.shape[0]}, expected {n}")
        if np.any(w <= 0.0):
            raise DomainError("weights must be strictly positive")
        if not (0.0 < eps_mp <= 0.25):
            raise DomainError(f"eps_mp must lie in (0, 1/4], got {eps_mp}")
        if not (0.0 < a_exp < 1.0):
            raise DomainError(f"a must lie in (0, 1), got {a_exp}")
        self.A = a
        self.eps_mp = float(eps_mp)
        self.a_exp = float(a_exp)
        self.omega = float(omega)
        self.rebuild_every = int(rebuild_every)
        self.w = np.empty(n)
        self.v = np.empty(n)
        self.vtilde = np.empty(n)
        self.M = np.empty((n, n))
        self._counters = np.zeros(_kernels.N_COUNTERS)
        ok = _kernels.mp_initialize(a, w, self.w, self.v, self.vtilde,
                                    self.M, self._counters)
        if not ok:
            raise FactorizationError(
                "A V A^T not positive definite at initialization "
                "(rank-deficient A?)")

    @property
    def d(self):
        return self.A.shape[0]

    @property
    def n(self):
        return self.A.shape[1]

    @property
    def counters(self):
        """Snapshot of the event counters as name -> value."""
        snap = {}
        for name, slot in COUNTER_NAMES:
            val = self._counters[slot]
            snap[name] = val if name == "weighted_cost" else int(val)
        return snap

    def batch_threshold(self):
        """Rebuilds trigger once at least n**a coordinates drift."""
        return self.n ** self.a_exp

    def update(self, w_new):
        """Move the target weights to w_new; returns the reported vtilde.

        After the call every coordinate satisfies
        (1 - eps_mp) vtilde_i <= w_i <= (1 + eps_mp) vtilde_i.
        A singular correction system degrades to a full re-initialization at
        w_new (counted as rebuild_fallback).
        """
        w_new = as_vector(w_new, "w_new")
        if w_new.shape[0] != self.n:
            raise ShapeError(
                f"w_new has length {w_new.shape[0]}, expected {self.n}")
        if np.any(w_new <= 0.0):
            raise DomainError("weights must be strictly positive")
        r = _kernels.mp_update(self.A, self.w, self.v, self.vtilde, self.M,
                               self.eps_mp, self.a_exp, self.omega,
                               float(self.rebuild_every), self._counters,
                               w_new)
        if r < 0:
            raise FactorizationError(
                "A V A^T not positive definite during rebuild")
        return self.vtilde.copy()

    def query(self, h):
        """Apply sqrt(Vt) A^T (A Vt A^T)^{-1} A sqrt(Vt) to h at the last
        reported vtilde.  A singular on-the-fly system degrades to a fresh
        factorization for this query (counted as query_fallback)."""
        h = as_vector(h, "h")
        if h.shape[0] != self.n:
            raise ShapeError(
                f"h has length {h.shape[0]}, expected {self.n}")
        out, ok = _kernels.mp_query(self.A, self.w, self.v, self.vtilde,
                                    self.M, self.eps_mp, self._counters, h)
        if not ok:
            raise FactorizationError(
                "A Vt A^T not positive definite in query fallback")
        return out

    def drifted_set(self):
        """Indices where w escaped the (1 +- eps_mp) band around v."""
        y = np.abs(self.w / self.v - 1.0)
        return np.flatnonzero(y > self.eps_mp)


def initialize(a, w, eps_mp, a_exp, **kwargs):
    """Construct a ProjectionMaintainer (functional alias)."""
    return ProjectionMaintainer(a, w, eps_mp, a_exp, **kwargs)
