"""Slow-but-sure reference implementations used as ground truth.

Everything here is deliberately independent of the compiled kernels: the
factorizations go through scipy, the projection is recomputed from scratch on
every call, and the brute-force LP solve enumerates basic solutions.  These
are the second route of every dual-route check in the test suite.
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import CenteringFailedError, DomainError, EnumerationGuardError, ShapeError
from .linalg import as_matrix, as_vector
from .model import LinearProgram, recover_solution, reformulate

ENUM_MAX_N = 30
ENUM_MAX_BASES = 5_000_000
_CHUNK = 4096


@dataclass
class OracleResult:
    optimum: float
    argmin: np.ndarray
    status: str  # optimal | infeasible | unbounded_flagged
    t_final: float = None
    duality_gap: float = None


def vertex_enumerate_solve(lp, check_bounded=False):
    """Brute-force optimum by enumerating all d-subsets of columns.

    Solves each basic system, keeps feasible bases (x_B >= -1e-10; entries in
    (-1e-10, 0) are clipped to zero in the reported argmin), and returns the
    minimum objective.  Degenerate bases are skipped with a determinant
    threshold of 1e-12 relative to the Hadamard bound.  The minimum over
    vertices equals the LP optimum only for bounded polytopes (the R-diameter
    promise); with check_bounded the recession system is enumerated too and an
    unbounded polytope is flagged, never certified.
    """
    if not isinstance(lp, LinearProgram):
        raise ShapeError("lp must be a LinearProgram")
    d, n = lp.d, lp.n
    n_bases = math.comb(n, d)
    if n > ENUM_MAX_N or n_bases > ENUM_MAX_BASES:
        raise EnumerationGuardError(
            f"enumeration guard exceeded: n={n}, C(n,d)={n_bases}")
    best = np.inf
    best_idx = None
    best_xb = None
    for idx, xb in _feasible_bases(lp.A, lp.b):
        obj = float(np.dot(lp.c[idx], xb))
        if obj < best:
            best = obj
            best_idx = idx
            best_xb = xb
    if best_idx is None:
        return OracleResult(optimum=np.nan, argmin=np.zeros(n),
                            status="infeasible")
    status = "optimal"
    if check_bounded:
        _, bounded = l1_diameter(lp)
        if not bounded:
            status = "unbounded_flagged"
    x = np.zeros(n)
    x[best_idx] = np.clip(best_xb, 0.0, None)
    return OracleResult(optimum=best, argmin=x, status=status)


def l1_diameter(lp):
    """Exact l1 diameter of {A x = b, x >= 0} by basis enumeration.

    Returns (diameter, bounded).  bounded is False when the recession system
    {A z = 0, 1.z = 1, z >= 0} has a basic feasible point, in which case the
    polytope is unbounded and the reported diameter (the max over vertices) is
    only a lower bound.  Same size guard as vertex_enumerate_solve.
    """
    if not isinstance(lp, LinearProgram):
        raise ShapeError("lp must be a LinearProgram")
    d, n = lp.d, lp.n
    if n > ENUM_MAX_N or math.comb(n, d) > ENUM_MAX_BASES:
        raise EnumerationGuardError(
            f"enumeration guard exceeded: n={n}, C(n,d)={math.comb(n, d)}")
    diameter = 0.0
    for idx, xb in _feasible_bases(lp.A, lp.b):
        diameter = max(diameter, float(np.abs(xb).sum()))
    ahom = np.vstack([lp.A, np.ones(n)])
    bhom = np.zeros(d + 1)
    bhom[d] = 1.0
    bounded = True
    if d + 1 <= n:
        for _idx, _xb in _feasible_bases(ahom, bhom):
            bounded = False
            break
    return diameter, bounded


def _feasible_bases(a, b):
    """Yield (column indices, basic solution) for feasible bases of A x = b."""
    d, n = a.shape
    combos = itertools.combinations(range(n), d)
    bmax = np.abs(b).max(initial=0.0)
    while True:
        chunk = list(itertools.islice(combos, _CHUNK))
        if not chunk:
            return
        idx = np.asarray(chunk, dtype=np.intp)
        bases = a[:, idx].transpose(1, 0, 2)
        colsq = (bases ** 2).sum(axis=1)
        hadamard = np.sqrt(np.prod(colsq, axis=1))
        dets = np.abs(np.linalg.det(bases))
        usable = dets > 1e-12 * hadamard + 1e-300
        if not usable.any():
            continue
        rhs = np.broadcast_to(b, (int(usable.sum()), d))[..., None]
        xb = np.linalg.solve(bases[usable], rhs)[..., 0]
        resid = np.abs(np.einsum("mij,mj->mi", bases[usable], xb)
                       - b).max(axis=1)
        ok = (resid <= 1e-9 * (1.0 + bmax)) & (xb.min(axis=1) >= -1e-10)
        sel = np.flatnonzero(usable)[ok]
        for row, pos in zip(xb[ok], sel):
            yield idx[pos], row


def naive_projection_apply(a, w, h):
    """Fresh-factorization application of sqrt(W) A^T (A W A^T)^{-1} A sqrt(W) h.

    The equivalence target for the maintained projection: every call refactors
    A W A^T with scipy's Cholesky, sharing no code with the maintained path.
    """
    a = as_matrix(a, "A")
    w = as_vector(w, "w")
    h = as_vector(h, "h")
    if w.shape[0] != a.shape[1] or h.shape[0] != a.shape[1]:
        raise ShapeError("w and h must have length n")
    if np.any(w <= 0.0):
        raise DomainError("weights must be strictly positive")
    root = np.sqrt(w)
    gram = (a * w) @ a.T
    factor = scipy.linalg.cho_factor(gram, lower=True)
    z = a @ (root * h)
    return root * (a.T @ scipy.linalg.cho_solve(factor, z))


def _newton_center(abar, x, s, t_target, tol, max_inner):
    """Textbook damped Newton recentering with exact scipy projections."""
    n = x.shape[0]
    for _ in range(max_inner):
        mu = x * s
        resid = np.linalg.norm(mu - t_target)
        if resid <= tol:
            return x, s
        dmu = np.clip(t_target - mu, -0.1 * mu, 0.1 * mu)
        w = x / s
        root_mu = np.sqrt(mu)
        root_w = np.sqrt(w)
        gram = (abar * w) @ abar.T
        factor = scipy.linalg.cho_factor(gram, lower=True)
        z = dmu / root_mu
        pz = root_w * (abar.T @ scipy.linalg.cho_solve(factor,
                                                       abar @ (root_w * z)))
        ds = (s / root_mu) * pz
        dx = (x / root_mu) * (z - pz)
        alpha = 1.0
        while alpha > 1e-18 and (np.any(x + alpha * dx <= 0.0)
                                 or np.any(s + alpha * ds <= 0.0)):
            alpha *= 0.5
        if alpha <= 1e-18:
            raise CenteringFailedError("reference IPM lost positivity")
        x = x + alpha * dx
        s = s + alpha * ds
    raise CenteringFailedError(
        f"reference IPM centering stalled above tol={tol:.3e}")


def reference_ipm(lp, delta):
    """Textbook short-step IPM with exact recomputed projections.

    Runs the feasible-start reformulation with the uniform decrement schedule
    t <- (1 - 1/(4 sqrt(n))) t, recentering to the new target each iteration
    (on the exact path this is the standard -t/(4 sqrt n) uniform move, and it
    self-corrects accumulated drift), until t <= delta'^2/(2n); recovery is
    shared with the main solver.
    """
    if not isinstance(lp, LinearProgram):
        raise ShapeError("lp must be a LinearProgram")
    if not (0.0 < delta <= 1.0):
        raise DomainError(f"delta must lie in (0, 1], got {delta}")
    n_bar = lp.n + 2
    rt = math.sqrt(n_bar)
    delta_p = min(delta / 2.0, 1.0 / (4.0 * rt))
    refm = reformulate(lp, delta_p)
    abar = refm.lpbar.A
    x = refm.x0.copy()
    s = refm.s0.copy()
    t = 1.0
    t_stop = delta_p ** 2 / (2.0 * n_bar)
    shrink = 1.0 - 1.0 / (4.0 * rt)
    max_outer = int(math.ceil(math.log(t_stop) / math.log(shrink))) + 2
    max_inner = 50
    for _ in range(max_outer):
        if t <= t_stop:
            break
        t_new = shrink * t
        x, s = _newton_center(abar, x, s, t_new, 0.05 * t_new, max_inner)
        t = t_new
    x_hat = recover_solution(x, refm, lp)
    return OracleResult(optimum=float(np.dot(lp.c, x_hat)), argmin=x_hat,
                        status="optimal", t_final=t,
                        duality_gap=float(np.dot(x, s)))
