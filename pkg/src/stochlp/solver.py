"""The outer central-path loop.

solve() embeds the instance into its feasible-start form, walks t down by a
factor (1 - eps/(3 sqrt(n))) per iteration while steering the iterate with the
normalized cosh-potential gradient, takes stochastic steps through the
maintained projection, and falls back to a deterministic recentering pass
whenever the potential explodes past n^3 or a step fails (resample cap,
positivity loss, or a singular factorization).  The dual variable y is not
maintained inside the loop; the steps keep s in the row space of A^T
implicitly, and y can be recovered at termination by least squares.

Parameter modes (log is natural, n clamped >= 3, n is the variable count of
the program being solved, i.e. original n + 2):

    paper      eps = 1/(40000 log n)  eps_mp = 1/40000
               k = 1000 eps sqrt(n) log^2 n / eps_mp   lam = 40 log n
               a = min(0.31389, 2/3)
    practical  eps = 1/(40 log n)     eps_mp = 1/40
               k = ceil(10 eps sqrt(n) log^2 n / eps_mp)  lam = 10 log n
               a = 1/3
    ultrashort eps = 1/(4 sqrt(n)), otherwise as practical with
               a = min(1/3, 0.31389)  (exploratory preset, no tuning target)

The caller's delta is shadowed by delta' = min(delta/2, 1/lam); delta' is used
both in the reformulation and in the stop rule t > delta'^2 / (2n), so the
reported guarantees (stated in terms of the caller's delta) only tighten.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import (CenteringFailedError, DomainError, FactorizationError,
                     ShapeError)
from .linalg import as_matrix, as_vector
from .model import LinearProgram, duality_gap, recover_solution, reformulate
from .potentials import clamped_log

TRACE_COLUMNS = ("iter", "t", "phi", "r_k", "support", "resamples", "gap")
_INT_COLUMNS = (0, 3, 4, 5)

MODES = ("practical", "paper", "ultrashort")
DUAL_EXPONENT = 0.31389
REBUILD_EVERY = 50  # silent maintainer refresh cadence inside solves


@dataclass(frozen=True)
class ModeParameters:
    eps: float
    eps_mp: float
    k: float
    lam: float
    a: float


def mode_parameters(n, mode="practical", a=None, omega=2.373):
    """Derived solver parameters for a program with n variables."""
    ln = clamped_log(n)
    rt = math.sqrt(n)
    if mode == "paper":
        eps = 1.0 / (40000.0 * ln)
        eps_mp = 1.0 / 40000.0
        k = 1000.0 * eps * rt * ln * ln / eps_mp
        lam = 40.0 * ln
        a_exp = min(DUAL_EXPONENT, 2.0 / 3.0)
    elif mode == "practical":
        eps = 1.0 / (40.0 * ln)
        eps_mp = 1.0 / 40.0
        k = float(math.ceil(10.0 * eps * rt * ln * ln / eps_mp))
        lam = 10.0 * ln
        a_exp = 1.0 / 3.0
    elif mode == "ultrashort":
        eps = 1.0 / (4.0 * rt)
        eps_mp = 1.0 / 40.0
        k = float(math.ceil(10.0 * eps * rt * ln * ln / eps_mp))
        lam = 10.0 * ln
        a_exp = min(1.0 / 3.0, DUAL_EXPONENT)
    else:
        raise DomainError(f"unknown mode {mode!r}; expected one of {MODES}")
    if a is not None:
        if not (0.0 < a < 1.0):
            raise DomainError(f"a must lie in (0, 1), got {a}")
        a_exp = float(a)
    return ModeParameters(eps=eps, eps_mp=eps_mp, k=max(k, 1.0), lam=lam,
                          a=a_exp)


@dataclass
class SolverConfig:
    """Knobs for one solve.

    keep_trace disables in-memory trace collection for very long runs (the
    paper-mode iteration count makes full traces impractically large); when it
    is off the report's trace is empty and flagged as disabled.
    deterministic_kernels pins the bitwise-reproducible sequential kernels;
    only sequential kernels are built, so both settings currently behave
    identically and traces reproduce byte-for-byte either way.
    """

    delta: float
    mode: str = "practical"
    a: float = None
    omega: float = 2.373
    seed: int = 0
    max_iters: int = None
    max_resamples: int = 100
    trace_path: str = None
    deterministic_kernels: bool = True
    keep_trace: bool = True

    def __post_init__(self):
        if not (0.0 < self.delta <= 1.0):
            raise DomainError(f"delta must lie in (0, 1], got {self.delta}")
        if self.mode not in MODES:
            raise DomainError(
                f"unknown mode {self.mode!r}; expected one of {MODES}")


@dataclass
class IterateState:
    """A central-path iterate with its cached mu = x s and potential value."""

    x: np.ndarray
    s: np.ndarray
    t: float
    mu: np.ndarray
    phi: float

    @classmethod
    def from_xs(cls, x, s, t, potential):
        x = as_vector(x, "x")
        s = as_vector(s, "s")
        if np.any(x <= 0.0) or np.any(s <= 0.0):
            raise DomainError("x and s must be strictly positive")
        if not t > 0.0:
            raise DomainError(f"t must be positive, got {t}")
        mu = x * s
        return cls(x=x, s=s, t=float(t), mu=mu,
                   phi=potential.value(mu / t - 1.0))


@dataclass
class SolveReport:
    """Outcome of one solve: recovered solution, bounds data and the trace."""

    x_hat: np.ndarray
    objective: float
    primal_infeas_l1: float
    iterations: int
    fallbacks: int
    trace: np.ndarray
    converged: bool
    duality_gap: float
    theta: float
    t_final: float
    diagnostics: dict = field(default_factory=dict)


def compute_delta_mu(x, s, t, t_new, eps, potential):
    """The steered mu-direction
    (t_new/t - 1) x s - (eps/2) t_new grad/||grad||.

    The normalized-gradient term is dropped below norm 1e-14 (exactly
    centered iterate).  Under x s within 10% of t the result has l2 norm at
    most eps * t.
    """
    x = as_vector(x, "x")
    s = as_vector(s, "s")
    if t_new > t:
        raise DomainError(f"t_new={t_new} exceeds t={t}")
    mu = x * s
    out = (t_new / t - 1.0) * mu
    grad = potential.gradient(mu / t - 1.0)
    gnorm = float(np.linalg.norm(grad))
    if gnorm >= 1e-14:
        out = out - (0.5 * eps * t_new / gnorm) * grad
    return out


def classical_step(x, s, t_new, a, eps_target, max_inner=None):
    """Deterministic recentering toward x s = t_new through exact projections.

    Newton iterations with the per-coordinate clamp |dmu_i| <= 0.1 x_i s_i
    until ||x s - t_new||_2 <= eps_target, capped at 64 ceil(sqrt(n) log n)
    inner iterations.  A x is preserved (null-space moves).  Raises
    CenteringFailedError when the cap is reached without convergence.
    """
    x = as_vector(x, "x").copy()
    s = as_vector(s, "s").copy()
    a = as_matrix(a, "A")
    n = x.shape[0]
    if np.any(x <= 0.0) or np.any(s <= 0.0):
        raise DomainError("x and s must be strictly positive")
    if max_inner is None:
        max_inner = 64 * int(math.ceil(math.sqrt(n) * clamped_log(n)))
    status = _kernels.centering(a, x, s, float(t_new), float(eps_target),
                                int(max_inner))
    if status == _kernels.CENTER_FACTORIZATION_FAILED:
        raise FactorizationError("Gram factorization failed while centering")
    if status != _kernels.CENTER_OK:
        raise CenteringFailedError(
            f"no centering to {eps_target:.3e} within {max_inner} iterations")
    return x, s


def iteration_bound(n, eps, delta_p):
    """ceil(3 sqrt(n)/eps * ln(2n/delta'^2)) + 1, the t-schedule length."""
    return int(math.ceil(3.0 * math.sqrt(n) / eps
                         * math.log(2.0 * n / delta_p ** 2))) + 1


def solve(lp, config):
    """Run the stochastic central-path method on lp.

    Returns a SolveReport; when the iteration cap is hit the report is
    flagged nonconverged instead of raising.  CenteringFailedError and
    FactorizationError propagate.
    """
    if not isinstance(lp, LinearProgram):
        raise ShapeError("lp must be a LinearProgram")
    if not isinstance(config, SolverConfig):
        raise ShapeError("config must be a SolverConfig")
    n_bar = lp.n + 2
    params = mode_parameters(n_bar, config.mode, a=config.a,
                             omega=config.omega)
    delta_p = min(config.delta / 2.0, 1.0 / params.lam)
    refm = reformulate(lp, delta_p)
    abar = refm.lpbar.A
    bbar = refm.lpbar.b
    x = refm.x0.copy()
    s = refm.s0.copy()
    t_stop = delta_p ** 2 / (2.0 * n_bar)

    max_iters = config.max_iters
    if max_iters is None:
        max_iters = iteration_bound(n_bar, params.eps, delta_p)

    w = np.empty(n_bar)
    v = np.empty(n_bar)
    vt = np.empty(n_bar)
    m = np.empty((n_bar, n_bar))
    counters = np.zeros(_kernels.N_COUNTERS)
    if not _kernels.mp_initialize(abar, x / s, w, v, vt, m, counters):
        raise FactorizationError("initial Gram factorization failed")

    keep_trace = bool(config.keep_trace)
    trace_buf = np.zeros((max_iters if keep_trace else 0, 7))
    diag = np.zeros(_kernels.N_DIAG)
    _kernels.run_central_path(
        abar, x, s, w, v, vt, m, counters,
        t_stop, params.eps, params.eps_mp, params.k, params.lam, params.a,
        config.omega, int(config.max_resamples), int(max_iters),
        float(REBUILD_EVERY), int(config.seed) & 0xFFFFFFFFFFFFFFFF,
        trace_buf, keep_trace, diag)

    status = int(diag[_kernels.DIAG_STATUS])
    if status == _kernels.STATUS_CENTERING_FAILED:
        raise CenteringFailedError("centering_failed during fallback")
    if status == _kernels.STATUS_FACTORIZATION_FAILED:
        raise FactorizationError("factorization failed during solve")
    iterations = int(diag[_kernels.DIAG_ITERATIONS])
    converged = status == _kernels.STATUS_OK

    x_hat = recover_solution(x, refm, lp)
    trace = trace_buf[:iterations] if keep_trace else trace_buf[:0]
    report = SolveReport(
        x_hat=x_hat,
        objective=float(np.dot(lp.c, x_hat)),
        primal_infeas_l1=float(np.abs(lp.A @ x_hat - lp.b).sum()),
        iterations=iterations,
        fallbacks=int(diag[_kernels.DIAG_FALLBACKS]),
        trace=trace,
        converged=converged,
        duality_gap=duality_gap(x, s),
        theta=float(x[-1]),
        t_final=float(diag[_kernels.DIAG_T_FINAL]),
        diagnostics={
            "delta_effective": delta_p,
            "mode": config.mode,
            "eps": params.eps,
            "eps_mp": params.eps_mp,
            "k": params.k,
            "lambda": params.lam,
            "a": params.a,
            "n_solved": n_bar,
            "max_step_infeas_rel": diag[_kernels.DIAG_MAX_STEP_INFEAS],
            "max_xbar_sbar_rel": diag[_kernels.DIAG_MAX_XBARSBAR_REL],
            "max_centrality_err": diag[_kernels.DIAG_MAX_CENTRALITY],
            "resamples_total": int(diag[_kernels.DIAG_RESAMPLES_TOTAL]),
            "phi_final": diag[_kernels.DIAG_PHI_FINAL],
            "step_unbounded": int(diag[_kernels.DIAG_STEP_UNBOUNDED]),
            "positivity_lost": int(diag[_kernels.DIAG_POSITIVITY_LOST]),
            "phi_explosions": int(diag[_kernels.DIAG_PHI_EXPLOSIONS]),
            "damped_steps": int(diag[_kernels.DIAG_DAMPED_STEPS]),
            "primal_infeas_bar_linf": float(
                np.abs(abar @ x - bbar).max()),
            "dual_infeas_bar_linf": _dual_infeasibility(refm, x, s),
            "x_hat_l1_exceeds_R": bool(np.abs(x_hat).sum() > lp.R),
            "trace_disabled": not keep_trace,
            "mp_counters": _counter_dict(counters),
        },
    )
    if config.trace_path is not None:
        write_trace_csv(config.trace_path, report.trace)
    return report


def recover_dual(refm, s):
    """Least-squares dual recovery: y with A^T y ~= c - s."""
    abar = refm.lpbar.A
    target = refm.lpbar.c - s
    y, *_ = np.linalg.lstsq(abar.T, target, rcond=None)
    return y


def _dual_infeasibility(refm, x, s):
    y = recover_dual(refm, s)
    return float(np.abs(refm.lpbar.A.T @ y + s - refm.lpbar.c).max())


def _counter_dict(counters):
    from .projection import COUNTER_NAMES
    out = {}
    for name, slot in COUNTER_NAMES:
        val = counters[slot]
        out[name] = val if name == "weighted_cost" else int(val)
    return out


def write_trace_csv(path, trace):
    """Write trace rows with the fixed header; floats as 17 significant digits."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(TRACE_COLUMNS) + "\n")
        for row in trace:
            cells = []
            for idx, val in enumerate(row):
                if idx in _INT_COLUMNS:
                    cells.append(str(int(val)))
                else:
                    cells.append(format(float(val), ".17g"))
            fh.write(",".join(cells) + "\n")
