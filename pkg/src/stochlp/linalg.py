"""Dense matrix/vector kernels shared by the whole package.

Matrices are float64 C-contiguous 2-D arrays, vectors 1-D arrays.  Inputs are
validated for shape and finiteness on entry; all functions are pure and safe
to call concurrently.  The kernels behind them are strictly sequential, so
results are bitwise reproducible; :func:`set_sequential_kernels` exists to pin
that mode explicitly (no parallel kernels are currently built, so both
settings behave identically).
"""

import numpy as np

from . import _kernels
from .errors import DomainError, FactorizationError, ShapeError

_SEQUENTIAL_ONLY = True


def set_sequential_kernels(flag=True):
    """Select strictly sequential kernels for bitwise reproducibility."""
    global _SEQUENTIAL_ONLY
    _SEQUENTIAL_ONLY = bool(flag)


def sequential_kernels():
    return _SEQUENTIAL_ONLY


def as_matrix(obj, name="matrix"):
    """Validate and return a float64 C-contiguous 2-D array."""
    arr = np.ascontiguousarray(obj, dtype=np.float64)
    if arr.ndim != 2:
        raise ShapeError(f"{name} must be 2-D, got ndim={arr.ndim}")
    if not np.isfinite(arr).all():
        raise DomainError(f"{name} contains non-finite entries")
    return arr


def as_vector(obj, name="vector"):
    """Validate and return a float64 contiguous 1-D array."""
    arr = np.ascontiguousarray(obj, dtype=np.float64)
    if arr.ndim != 1:
        raise ShapeError(f"{name} must be 1-D, got ndim={arr.ndim}")
    if not np.isfinite(arr).all():
        raise DomainError(f"{name} contains non-finite entries")
    return arr


def mat_mul(a, b):
    """Dense matrix product A @ B with dimension checking."""
    a = as_matrix(a, "A")
    b = as_matrix(b, "B")
    if a.shape[1] != b.shape[0]:
        raise ShapeError(
            f"inner dimensions differ: {a.shape} x {b.shape}")
    return a @ b


def form_gram(a, w):
    """A diag(w) A^T for positive weights w.

    The result is symmetric by construction and positive definite whenever A
    has full row rank.
    """
    a = as_matrix(a, "A")
    w = as_vector(w, "w")
    if w.shape[0] != a.shape[1]:
        raise ShapeError(
            f"w has length {w.shape[0]}, expected {a.shape[1]}")
    if np.any(w <= 0.0):
        raise DomainError("weights must be strictly positive")
    return _kernels.form_gram(a, w)


def solve_spd(g, b):
    """Solve G X = B for symmetric positive definite G.

    Uses a Cholesky factorization with a single retry that adds diagonal
    jitter 1e-12 * trace(G)/d; a second pivot failure raises
    :class:`FactorizationError` naming the failing pivot.
    """
    g = as_matrix(g, "G")
    if g.shape[0] != g.shape[1]:
        raise ShapeError(f"G must be square, got {g.shape}")
    b = np.asarray(b, dtype=np.float64)
    vector_rhs = b.ndim == 1
    if vector_rhs:
        b = b[:, None]
    b = as_matrix(b, "B")
    if b.shape[0] != g.shape[0]:
        raise ShapeError(
            f"B has {b.shape[0]} rows, expected {g.shape[0]}")
    x, ok, pivot = _kernels.spd_solve(g, b)
    if not ok:
        raise FactorizationError(
            f"matrix not positive definite within the jitter budget "
            f"(pivot {pivot})", pivot=int(pivot))
    return x[:, 0] if vector_rhs else x


def projection_full(a, w):
    """The orthogonal projection sqrt(W) A^T (A W A^T)^{-1} A sqrt(W).

    Symmetric, idempotent up to roundoff, with trace equal to the number of
    rows of A.  Rank deficiency of A surfaces as the solve_spd error.
    """
    a = as_matrix(a, "A")
    w = as_vector(w, "w")
    if w.shape[0] != a.shape[1]:
        raise ShapeError(
            f"w has length {w.shape[0]}, expected {a.shape[1]}")
    if np.any(w <= 0.0):
        raise DomainError("weights must be strictly positive")
    root = np.sqrt(w)
    asw = a * root  # A sqrt(W)
    gram = _kernels.form_gram(a, w)
    inner = solve_spd(gram, asw)  # (A W A^T)^{-1} A sqrt(W)
    p = asw.T @ inner
    return 0.5 * (p + p.T)


def cholesky_check(g):
    """Strict Cholesky feasibility check without the jitter retry.

    Returns True when g factorizes as written; used for full-row-rank
    validation of A A^T.
    """
    g = as_matrix(g, "G")
    _, ok, _ = _kernels.cholesky_lower(g)
    return bool(ok)
