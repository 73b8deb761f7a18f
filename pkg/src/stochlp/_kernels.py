"""Compiled numerical kernels.

Everything here is pure float64 array code compiled with numba so the solver
loop, the projection maintainer and the recentering routine share one
implementation between the public classes and the hot path.  No kernel raises;
failures are reported through status codes and the Python wrappers convert
them into the package exceptions.

All kernels are strictly sequential, so identical inputs produce bitwise
identical outputs.
"""

import numpy as np
from numba import njit

# --- projection-maintainer counter slots -----------------------------------
CTR_UPDATES = 0          # update() calls
CTR_RANK_TOTAL = 1       # sum of batched ranks r_k
CTR_WEIGHTED_COST = 2    # sum of r_k * g(r_k)
CTR_QUERIES = 3          # query() calls
CTR_REBUILD_FALLBACK = 4  # singular Woodbury system -> full re-initialize
CTR_QUERY_FALLBACK = 5   # singular query system -> fresh factorization
CTR_PERIODIC_REBUILDS = 6  # roundoff-refresh rebuilds
CTR_WOODBURY_UPDATES = 7  # batched rank updates applied
CTR_SINCE_REFRESH = 8    # internal: Woodbury updates since the last refresh
N_COUNTERS = 9

# --- solve loop status codes ------------------------------------------------
STATUS_OK = 0
STATUS_NONCONVERGED = 1
STATUS_CENTERING_FAILED = 2
STATUS_FACTORIZATION_FAILED = 3

# --- step status codes -------------------------------------------------------
STEP_OK = 0
STEP_UNBOUNDED = 1
STEP_FACTORIZATION_FAILED = 2

# --- centering status codes --------------------------------------------------
CENTER_OK = 0
CENTER_NO_CONVERGENCE = 1
CENTER_FACTORIZATION_FAILED = 2

# --- solve diagnostics slots --------------------------------------------------
DIAG_STATUS = 0
DIAG_ITERATIONS = 1
DIAG_FALLBACKS = 2
DIAG_T_FINAL = 3
DIAG_MAX_STEP_INFEAS = 4     # max ||A dx|| / (||A||_F ||x||_2) over accepted steps
DIAG_MAX_XBARSBAR_REL = 5    # max relative |xbar*sbar - x*s|
DIAG_MAX_CENTRALITY = 6      # max post-iteration ||xs/t - 1||_inf
DIAG_RESAMPLES_TOTAL = 7
DIAG_PHI_FINAL = 8
DIAG_STEP_UNBOUNDED = 9
DIAG_POSITIVITY_LOST = 10
DIAG_PHI_EXPLOSIONS = 11
DIAG_DAMPED_STEPS = 12
N_DIAG = 13

_EXP_CLAMP = 700.0
_U64 = np.uint64


@njit(cache=True, inline="always")
def _rng_u01(state):
    # splitmix64; state is a length-1 uint64 array
    state[0] = state[0] + _U64(0x9E3779B97F4A7C15)
    z = state[0]
    z = (z ^ (z >> _U64(30))) * _U64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> _U64(27))) * _U64(0x94D049BB133111EB)
    z = z ^ (z >> _U64(31))
    return np.float64(z >> _U64(11)) * (1.0 / 9007199254740992.0)


@njit(cache=True)
def seed_state(seed):
    state = np.empty(1, dtype=np.uint64)
    state[0] = _U64(seed) * _U64(0x9E3779B97F4A7C15) + _U64(0x1F123BB5)
    return state


@njit(cache=True, inline="always")
def _clamped_log(n):
    # natural log with the shared n >= 3 clamp
    if n < 3.0:
        return np.log(3.0)
    return np.log(n)


@njit(cache=True)
def g_weight(i, n, a, omega):
    # rank weight schedule; i is the 1-based rank
    if i < n ** a:
        return n ** (-a)
    ex = (omega - 2.0) / (1.0 - a)
    return i ** (ex - 1.0) * n ** (-a * ex)


@njit(cache=True)
def cholesky_lower(g):
    """Lower Cholesky factor of g.  Returns (L, ok, failing pivot index)."""
    n = g.shape[0]
    lo = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1):
            acc = g[i, j]
            for k in range(j):
                acc -= lo[i, k] * lo[j, k]
            if i == j:
                if not (acc > 0.0) or not np.isfinite(acc):
                    return lo, False, i
                lo[i, i] = np.sqrt(acc)
            else:
                lo[i, j] = acc / lo[j, j]
    return lo, True, -1


@njit(cache=True)
def _chol_solve(lo, b):
    """Solve (L L^T) X = B for matrix B; B is not modified."""
    n = lo.shape[0]
    m = b.shape[1]
    x = b.copy()
    for col in range(m):
        for i in range(n):
            acc = x[i, col]
            for k in range(i):
                acc -= lo[i, k] * x[k, col]
            x[i, col] = acc / lo[i, i]
        for i in range(n - 1, -1, -1):
            acc = x[i, col]
            for k in range(i + 1, n):
                acc -= lo[k, i] * x[k, col]
            x[i, col] = acc / lo[i, i]
    return x


@njit(cache=True)
def spd_solve(g, b):
    """Solve g X = B with one jitter retry.  Returns (X, ok, pivot)."""
    lo, ok, piv = cholesky_lower(g)
    if not ok:
        d = g.shape[0]
        tr = 0.0
        for i in range(d):
            tr += g[i, i]
        jit = 1e-12 * tr / d
        gj = g.copy()
        for i in range(d):
            gj[i, i] += jit
        lo, ok, piv = cholesky_lower(gj)
        if not ok:
            return b.copy(), False, piv
    return _chol_solve(lo, b), True, -1


@njit(cache=True)
def form_gram(a, w):
    """A diag(w) A^T, symmetric by construction."""
    d, n = a.shape
    g = np.empty((d, d))
    for i in range(d):
        for j in range(i + 1):
            acc = 0.0
            for l in range(n):
                acc += a[i, l] * w[l] * a[j, l]
            g[i, j] = acc
            g[j, i] = acc
    return g


@njit(cache=True)
def compute_m(a, v):
    """Fresh M = A^T (A V A^T)^{-1} A.  Returns (M, ok)."""
    d, n = a.shape
    g = form_gram(a, v)
    y, ok, _ = spd_solve(g, a)
    if not ok:
        return np.zeros((n, n)), False
    at = np.ascontiguousarray(a.T)
    m = at @ np.ascontiguousarray(y)
    for i in range(n):
        for j in range(i):
            s = 0.5 * (m[i, j] + m[j, i])
            m[i, j] = s
            m[j, i] = s
    return m, True


@njit(cache=True)
def _lu_solve(amat, b):
    """Partial-pivot LU solve of amat X = B in place.  Returns ok flag."""
    n = amat.shape[0]
    m = b.shape[1]
    scale = 0.0
    for i in range(n):
        for j in range(n):
            v = abs(amat[i, j])
            if v > scale:
                scale = v
    if scale == 0.0:
        return False
    tol = 1e-13 * scale
    for col in range(n):
        piv = col
        best = abs(amat[col, col])
        for i in range(col + 1, n):
            v = abs(amat[i, col])
            if v > best:
                best = v
                piv = i
        if best <= tol or not np.isfinite(best):
            return False
        if piv != col:
            for j in range(n):
                amat[col, j], amat[piv, j] = amat[piv, j], amat[col, j]
            for j in range(m):
                b[col, j], b[piv, j] = b[piv, j], b[col, j]
        inv = 1.0 / amat[col, col]
        for i in range(col + 1, n):
            f = amat[i, col] * inv
            if f != 0.0:
                amat[i, col] = f
                for j in range(col + 1, n):
                    amat[i, j] -= f * amat[col, j]
                for j in range(m):
                    b[i, j] -= f * b[col, j]
    for col in range(n - 1, -1, -1):
        inv = 1.0 / amat[col, col]
        for j in range(m):
            acc = b[col, j]
            for i in range(col + 1, n):
                acc -= amat[col, i] * b[i, j]
            b[col, j] = acc * inv
    return True


@njit(cache=True)
def mp_initialize(a, w0, w, v, vt, m, counters):
    """Initialize the maintainer state in place.  Returns ok flag."""
    w[:] = w0
    v[:] = w0
    vt[:] = w0
    mn, ok = compute_m(a, w0)
    if not ok:
        return False
    m[:, :] = mn
    counters[:] = 0.0
    return True


@njit(cache=True)
def mp_update(a, w, v, vt, m, eps_mp, a_exp, omega, rebuild_every, counters,
              w_new):
    """Batched-Woodbury update.  Returns the batched rank r (0 when below the
    n^a threshold) or -1 on an unrecoverable factorization failure."""
    n = w.shape[0]
    counters[CTR_UPDATES] += 1.0
    ya = np.empty(n)
    r0 = 0
    for i in range(n):
        ya[i] = abs(w_new[i] / v[i] - 1.0)
        if ya[i] >= eps_mp:
            r0 += 1
    r_used = 0
    if r0 >= n ** a_exp:
        order = np.argsort(-ya, kind="mergesort")
        r = r0
        shrink = 1.0 - 1.0 / _clamped_log(float(n))
        while 3 * r < 2 * n:
            nxt = (3 * r + 1) // 2  # ceil(1.5 r), 1-based rank
            if ya[order[nxt - 1]] >= shrink * ya[order[r - 1]]:
                r = nxt
            else:
                break
        if r > n:
            r = n
        # coordinates with w_new == v contribute a zero diagonal to Delta and
        # nothing to the correction; drop them from the batch
        sel = np.empty(r, np.int64)
        rs = 0
        for idx in range(r):
            j = order[idx]
            if w_new[j] != v[j]:
                sel[rs] = j
                rs += 1
        ok = True
        if rs > 0:
            delta = np.empty(rs)
            for ii in range(rs):
                delta[ii] = w_new[sel[ii]] - v[sel[ii]]
            # (Delta^{-1} + M_SS)^{-1} = (I + Delta M_SS)^{-1} Delta, which
            # avoids inverting Delta
            mid = np.empty((rs, rs))
            for ii in range(rs):
                di = delta[ii]
                si = sel[ii]
                for jj in range(rs):
                    mid[ii, jj] = di * m[si, sel[jj]]
                mid[ii, ii] += 1.0
            rhs = np.empty((rs, n))
            for ii in range(rs):
                di = delta[ii]
                si = sel[ii]
                for jj in range(n):
                    rhs[ii, jj] = di * m[si, jj]
            ok = _lu_solve(mid, rhs)
            if ok:
                mcols = np.empty((n, rs))
                for jj in range(rs):
                    sj = sel[jj]
                    for ii in range(n):
                        mcols[ii, jj] = m[ii, sj]
                corr = mcols @ rhs
                for ii in range(n):
                    for jj in range(n):
                        m[ii, jj] -= corr[ii, jj]
                for ii in range(n):
                    for jj in range(ii):
                        s = 0.5 * (m[ii, jj] + m[jj, ii])
                        m[ii, jj] = s
                        m[jj, ii] = s
                for ii in range(rs):
                    v[sel[ii]] = w_new[sel[ii]]
                counters[CTR_WOODBURY_UPDATES] += 1.0
                counters[CTR_SINCE_REFRESH] += 1.0
                if counters[CTR_SINCE_REFRESH] >= rebuild_every:
                    mn, ok2 = compute_m(a, v)
                    if ok2:
                        m[:, :] = mn
                        counters[CTR_PERIODIC_REBUILDS] += 1.0
                    counters[CTR_SINCE_REFRESH] = 0.0
        if not ok:
            # singular correction system: rebuild from scratch at w_new
            v[:] = w_new
            mn, ok2 = compute_m(a, v)
            if not ok2:
                return -1
            m[:, :] = mn
            counters[CTR_REBUILD_FALLBACK] += 1.0
            counters[CTR_SINCE_REFRESH] = 0.0
        r_used = r
        counters[CTR_RANK_TOTAL] += float(r)
        counters[CTR_WEIGHTED_COST] += r * g_weight(float(r), float(n),
                                                    a_exp, omega)
    w[:] = w_new
    for i in range(n):
        if abs(w[i] / v[i] - 1.0) <= eps_mp:
            vt[i] = v[i]
        else:
            vt[i] = w[i]
    return r_used


@njit(cache=True)
def mp_query(a, w, v, vt, m, eps_mp, counters, h):
    """Apply sqrt(Vt) A^T (A Vt A^T)^{-1} A sqrt(Vt) to h.

    Returns (result, ok).  ok is False only if both the Woodbury path and the
    fresh-factorization fallback fail.
    """
    n = w.shape[0]
    counters[CTR_QUERIES] += 1.0
    sv = np.empty(n)
    u = np.empty(n)
    nnz = 0
    for i in range(n):
        sv[i] = np.sqrt(vt[i])
        u[i] = sv[i] * h[i]
        if u[i] != 0.0:
            nnz += 1
    if 4 * nnz < n:
        base = np.zeros(n)
        for j in range(n):
            uj = u[j]
            if uj != 0.0:
                for i in range(n):
                    base[i] += m[i, j] * uj
    else:
        base = m @ u
    st = np.empty(n, np.int64)
    rt = 0
    for i in range(n):
        if abs(w[i] / v[i] - 1.0) > eps_mp and vt[i] != v[i]:
            st[rt] = i
            rt += 1
    if rt > 0:
        delta = np.empty(rt)
        for ii in range(rt):
            delta[ii] = vt[st[ii]] - v[st[ii]]
        mid = np.empty((rt, rt))
        rhs = np.empty((rt, 1))
        for ii in range(rt):
            di = delta[ii]
            si = st[ii]
            for jj in range(rt):
                mid[ii, jj] = di * m[si, st[jj]]
            mid[ii, ii] += 1.0
            acc = 0.0
            for jj in range(n):
                acc += m[si, jj] * u[jj]
            rhs[ii, 0] = di * acc
        ok = _lu_solve(mid, rhs)
        if ok:
            for ii in range(rt):
                ci = rhs[ii, 0]
                si = st[ii]
                for jj in range(n):
                    base[jj] -= m[jj, si] * ci
        else:
            counters[CTR_QUERY_FALLBACK] += 1.0
            g = form_gram(a, vt)
            d = a.shape[0]
            z = np.zeros((d, 1))
            for i in range(d):
                acc = 0.0
                for jj in range(n):
                    acc += a[i, jj] * u[jj]
                z[i, 0] = acc
            sol, ok2, _ = spd_solve(g, z)
            if not ok2:
                return base, False
            for jj in range(n):
                acc = 0.0
                for i in range(d):
                    acc += a[i, jj] * sol[i, 0]
                base[jj] = acc
    out = np.empty(n)
    for i in range(n):
        out[i] = sv[i] * base[i]
    return out, True


@njit(cache=True)
def sample_direction(delta_mu, k, state, values, probs, kept):
    """Per-coordinate Bernoulli sparsification of delta_mu.

    Fills values (scaled by 1/p on the support, zero elsewhere), probs and the
    kept mask.  Returns (support size, all-probabilities-one flag, sum of
    squares of delta_mu).  Randomness is consumed only for p_i < 1, so a
    saturated direction is deterministic.
    """
    n = delta_mu.shape[0]
    ssq = 0.0
    for i in range(n):
        ssq += delta_mu[i] * delta_mu[i]
    if ssq == 0.0:
        for i in range(n):
            values[i] = 0.0
            probs[i] = 1.0
            kept[i] = 0
        return 0, True, 0.0
    inv_n = 1.0 / n
    support = 0
    all_one = True
    for i in range(n):
        p = k * (delta_mu[i] * delta_mu[i] / ssq + inv_n)
        if p >= 1.0:
            probs[i] = 1.0
            values[i] = delta_mu[i]
            kept[i] = 1
            support += 1
        else:
            all_one = False
            probs[i] = p
            if _rng_u01(state) < p:
                values[i] = delta_mu[i] / p
                kept[i] = 1
                support += 1
            else:
                values[i] = 0.0
                kept[i] = 0
    return support, all_one, ssq


@njit(cache=True)
def step_once(a, w, v, vt, m, eps_mp, a_exp, omega, rebuild_every, counters,
              x, s, base_mu, steer_mu, k, max_resamples, logn, state,
              allow_damping, dx, ds, xbar, sbar, tdm, probs, kept, out):
    """One sparse-direction step (update, rescale, sample/query loop).

    The requested mu-direction is base_mu + steer_mu; the split exists so the
    solver can damp only the potential-steering component when a saturated
    (deterministic) direction trips the resample bound, keeping the
    t-tracking part intact.  With allow_damping off the combined direction is
    used as-is and a deterministic failure exits immediately (pure
    resample-until-bounded semantics).

    Fills dx/ds with the candidate move and xbar/sbar/tdm/probs/kept with the
    rescaled pair and the sampled direction.  out receives
    [r_k, support, resamples, status, beta].
    """
    n = x.shape[0]
    wn = np.empty(n)
    for i in range(n):
        wn[i] = x[i] / s[i]
    r_k = mp_update(a, w, v, vt, m, eps_mp, a_exp, omega, rebuild_every,
                    counters, wn)
    if r_k < 0:
        out[0] = 0.0
        out[1] = 0.0
        out[2] = 0.0
        out[3] = float(STEP_FACTORIZATION_FAILED)
        out[4] = 1.0
        return
    sq = np.empty(n)
    h = np.empty(n)
    delta_mu = np.empty(n)
    for i in range(n):
        q = np.sqrt(vt[i] / w[i])
        xbar[i] = x[i] * q
        sbar[i] = s[i] / q
        sq[i] = np.sqrt(xbar[i] * sbar[i])
    thresh = 1.0 / (100.0 * logn)
    status = STEP_UNBOUNDED
    support = 0
    resamples = 0
    beta = 1.0
    while resamples < max_resamples and beta > 1e-7:
        resamples += 1
        for i in range(n):
            delta_mu[i] = base_mu[i] + beta * steer_mu[i]
        support, all_one, ssq = sample_direction(delta_mu, k, state, tdm,
                                                 probs, kept)
        if ssq == 0.0:
            for i in range(n):
                dx[i] = 0.0
                ds[i] = 0.0
            status = STEP_OK
            break
        for i in range(n):
            h[i] = tdm[i] / sq[i]
        pmu, okq = mp_query(a, w, v, vt, m, eps_mp, counters, h)
        if not okq:
            status = STEP_FACTORIZATION_FAILED
            break
        bounded = True
        for i in range(n):
            ds[i] = (sbar[i] / sq[i]) * pmu[i]
            dx[i] = tdm[i] / sbar[i] - (xbar[i] / sq[i]) * pmu[i]
        for i in range(n):
            if abs(ds[i] / sbar[i]) > thresh or abs(dx[i] / xbar[i]) > thresh:
                bounded = False
                break
        if bounded:
            status = STEP_OK
            break
        if all_one:
            if not allow_damping:
                # deterministic direction: resampling cannot change it
                break
            beta *= 0.5
        elif allow_damping and resamples >= 8:
            # persistent stochastic failures: shrink the steering too
            beta *= 0.5
    out[0] = float(r_k)
    out[1] = float(support)
    out[2] = float(resamples)
    out[3] = float(status)
    out[4] = beta


@njit(cache=True)
def centering(a, x, s, t_target, eps_target, max_inner):
    """Deterministic full-dimension recentering toward x s = t_target.

    Newton steps through the exact projection with the per-coordinate clamp
    |dmu_i| <= 0.1 x_i s_i, damped to keep the iterate positive.  Returns a
    CENTER_* status.  x and s are updated in place.
    """
    d, n = a.shape
    wrk = np.empty(n)
    for _ in range(max_inner):
        resid = 0.0
        for i in range(n):
            wrk[i] = x[i] * s[i] - t_target
            resid += wrk[i] * wrk[i]
        resid = np.sqrt(resid)
        if resid <= eps_target:
            return CENTER_OK
        w = np.empty(n)
        z = np.empty(n)
        rtmu = np.empty(n)
        rtw = np.empty(n)
        for i in range(n):
            mu = x[i] * s[i]
            dmu = t_target - mu
            cap = 0.1 * mu
            if dmu > cap:
                dmu = cap
            elif dmu < -cap:
                dmu = -cap
            w[i] = x[i] / s[i]
            rtmu[i] = np.sqrt(mu)
            rtw[i] = np.sqrt(w[i])
            z[i] = dmu / rtmu[i]
        g = form_gram(a, w)
        rhs = np.zeros((d, 1))
        for i in range(d):
            acc = 0.0
            for j in range(n):
                acc += a[i, j] * rtw[j] * z[j]
            rhs[i, 0] = acc
        sol, ok, _ = spd_solve(g, rhs)
        if not ok:
            return CENTER_FACTORIZATION_FAILED
        dx = np.empty(n)
        dsv = np.empty(n)
        for j in range(n):
            acc = 0.0
            for i in range(d):
                acc += a[i, j] * sol[i, 0]
            pz = rtw[j] * acc
            dsv[j] = (s[j] / rtmu[j]) * pz
            dx[j] = (x[j] / rtmu[j]) * (z[j] - pz)
        alpha = 1.0
        for _ in range(60):
            good = True
            for i in range(n):
                if x[i] + alpha * dx[i] <= 0.0 or s[i] + alpha * dsv[i] <= 0.0:
                    good = False
                    break
            if good:
                break
            alpha *= 0.5
        else:
            return CENTER_NO_CONVERGENCE
        for i in range(n):
            x[i] += alpha * dx[i]
            s[i] += alpha * dsv[i]
    resid = 0.0
    for i in range(n):
        di = x[i] * s[i] - t_target
        resid += di * di
    if np.sqrt(resid) <= eps_target:
        return CENTER_OK
    return CENTER_NO_CONVERGENCE


@njit(cache=True)
def run_central_path(a, x, s, w, v, vt, m, counters,
                     t_stop, eps, eps_mp, k, lam, a_exp, omega,
                     max_resamples, max_iters, rebuild_every, seed,
                     trace, keep_trace, diag):
    """The outer central-path loop.

    x, s and the maintainer state are updated in place; per-iteration rows go
    into trace when keep_trace is set and summary values into diag.
    """
    d, n = a.shape
    logn = _clamped_log(float(n))
    state = seed_state(seed)
    fac = 1.0 - eps / (3.0 * np.sqrt(n))
    phi_threshold = float(n) ** 3
    a_fro = 0.0
    for i in range(d):
        for j in range(n):
            a_fro += a[i, j] * a[i, j]
    a_fro = np.sqrt(a_fro)
    max_inner = 64 * int(np.ceil(np.sqrt(n) * logn))

    grad = np.empty(n)
    base_mu = np.empty(n)
    steer_mu = np.empty(n)
    dx = np.empty(n)
    dsv = np.empty(n)
    xbar = np.empty(n)
    sbar = np.empty(n)
    tdm = np.empty(n)
    probs = np.empty(n)
    kept = np.empty(n, np.uint8)
    out = np.empty(5)

    t = 1.0
    it = 0
    fallbacks = 0
    status = STATUS_OK
    max_step_infeas = 0.0
    max_xs_rel = 0.0
    max_cent = 0.0
    resamples_total = 0.0
    su_count = 0.0
    pl_count = 0.0
    pe_count = 0.0
    damped = 0.0
    phi_new = 0.0

    while t > t_stop:
        if it >= max_iters:
            status = STATUS_NONCONVERGED
            break
        t_new = fac * t
        # delta_mu = (t_new/t - 1) xs - (eps/2) t_new * grad/||grad||,
        # carried split so the step driver can damp only the steering part
        gnorm = 0.0
        shift = t_new / t - 1.0
        for i in range(n):
            mu_i = x[i] * s[i]
            arg = lam * (mu_i / t - 1.0)
            if arg > _EXP_CLAMP:
                arg = _EXP_CLAMP
            elif arg < -_EXP_CLAMP:
                arg = -_EXP_CLAMP
            e = np.exp(arg)
            grad[i] = lam * 0.5 * (e - 1.0 / e)
            gnorm += grad[i] * grad[i]
            base_mu[i] = shift * mu_i
            steer_mu[i] = 0.0
        gnorm = np.sqrt(gnorm)
        if gnorm >= 1e-14:
            cmul = 0.5 * eps * t_new / gnorm
            for i in range(n):
                steer_mu[i] = -cmul * grad[i]

        step_once(a, w, v, vt, m, eps_mp, a_exp, omega, rebuild_every,
                  counters, x, s, base_mu, steer_mu, k, max_resamples, logn,
                  state, True, dx, dsv, xbar, sbar, tdm, probs, kept, out)
        r_k = out[0]
        support = out[1]
        resamples = out[2]
        st = int(out[3])
        resamples_total += resamples
        if st == STEP_OK and out[4] < 1.0:
            damped += 1.0

        fellback = False
        if st == STEP_OK:
            for i in range(n):
                if x[i] + dx[i] <= 0.0 or s[i] + dsv[i] <= 0.0:
                    fellback = True
                    pl_count += 1.0
                    break
            if not fellback:
                phi_new = 0.0
                for i in range(n):
                    arg = lam * ((x[i] + dx[i]) * (s[i] + dsv[i]) / t_new
                                 - 1.0)
                    if arg > _EXP_CLAMP:
                        arg = _EXP_CLAMP
                    elif arg < -_EXP_CLAMP:
                        arg = -_EXP_CLAMP
                    e = np.exp(arg)
                    phi_new += 0.5 * (e + 1.0 / e)
                if phi_new > phi_threshold:
                    fellback = True
                    pe_count += 1.0
        else:
            fellback = True
            if st == STEP_UNBOUNDED:
                su_count += 1.0
            # STEP_FACTORIZATION_FAILED also degrades to the classical step

        if not fellback:
            # accepted stochastic step: track the null-space and rescaling
            # identities before committing
            adx = 0.0
            xnrm = 0.0
            for i in range(d):
                acc = 0.0
                for j in range(n):
                    acc += a[i, j] * dx[j]
                adx += acc * acc
            for j in range(n):
                xnrm += x[j] * x[j]
            ratio = np.sqrt(adx) / (a_fro * np.sqrt(xnrm) + 1e-300)
            if ratio > max_step_infeas:
                max_step_infeas = ratio
            for i in range(n):
                mu_i = x[i] * s[i]
                rel = abs(xbar[i] * sbar[i] - mu_i) / mu_i
                if rel > max_xs_rel:
                    max_xs_rel = rel
            for i in range(n):
                x[i] += dx[i]
                s[i] += dsv[i]
        else:
            fallbacks += 1
            okc = centering(a, x, s, t_new, t_new / (2.0 * lam), max_inner)
            if okc == CENTER_FACTORIZATION_FAILED:
                status = STATUS_FACTORIZATION_FAILED
                break
            if okc == CENTER_NO_CONVERGENCE:
                status = STATUS_CENTERING_FAILED
                break
            for i in range(n):
                w[i] = x[i] / s[i]
            v[:] = w
            vt[:] = w
            mn, okm = compute_m(a, v)
            if not okm:
                status = STATUS_FACTORIZATION_FAILED
                break
            m[:, :] = mn
            counters[CTR_SINCE_REFRESH] = 0.0
            phi_new = 0.0
            for i in range(n):
                arg = lam * (x[i] * s[i] / t_new - 1.0)
                if arg > _EXP_CLAMP:
                    arg = _EXP_CLAMP
                elif arg < -_EXP_CLAMP:
                    arg = -_EXP_CLAMP
                e = np.exp(arg)
                phi_new += 0.5 * (e + 1.0 / e)

        gap = 0.0
        cent = 0.0
        for i in range(n):
            mu_i = x[i] * s[i]
            gap += mu_i
            dev = abs(mu_i / t_new - 1.0)
            if dev > cent:
                cent = dev
        if cent > max_cent:
            max_cent = cent
        if keep_trace:
            trace[it, 0] = float(it)
            trace[it, 1] = t_new
            trace[it, 2] = phi_new
            trace[it, 3] = r_k
            trace[it, 4] = support
            trace[it, 5] = resamples
            trace[it, 6] = gap
        t = t_new
        it += 1

    diag[DIAG_STATUS] = float(status)
    diag[DIAG_ITERATIONS] = float(it)
    diag[DIAG_FALLBACKS] = float(fallbacks)
    diag[DIAG_T_FINAL] = t
    diag[DIAG_MAX_STEP_INFEAS] = max_step_infeas
    diag[DIAG_MAX_XBARSBAR_REL] = max_xs_rel
    diag[DIAG_MAX_CENTRALITY] = max_cent
    diag[DIAG_RESAMPLES_TOTAL] = resamples_total
    diag[DIAG_PHI_FINAL] = phi_new
    diag[DIAG_STEP_UNBOUNDED] = su_count
    diag[DIAG_POSITIVITY_LOST] = pl_count
    diag[DIAG_PHI_EXPLOSIONS] = pe_count
    diag[DIAG_DAMPED_STEPS] = damped
