"""Numba kernels for the Markov chain sweep.

All latent state lives in flat numpy arrays that the kernels mutate in
place.  Observation models are dispatched on an integer code:

    0 flat (no data term)      3 gaussian scale shifts
    1 gaussian mean shifts     4 first-order autoregression
    2 poisson counts (log link) 5 grouped linear regression

Gaussian-linear kinds (1, 4, 5) share per-observation response/design
arrays with CSR offsets per state; the count and scale kinds keep
per-state caches (``exp(theta)`` and squared weighted residuals).

Scalar parameters are packed as ``scalars = [alpha, baseline, intercept,
sigma2, mu]``; acceptance counters as ``acc = [birth_acc, birth_tot,
death_acc, death_tot, height_acc, height_tot, loc_acc, loc_tot,
baseline_acc, baseline_tot]``.
"""

import math

import numpy as np
from numba import njit

FLAT, GAUSS_MEAN, POISSON, GAUSS_SCALE, AR1, LINREG = 0, 1, 2, 3, 4, 5
SLAB_CAUCHY, SLAB_LAPLACE = 0, 1
I_ALPHA, I_BASE, I_COEF, I_SIG2, I_MU = 0, 1, 2, 3, 4

_LOG_PI = math.log(math.pi)
_MAX_EXP = 690.0

# acceptance-counter slots
A_BIRTH, A_BIRTH_T, A_DEATH, A_DEATH_T = 0, 1, 2, 3
A_HRW, A_HRW_T, A_LOC, A_LOC_T, A_BASE, A_BASE_T = 4, 5, 6, 7, 8, 9


@njit(cache=True)
def seed_rng(seed):
    np.random.seed(seed)


@njit(cache=True)
def reflect(x, lo, hi):
    """Fold a real proposal back into [lo, hi] by reflection at the bounds."""
    width = hi - lo
    y = (x - lo) % (2.0 * width)
    if y < 0.0:
        y += 2.0 * width
    if y > width:
        y = 2.0 * width - y
    return lo + y


@njit(cache=True)
def _slab_logpdf(slab_code, lam, x):
    if slab_code == SLAB_CAUCHY:
        return -_LOG_PI - math.log1p(x * x)
    return math.log(0.5 * lam) - lam * abs(x)


@njit(cache=True)
def _slab_sample(slab_code, lam):
    if slab_code == SLAB_CAUCHY:
        return np.random.standard_cauchy()
    return np.random.laplace(0.0, 1.0 / lam)


@njit(cache=True)
def delta_loglik(kind, lo, hi, delta,
                 theta, resid, eng_x, obs_start, y_state, ey, w, sigma2):
    """Log-likelihood change if ``theta[lo:hi] += delta`` (state caches fixed)."""
    if kind == FLAT or lo >= hi or delta == 0.0:
        return 0.0
    if kind == GAUSS_MEAN or kind == AR1 or kind == LINREG:
        s1 = 0.0
        s2 = 0.0
        for j in range(obs_start[lo], obs_start[hi]):
            s1 += resid[j] * eng_x[j]
            s2 += eng_x[j] * eng_x[j]
        return (delta * s1 - 0.5 * delta * delta * s2) / sigma2
    if kind == POISSON:
        sy = 0.0
        se = 0.0
        for i in range(lo, hi):
            if theta[i] + delta > _MAX_EXP:
                return -np.inf
            sy += y_state[i]
            se += ey[i]
        return delta * sy - math.expm1(delta) * se
    # GAUSS_SCALE
    sw = 0.0
    for i in range(lo, hi):
        if theta[i] + delta < -_MAX_EXP:
            return -np.inf
        sw += w[i]
    return -0.5 * ((hi - lo) * delta + math.expm1(-delta) * sw)


@njit(cache=True)
def apply_shift(kind, lo, hi, delta, theta, resid, eng_x, obs_start, ey, w):
    for i in range(lo, hi):
        theta[i] += delta
    if kind == GAUSS_MEAN or kind == AR1 or kind == LINREG:
        for j in range(obs_start[lo], obs_start[hi]):
            resid[j] -= delta * eng_x[j]
    elif kind == POISSON:
        f = math.exp(delta)
        for i in range(lo, hi):
            ey[i] *= f
    elif kind == GAUSS_SCALE:
        f = math.exp(-delta)
        for i in range(lo, hi):
            w[i] *= f


@njit(cache=True)
def rebuild_theta(theta, baseline, h, z, first):
    """Recompute the step values exactly from the atoms, cancelling the
    float drift of incremental shifts."""
    n = theta.size
    bumps = np.zeros(n)
    for l in range(h.size):
        if z[l] == 1 and first[l] < n:
            bumps[first[l]] += h[l]
    run = baseline
    for i in range(n):
        run += bumps[i]
        theta[i] = run


@njit(cache=True)
def rebuild_caches(kind, theta, scalars, eng_y, eng_x, obs_start, y_state,
                   resid, ey, w):
    """Recompute data caches from theta, cancelling incremental float drift."""
    n = theta.size
    if kind == GAUSS_MEAN or kind == AR1 or kind == LINREG:
        c = scalars[I_COEF]
        for i in range(n):
            for j in range(obs_start[i], obs_start[i + 1]):
                resid[j] = eng_y[j] - c - theta[i] * eng_x[j]
    elif kind == POISSON:
        for i in range(n):
            t = theta[i]
            ey[i] = math.exp(t) if t < _MAX_EXP else math.inf
    elif kind == GAUSS_SCALE:
        mu = scalars[I_MU]
        for i in range(n):
            d = y_state[i] - mu
            w[i] = d * d * math.exp(-theta[i])


@njit(cache=True)
def stick_logf(j, p, sticks, z, alpha):
    """Unnormalised log full conditional of stick ``j`` evaluated at ``p``."""
    L = sticks.size
    c = 1.0
    for m in range(j):
        c *= sticks[m]
    n_active = 0
    lf = 0.0
    for l in range(j, L):
        if l > j:
            c *= sticks[l]
        if z[l] == 1:
            n_active += 1
        else:
            lf += math.log1p(-c * p)
    return (alpha - 1.0 + n_active) * math.log(p) + lf


@njit(cache=True)
def _stick_log_residual(j, p, sticks, z):
    """Log of the excluded-atom factors of stick ``j``'s conditional at ``p``."""
    L = sticks.size
    c = 1.0
    for m in range(j):
        c *= sticks[m]
    lf = 0.0
    for l in range(j, L):
        if l > j:
            c *= sticks[l]
        if z[l] == 0:
            lf += math.log1p(-c * p)
    return lf


@njit(cache=True)
def update_sticks_inplace(sticks, z, alpha):
    """One systematic scan over all sticks.

    Each stick alternates at random between shrinkage slice sampling and an
    independence proposal from the Beta factor of its conditional; the
    independence move crosses orders of magnitude in one step, which the
    slice walk cannot when the concentration is very small.
    """
    L = sticks.size
    for j in range(L):
        p0 = sticks[j]
        if np.random.random() < 0.5:
            # independence proposal: Beta(alpha + active count, 1) exactly
            n_active = 0
            for l in range(j, L):
                n_active += z[l]
            shape = max(alpha + n_active, 1e-300)
            p1 = math.exp(math.log(np.random.random()) / shape)
            p1 = min(max(p1, 1e-300), 1.0 - 1e-12)
            log_acc = (_stick_log_residual(j, p1, sticks, z)
                       - _stick_log_residual(j, p0, sticks, z))
            if math.log(np.random.random()) < log_acc:
                sticks[j] = p1
            continue
        log_level = stick_logf(j, p0, sticks, z, alpha) + math.log(np.random.random())
        lo = 0.0
        hi = 1.0
        for _ in range(200):
            p1 = lo + np.random.random() * (hi - lo)
            if p1 <= 0.0 or p1 >= 1.0:
                continue
            if stick_logf(j, p1, sticks, z, alpha) >= log_level:
                sticks[j] = min(max(p1, 1e-300), 1.0 - 1e-12)
                break
            if p1 < p0:
                lo = p1
            else:
                hi = p1


@njit(cache=True)
def draw_alpha(sticks, a, b):
    """Exact Gamma full conditional of the concentration given the sticks."""
    s = 0.0
    for j in range(sticks.size):
        s += math.log(sticks[j])
    rate = 1.0 / b - s
    return np.random.gamma(a + sticks.size, 1.0 / rate)


@njit(cache=True)
def block_alpha_sticks(sticks, z, alpha, a, b):
    """Independence move regenerating concentration and sticks jointly.

    Proposes the whole block from its prior, so the acceptance ratio reduces
    to the indicators' Bernoulli likelihood under new versus old inclusion
    weights.  The single-site Gibbs pair mixes across magnitudes of the
    concentration only by a slow log-scale walk; this move crosses in one
    step whenever few atoms are active.  Returns the (possibly unchanged)
    concentration.
    """
    L = sticks.size
    alpha_new = max(np.random.gamma(a, b), 1e-300)
    log_acc = 0.0
    eta_old = 1.0
    eta_new = 1.0
    prop = np.empty(L)
    for j in range(L):
        p = math.exp(math.log(np.random.random()) / alpha_new)
        prop[j] = min(max(p, 1e-300), 1.0 - 1e-12)
        eta_old *= sticks[j]
        eta_new *= prop[j]
        if z[j] == 1:
            if eta_new <= 0.0:
                return alpha
            log_acc += math.log(eta_new) - math.log(max(eta_old, 1e-300))
        else:
            log_acc += math.log1p(-eta_new) - math.log1p(-eta_old)
    if math.log(np.random.random()) < log_acc:
        for j in range(L):
            sticks[j] = prop[j]
        return alpha_new
    return alpha


_INFORMED_WEIGHT = 0.8  # rest of the birth-proposal mass stays on the slab


@njit(cache=True)
def _suffix_stats(kind, lo, theta, resid, eng_x, obs_start, y_state, ey, w):
    """Sufficient statistics of the log-likelihood as a function of a common
    shift on ``theta[lo:]``; the third slot carries the overflow guard."""
    n = theta.size
    s1 = 0.0
    s2 = 0.0
    guard = 0.0
    if kind == GAUSS_MEAN or kind == AR1 or kind == LINREG:
        for j in range(obs_start[lo], obs_start[n]):
            s1 += resid[j] * eng_x[j]
            s2 += eng_x[j] * eng_x[j]
    elif kind == POISSON:
        guard = -np.inf
        for i in range(lo, n):
            s1 += y_state[i]
            s2 += ey[i]
            if theta[i] > guard:
                guard = theta[i]
    elif kind == GAUSS_SCALE:
        guard = np.inf
        s1 = n - lo
        for i in range(lo, n):
            s2 += w[i]
            if theta[i] < guard:
                guard = theta[i]
    return s1, s2, guard


@njit(cache=True)
def _dll_from_stats(kind, s1, s2, guard, sigma2, delta):
    if kind == FLAT:
        return 0.0
    if kind == GAUSS_MEAN or kind == AR1 or kind == LINREG:
        return (delta * s1 - 0.5 * delta * delta * s2) / sigma2
    if kind == POISSON:
        if guard + delta > _MAX_EXP:
            return -np.inf
        return delta * s1 - math.expm1(delta) * s2
    if guard + delta < -_MAX_EXP:
        return -np.inf
    return -0.5 * (s1 * delta + math.expm1(-delta) * s2)


@njit(cache=True)
def _informed_mean_sd(kind, s1, s2, sigma2):
    """Local Gaussian approximation of the height conditional.

    Returns ``(mean, sd, ok)``; ``ok`` falls back to the plain slab proposal
    when the data carry no curvature for this move.
    """
    if kind == GAUSS_MEAN or kind == AR1 or kind == LINREG:
        if s2 > 0.0:
            return s1 / s2, math.sqrt(sigma2 / s2), True
    elif kind == POISSON:
        if s1 > 0.0 and s2 > 0.0:
            return math.log(s1 / s2), math.sqrt(1.0 / s1), True
    elif kind == GAUSS_SCALE:
        if s1 > 0.0 and s2 > 0.0:
            return math.log(s2 / s1), math.sqrt(2.0 / s1), True
    return 0.0, 1.0, False


@njit(cache=True)
def _mix_logpdf(slab_code, slab_lam, mean, sd, x):
    lp_slab = _slab_logpdf(slab_code, slab_lam, x)
    zz = (x - mean) / sd
    lp_norm = -0.5 * zz * zz - math.log(sd) - 0.9189385332046727
    hi = max(lp_norm, lp_slab)
    return hi + math.log(_INFORMED_WEIGHT * math.exp(lp_norm - hi)
                         + (1.0 - _INFORMED_WEIGHT) * math.exp(lp_slab - hi))


@njit(cache=True)
def rj_heights_inplace(kind, slab_code, slab_lam,
                       xi, h, z, first, sticks,
                       theta, resid, eng_x, obs_start, y_state, ey, w,
                       sigma2, h_scale, acc, adapt, adapt_step):
    """Birth/death toggles plus random-walk refreshes for the jump heights.

    Births drawn from a mixture of the slab and a data-informed normal
    (the local Gaussian approximation of the height conditional), with the
    matching Hastings correction; without data the proposal reduces to the
    slab and the ratio to prior odds alone.  Refreshes use a normal random
    walk whose scale is adapted towards 44% acceptance during burn-in only.
    """
    n = theta.size
    L = xi.size
    eta = 1.0
    for l in range(L):
        eta *= sticks[l]
        log_odds = math.log(eta) - math.log1p(-eta)
        s1, s2, guard = _suffix_stats(kind, first[l], theta, resid, eng_x,
                                      obs_start, y_state, ey, w)
        if z[l] == 0:
            mean, sd, informed = _informed_mean_sd(kind, s1, s2, sigma2)
            if informed:
                if np.random.random() < _INFORMED_WEIGHT:
                    hp = mean + np.random.normal() * sd
                else:
                    hp = _slab_sample(slab_code, slab_lam)
                log_q = _mix_logpdf(slab_code, slab_lam, mean, sd, hp)
            else:
                hp = _slab_sample(slab_code, slab_lam)
                log_q = _slab_logpdf(slab_code, slab_lam, hp)
            dll = _dll_from_stats(kind, s1, s2, guard, sigma2, hp)
            log_acc = (log_odds + dll
                       + _slab_logpdf(slab_code, slab_lam, hp) - log_q)
            acc[A_BIRTH_T] += 1
            if math.log(np.random.random()) < log_acc:
                apply_shift(kind, first[l], n, hp, theta, resid, eng_x, obs_start, ey, w)
                z[l] = 1
                h[l] = hp
                acc[A_BIRTH] += 1
        else:
            dll = _dll_from_stats(kind, s1, s2, guard, sigma2, -h[l])
            # reverse-birth proposal density, evaluated in the no-atom state
            if kind == POISSON:
                mean, sd, informed = _informed_mean_sd(kind, s1,
                                                       s2 * math.exp(-h[l]), sigma2)
            elif kind == GAUSS_SCALE:
                mean, sd, informed = _informed_mean_sd(kind, s1,
                                                       s2 * math.exp(h[l]), sigma2)
            else:
                mean, sd, informed = _informed_mean_sd(kind, s1 + h[l] * s2, s2,
                                                       sigma2)
            if informed:
                log_q = _mix_logpdf(slab_code, slab_lam, mean, sd, h[l])
            else:
                log_q = _slab_logpdf(slab_code, slab_lam, h[l])
            log_acc = (-log_odds + dll
                       + log_q - _slab_logpdf(slab_code, slab_lam, h[l]))
            acc[A_DEATH_T] += 1
            if math.log(np.random.random()) < log_acc:
                apply_shift(kind, first[l], n, -h[l], theta, resid, eng_x, obs_start, ey, w)
                z[l] = 0
                h[l] = 0.0
                acc[A_DEATH] += 1
        if z[l] == 1:
            step = np.random.normal() * h_scale[l]
            h_new = h[l] + step
            dll = delta_loglik(kind, first[l], n, step,
                               theta, resid, eng_x, obs_start, y_state, ey, w, sigma2)
            log_acc = (_slab_logpdf(slab_code, slab_lam, h_new)
                       - _slab_logpdf(slab_code, slab_lam, h[l]) + dll)
            acc[A_HRW_T] += 1
            a_prob = math.exp(min(log_acc, 0.0)) if log_acc == log_acc else 0.0
            if np.random.random() < a_prob:
                apply_shift(kind, first[l], n, step, theta, resid, eng_x, obs_start, ey, w)
                h[l] = h_new
                acc[A_HRW] += 1
            if adapt:
                h_scale[l] *= math.exp(adapt_step * (a_prob - 0.44))
                h_scale[l] = min(max(h_scale[l], 1e-4), 1e4)


@njit(cache=True)
def mh_locations_inplace(kind, state_vals, xi, h, z, first,
                         theta, resid, eng_x, obs_start, y_state, ey, w,
                         sigma2, loc_scale, acc, adapt, adapt_step):
    """Location moves with reflection at the domain bounds.

    Excluded atoms carry no likelihood and are refreshed from their uniform
    prior.  Active atoms mix a local random walk with occasional uniform
    independence proposals (both symmetric under the uniform location
    prior), accepting with the likelihood ratio of shifting their jump
    between the affected states; the independence component lets redundant
    atoms relocate across the series in one move.
    """
    n = theta.size
    domain = state_vals[n - 1]
    for l in range(xi.size):
        if z[l] == 0:
            xi[l] = np.random.uniform(0.0, domain)
            first[l] = np.searchsorted(state_vals, xi[l])
            continue
        teleport = np.random.random() < 0.1
        if teleport:
            prop = np.random.uniform(0.0, domain)
        else:
            prop = reflect(xi[l] + np.random.normal() * loc_scale[l], 0.0, domain)
        k_new = np.searchsorted(state_vals, prop)
        k_old = first[l]
        acc[A_LOC_T] += 1
        if k_new == k_old:
            xi[l] = prop
            acc[A_LOC] += 1
            a_prob = 1.0
        else:
            if k_new < k_old:
                dll = delta_loglik(kind, k_new, k_old, h[l],
                                   theta, resid, eng_x, obs_start, y_state, ey, w, sigma2)
            else:
                dll = delta_loglik(kind, k_old, k_new, -h[l],
                                   theta, resid, eng_x, obs_start, y_state, ey, w, sigma2)
            a_prob = math.exp(min(dll, 0.0)) if dll == dll else 0.0
            if np.random.random() < a_prob:
                if k_new < k_old:
                    apply_shift(kind, k_new, k_old, h[l],
                                theta, resid, eng_x, obs_start, ey, w)
                else:
                    apply_shift(kind, k_old, k_new, -h[l],
                                theta, resid, eng_x, obs_start, ey, w)
                xi[l] = prop
                first[l] = k_new
                acc[A_LOC] += 1
        if adapt and not teleport:
            loc_scale[l] *= math.exp(adapt_step * (a_prob - 0.44))
            loc_scale[l] = min(max(loc_scale[l], 0.1), 4.0 * domain)


@njit(cache=True)
def update_nuisance_inplace(kind, scalars, theta, resid, eng_x, obs_start,
                            y_state, w, sig2_shape, sig2_scale, coef_sd):
    """Conjugate resampling of the scenario nuisance block."""
    n = theta.size
    if kind == GAUSS_MEAN or kind == AR1 or kind == LINREG:
        m = obs_start[n]
        if kind != GAUSS_MEAN:
            # intercept: conjugate normal on residuals with unit design
            c = scalars[I_COEF]
            s = 0.0
            for j in range(m):
                s += resid[j] + c
            prec = m / scalars[I_SIG2] + 1.0 / (coef_sd * coef_sd)
            mean = (s / scalars[I_SIG2]) / prec
            c_new = mean + np.random.normal() / math.sqrt(prec)
            for j in range(m):
                resid[j] -= c_new - c
            scalars[I_COEF] = c_new
        ssr = 0.0
        for j in range(m):
            ssr += resid[j] * resid[j]
        scalars[I_SIG2] = (sig2_scale + 0.5 * ssr) / np.random.gamma(
            sig2_shape + 0.5 * m, 1.0)
    elif kind == GAUSS_SCALE:
        s0 = 0.0
        s1 = 0.0
        for i in range(n):
            emt = math.exp(-theta[i])
            s0 += emt
            s1 += y_state[i] * emt
        prec = s0 + 1.0 / (coef_sd * coef_sd)
        mu_new = s1 / prec + np.random.normal() / math.sqrt(prec)
        scalars[I_MU] = mu_new
        for i in range(n):
            d = y_state[i] - mu_new
            w[i] = d * d * math.exp(-theta[i])


@njit(cache=True)
def update_baseline_inplace(kind, scalars, theta, resid, eng_x, obs_start,
                            y_state, ey, w, base_sd, base_scale, acc,
                            adapt, adapt_step):
    """Resample the pre-change level of the step function.

    Gaussian-linear kinds admit a conjugate normal draw; the count and
    scale kinds use an adapted random walk against the normal prior.
    """
    n = theta.size
    g = scalars[I_BASE]
    if kind == GAUSS_MEAN or kind == AR1 or kind == LINREG:
        m = obs_start[n]
        sxx = 0.0
        srx = 0.0
        for j in range(m):
            sxx += eng_x[j] * eng_x[j]
            srx += resid[j] * eng_x[j]
        prec = sxx / scalars[I_SIG2] + 1.0 / (base_sd * base_sd)
        mean = ((srx + g * sxx) / scalars[I_SIG2]) / prec
        g_new = mean + np.random.normal() / math.sqrt(prec)
        delta = g_new - g
        for i in range(n):
            theta[i] += delta
        for j in range(m):
            resid[j] -= delta * eng_x[j]
        scalars[I_BASE] = g_new
    elif kind == FLAT:
        g_new = np.random.normal() * base_sd
        delta = g_new - g
        for i in range(n):
            theta[i] += delta
        scalars[I_BASE] = g_new
    else:
        step = np.random.normal() * base_scale[0]
        g_new = g + step
        dll = delta_loglik(kind, 0, n, step, theta, resid, eng_x, obs_start,
                           y_state, ey, w, scalars[I_SIG2])
        log_acc = dll - 0.5 * (g_new * g_new - g * g) / (base_sd * base_sd)
        acc[A_BASE_T] += 1
        a_prob = math.exp(min(log_acc, 0.0)) if log_acc == log_acc else 0.0
        if np.random.random() < a_prob:
            apply_shift(kind, 0, n, step, theta, resid, eng_x, obs_start, ey, w)
            scalars[I_BASE] = g_new
            acc[A_BASE] += 1
        if adapt:
            base_scale[0] *= math.exp(adapt_step * (a_prob - 0.44))
            base_scale[0] = min(max(base_scale[0], 1e-6), 1e4)


@njit(cache=True)
def _state_finite(theta, scalars):
    s = scalars[I_ALPHA] + scalars[I_BASE] + scalars[I_COEF] + scalars[I_SIG2]
    for i in range(theta.size):
        s += theta[i]
    return math.isfinite(s) and scalars[I_SIG2] > 0.0 and scalars[I_ALPHA] > 0.0


@njit(cache=True)
def one_sweep(kind, slab_code, slab_lam, state_vals,
              eng_y, eng_x, obs_start, y_state,
              theta, resid, ey, w,
              xi, h, z, first, sticks, scalars,
              h_scale, loc_scale, base_scale, acc,
              a, b, sig2_shape, sig2_scale, coef_sd, base_sd,
              adapt, adapt_step):
    """One full systematic sweep over all latent blocks.

    Returns 0 on success or the 1-based index of the phase that produced a
    non-finite state.
    """
    update_sticks_inplace(sticks, z, scalars[I_ALPHA])
    scalars[I_ALPHA] = draw_alpha(sticks, a, b)
    scalars[I_ALPHA] = block_alpha_sticks(sticks, z, scalars[I_ALPHA], a, b)
    if not _state_finite(theta, scalars):
        return 2
    rj_heights_inplace(kind, slab_code, slab_lam, xi, h, z, first, sticks,
                       theta, resid, eng_x, obs_start, y_state, ey, w,
                       scalars[I_SIG2], h_scale, acc, adapt, adapt_step)
    if not _state_finite(theta, scalars):
        return 3
    mh_locations_inplace(kind, state_vals, xi, h, z, first,
                         theta, resid, eng_x, obs_start, y_state, ey, w,
                         scalars[I_SIG2], loc_scale, acc, adapt, adapt_step)
    if not _state_finite(theta, scalars):
        return 4
    update_nuisance_inplace(kind, scalars, theta, resid, eng_x, obs_start,
                            y_state, w, sig2_shape, sig2_scale, coef_sd)
    if not _state_finite(theta, scalars):
        return 5
    update_baseline_inplace(kind, scalars, theta, resid, eng_x, obs_start,
                            y_state, ey, w, base_sd, base_scale, acc,
                            adapt, adapt_step)
    if not _state_finite(theta, scalars):
        return 6
    rebuild_theta(theta, scalars[I_BASE], h, z, first)
    rebuild_caches(kind, theta, scalars, eng_y, eng_x, obs_start, y_state,
                   resid, ey, w)
    return 0


@njit(cache=True)
def run_chain_kernel(seed, iterations, burn_in, thinning,
                     kind, slab_code, slab_lam, state_vals,
                     eng_y, eng_x, obs_start, y_state,
                     theta, resid, ey, w,
                     xi, h, z, first, sticks, scalars,
                     h_scale, loc_scale, base_scale, acc,
                     a, b, sig2_shape, sig2_scale, coef_sd, base_sd,
                     out_theta, out_alpha, out_nact, out_scalars):
    """Run a full chain, recording thinned post-burn-in draws.

    Returns ``(phase_code, iteration, retained)``; phase_code 0 means the
    chain finished cleanly.
    """
    np.random.seed(seed)
    r = 0
    for it in range(1, iterations + 1):
        adapt = it <= burn_in
        adapt_step = 2.0 / (10.0 + it) ** 0.6
        code = one_sweep(kind, slab_code, slab_lam, state_vals,
                         eng_y, eng_x, obs_start, y_state,
                         theta, resid, ey, w,
                         xi, h, z, first, sticks, scalars,
                         h_scale, loc_scale, base_scale, acc,
                         a, b, sig2_shape, sig2_scale, coef_sd, base_sd,
                         adapt, adapt_step)
        if code != 0:
            return code, it, r
        if it > burn_in and (it - burn_in) % thinning == 0:
            for i in range(theta.size):
                out_theta[r, i] = theta[i]
            out_alpha[r] = scalars[I_ALPHA]
            n_act = 0
            for l in range(z.size):
                n_act += z[l]
            out_nact[r] = n_act
            out_scalars[r, 0] = scalars[I_BASE]
            out_scalars[r, 1] = scalars[I_COEF]
            out_scalars[r, 2] = scalars[I_SIG2]
            out_scalars[r, 3] = scalars[I_MU]
            r += 1
    return 0, iterations, r
