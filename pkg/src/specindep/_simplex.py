"""Compiled profiled Whittle objective and a Nelder-Mead simplex search over it.

The objective is evaluated on the half grid j = 1..floor(n/2) with weight 2
(weight 1 at j = n/2), which equals the full-grid sum over j = 1..n-1 for a
real series because both the periodogram and the density are symmetric there.
"""
import numpy as np
from numba import njit

FARIMA_AR = 0
FARIMA_MA = 1
FAR = 2

D_SCALE = 0.49
COEF_SCALE = 0.99
STATIONARY_MARGIN = 1.01
LOG_2PI = np.log(2.0 * np.pi)


@njit(cache=True)
def _stationary(a, margin):
    p = a.shape[0]
    c = np.empty(p)
    scale = 1.0
    for j in range(p):
        scale *= margin
        c[j] = a[j] * scale
    for m in range(p, 0, -1):
        k = c[m - 1]
        if abs(k) >= 1.0:
            return False
        if m > 1:
            tmp = np.empty(m - 1)
            for j in range(m - 1):
                tmp[j] = (c[j] - k * c[m - 2 - j]) / (1.0 - k * k)
            for j in range(m - 1):
                c[j] = tmp[j]
    return True


@njit(cache=True)
def natural_params(z, kind):
    """Map unconstrained search coordinates onto model parameters."""
    out = z.copy()
    out[0] = D_SCALE * np.tanh(z[0])
    if kind != FAR and z.shape[0] > 1:
        out[1] = COEF_SCALE * np.tanh(z[1])
    return out


@njit(cache=True)
def log_density(theta, kind, logfrac, cos_tab, sin_tab):
    """log of the unit-variance density on the grid (``-inf`` marks an invalid model)."""
    m = logfrac.shape[0]
    out = np.empty(m)
    d = theta[0]
    for j in range(m):
        out[j] = -LOG_2PI - 2.0 * d * logfrac[j]
    if kind == FARIMA_AR:
        phi = theta[1]
        for j in range(m):
            out[j] -= np.log(1.0 - 2.0 * phi * cos_tab[0, j] + phi * phi)
    elif kind == FARIMA_MA:
        psi = theta[1]
        for j in range(m):
            out[j] += np.log(1.0 + 2.0 * psi * cos_tab[0, j] + psi * psi)
    else:
        p = theta.shape[0] - 1
        for j in range(m):
            re = 1.0
            im = 0.0
            for k in range(p):
                re += theta[k + 1] * cos_tab[k, j]
                im += theta[k + 1] * sin_tab[k, j]
            out[j] -= np.log(re * re + im * im)
    return out


@njit(cache=True)
def profiled_objective(theta, kind, pgram, weights, logfrac, cos_tab, sin_tab):
    """Return (Q, sigma2) for natural parameters ``theta``."""
    if kind == FAR and theta.shape[0] > 1:
        if not _stationary(theta[1:], STATIONARY_MARGIN):
            return np.inf, np.nan
    logf = log_density(theta, kind, logfrac, cos_tab, sin_tab)
    total = 0.0
    ratio = 0.0
    logsum = 0.0
    for j in range(pgram.shape[0]):
        total += weights[j]
        ratio += weights[j] * pgram[j] * np.exp(-logf[j])
        logsum += weights[j] * logf[j]
    sigma2 = ratio / total
    q = np.log(sigma2) + logsum / total
    if not np.isfinite(q):
        return np.inf, np.nan
    return q, sigma2


@njit(cache=True)
def _objective_z(z, kind, pgram, weights, logfrac, cos_tab, sin_tab):
    theta = natural_params(z, kind)
    return profiled_objective(theta, kind, pgram, weights, logfrac, cos_tab, sin_tab)[0]


@njit(cache=True)
def nelder_mead(z0, kind, pgram, weights, logfrac, cos_tab, sin_tab,
                step, xatol, fatol, maxiter):
    """Minimise the objective in search coordinates.

    Returns the best vertex, its value, the iteration count, a convergence
    flag and the history of best values (non-increasing by construction).
    """
    k = z0.shape[0]
    sim = np.empty((k + 1, k))
    fsim = np.empty(k + 1)
    sim[0] = z0
    fsim[0] = _objective_z(z0, kind, pgram, weights, logfrac, cos_tab, sin_tab)
    for i in range(k):
        v = z0.copy()
        v[i] += step
        sim[i + 1] = v
        fsim[i + 1] = _objective_z(v, kind, pgram, weights, logfrac, cos_tab, sin_tab)

    history = np.empty(maxiter + 1)
    it = 0
    converged = False
    while True:
        order = np.argsort(fsim, kind="mergesort")
        sim = sim[order]
        fsim = fsim[order]
        history[it] = fsim[0]

        xspread = 0.0
        fspread = 0.0
        for i in range(1, k + 1):
            fspread = max(fspread, abs(fsim[i] - fsim[0]))
            for c in range(k):
                xspread = max(xspread, abs(sim[i, c] - sim[0, c]))
        if np.isfinite(fsim[0]) and xspread <= xatol and fspread <= fatol:
            converged = True
            break
        if it >= maxiter:
            break
        it += 1

        centroid = np.zeros(k)
        for i in range(k):
            centroid += sim[i]
        centroid /= k

        xr = 2.0 * centroid - sim[k]
        fr = _objective_z(xr, kind, pgram, weights, logfrac, cos_tab, sin_tab)
        if fr < fsim[0]:
            xe = 3.0 * centroid - 2.0 * sim[k]
            fe = _objective_z(xe, kind, pgram, weights, logfrac, cos_tab, sin_tab)
            if fe < fr:
                sim[k] = xe
                fsim[k] = fe
            else:
                sim[k] = xr
                fsim[k] = fr
            continue
        if fr < fsim[k - 1]:
            sim[k] = xr
            fsim[k] = fr
            continue
        if fr < fsim[k]:
            xc = 1.5 * centroid - 0.5 * sim[k]
            fc = _objective_z(xc, kind, pgram, weights, logfrac, cos_tab, sin_tab)
            if fc <= fr:
                sim[k] = xc
                fsim[k] = fc
                continue
        else:
            xc = 0.5 * centroid + 0.5 * sim[k]
            fc = _objective_z(xc, kind, pgram, weights, logfrac, cos_tab, sin_tab)
            if fc < fsim[k]:
                sim[k] = xc
                fsim[k] = fc
                continue
        for i in range(1, k + 1):
            sim[i] = sim[0] + 0.5 * (sim[i] - sim[0])
            fsim[i] = _objective_z(sim[i], kind, pgram, weights, logfrac, cos_tab, sin_tab)

    return sim[0].copy(), fsim[0], it, converged, history[: it + 1].copy()
