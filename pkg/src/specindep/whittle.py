"""Whittle pseudo-maximum-likelihood fits of FARIMA and FAR(p,d) models.

The innovation variance is profiled out, so only the shape parameters are
searched::

    Q(theta) = log sigma2(theta) + mean_j log f*(lambda_j; theta),
    sigma2(theta) = mean_j I(lambda_j) / f*(lambda_j; theta),

with j = 1..n-1 and f* the unit-variance density.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from . import _simplex
from .exceptions import DegenerateInputError
from .models import (
    FarimaParams,
    FarimaVariant,
    FarParams,
    far_spectral_density,
    farima_spectral_density,
)
from .spectral import as_series, dft, fourier_frequencies

START_D = (-0.25, 0.0, 0.25)
XATOL = 1e-8
FATOL = 1e-12
SIMPLEX_STEP = 0.1


@dataclass(frozen=True)
class WhittleFit:
    params: FarimaParams | FarParams
    sigma2: float
    objective: float
    converged: bool
    iterations: int
    history: np.ndarray = field(repr=False, compare=False, default=None)

    def density(self, lam):
        """Fitted unit-variance spectral density."""
        return self.params.density(lam)

    def to_dict(self) -> dict:
        out = self.params.to_dict()
        out.update(sigma2=self.sigma2, objective=self.objective,
                   converged=self.converged, iterations=self.iterations)
        return out


def periodogram(series) -> np.ndarray:
    """Auto-periodogram I(lambda_j), j = 0..n-1."""
    return np.abs(dft(series)) ** 2


class _Grid:
    """Half-grid tables consumed by the compiled objective."""

    def __init__(self, pgram: np.ndarray, p: int):
        n = pgram.size
        half = np.arange(1, n // 2 + 1)
        lam = fourier_frequencies(n)[half]
        weights = np.full(half.size, 2.0)
        if n % 2 == 0:
            weights[-1] = 1.0
        self.n = n
        self.scale = float(np.mean(pgram[1:]))
        self.pgram = pgram[half] / self.scale
        self.weights = weights
        self.logfrac = np.log(2.0 * np.sin(lam / 2.0))
        k = np.arange(1, max(p, 1) + 1)[:, None]
        self.cos_tab = np.ascontiguousarray(np.cos(k * lam))
        self.sin_tab = np.ascontiguousarray(np.sin(k * lam))

    def args(self, kind):
        return (kind, self.pgram, self.weights, self.logfrac, self.cos_tab, self.sin_tab)


def _search(grid: _Grid, kind: int, n_shape: int, maxiter: int):
    best = None
    for d0 in START_D:
        z0 = np.zeros(n_shape)
        z0[0] = math.atanh(d0 / _simplex.D_SCALE)
        z, fval, nit, conv, hist = _simplex.nelder_mead(
            z0, *grid.args(kind), SIMPLEX_STEP, XATOL, FATOL, maxiter)
        # a fresh simplex at the optimum guards against premature collapse
        z2, fval2, nit2, conv2, hist2 = _simplex.nelder_mead(
            z, *grid.args(kind), SIMPLEX_STEP, XATOL, FATOL, maxiter)
        if fval2 <= fval:
            z, fval, conv = z2, fval2, conv2
            hist = np.concatenate((hist, np.minimum(hist2, hist[-1])))
        nit += nit2
        if best is None or fval < best[1]:
            best = (z, fval, nit, conv, hist)
    z, fval, nit, conv, hist = best
    theta = _simplex.natural_params(z, kind)
    _, sigma2 = _simplex.profiled_objective(theta, *grid.args(kind))
    # undo the periodogram normalisation
    return theta, float(fval + math.log(grid.scale)), float(sigma2 * grid.scale), nit, conv, hist


def _check_fit_series(series, min_length: int) -> np.ndarray:
    x = as_series(series, "series", min_length)
    if not np.any(periodogram(x)[1:] > 0):
        raise DegenerateInputError("series is constant")
    return x


def fit_whittle_farima(series, variant=FarimaVariant.FARIMA_1_D_0, *,
                       maxiter: int = 2000) -> WhittleFit:
    """Whittle fit of FARIMA(1,d,0) or FARIMA(0,d,1) over |d| <= 0.49, |coef| <= 0.99."""
    variant = FarimaVariant(variant)
    x = _check_fit_series(series, 32)
    kind = _simplex.FARIMA_AR if variant is FarimaVariant.FARIMA_1_D_0 else _simplex.FARIMA_MA
    grid = _Grid(periodogram(x), 1)
    theta, q, sigma2, nit, conv, hist = _search(grid, kind, 2, maxiter)
    params = FarimaParams(float(theta[0]), float(theta[1]), variant)
    return WhittleFit(params, sigma2, q, bool(conv), int(nit), hist + math.log(grid.scale))


def fit_whittle_far(series, p: int, *, maxiter: int = 4000) -> WhittleFit:
    """Whittle fit of FAR(p,d); AR polynomials with a zero in |x| <= 1.01 are rejected."""
    x = _check_fit_series(series, 32)
    if p < 0 or p + 1 >= x.size / 4:
        raise ValueError(f"order p={p} needs p + 1 < n/4 (n={x.size})")
    grid = _Grid(periodogram(x), p)
    theta, q, sigma2, nit, conv, hist = _search(grid, _simplex.FAR, p + 1, maxiter)
    params = FarParams(float(theta[0]), tuple(theta[1:]))
    return WhittleFit(params, sigma2, q, bool(conv), int(nit), hist + math.log(grid.scale))


def choose_far_order(n: int) -> int:
    """AR order for the FAR(p,d) working model: 3 at n=64, 5 at n=128, else round(1.2 log n)."""
    if n < 32:
        raise ValueError("n must be at least 32")
    return {64: 3, 128: 5}.get(n, int(round(1.2 * math.log(n))))


def whittle_objective(model, shape_params, pgram) -> float:
    """Profiled Whittle objective evaluated on the full grid j = 1..n-1.

    Parameters
    ----------
    model : {"farima_1_d_0", "farima_0_d_1", "far"}
    shape_params : sequence
        ``(d, coef)`` for the FARIMA variants, ``(d, a_1, ..., a_p)`` for FAR.
    pgram : array_like
        Periodogram at lambda_j for j = 0..n-1 (entry 0 is ignored).
    """
    pgram = np.asarray(pgram, dtype=float)
    n = pgram.size
    lam = fourier_frequencies(n)[1:]
    shape_params = list(shape_params)
    if model == "far":
        params = FarParams(shape_params[0], tuple(shape_params[1:]))
        fstar = far_spectral_density(params, lam)
    else:
        params = FarimaParams(shape_params[0], shape_params[1], FarimaVariant(model))
        fstar = farima_spectral_density(params, lam)
    if not np.all(np.isfinite(fstar)) or np.any(fstar <= 0):
        return math.inf
    sigma2 = np.mean(pgram[1:] / fstar)
    return float(np.log(sigma2) + np.mean(np.log(fstar)))


class WhittleFARIMA(BaseEstimator):
    """Whittle estimator for FARIMA(1,d,0) / FARIMA(0,d,1) models.

    Parameters
    ----------
    variant : {"farima_1_d_0", "farima_0_d_1"}
    maxiter : int
        Iteration cap for each simplex search.

    Attributes
    ----------
    params_ : FarimaParams
    sigma2_ : float
    objective_ : float
    converged_ : bool
    n_iter_ : int
    """

    def __init__(self, variant="farima_1_d_0", maxiter=2000):
        self.variant = variant
        self.maxiter = maxiter

    def fit(self, X, y=None):
        res = fit_whittle_farima(np.ravel(X), self.variant, maxiter=self.maxiter)
        self._store(res)
        return self

    def _store(self, res: WhittleFit):
        self.fit_ = res
        self.params_ = res.params
        self.d_ = res.params.d
        self.sigma2_ = res.sigma2
        self.objective_ = res.objective
        self.converged_ = res.converged
        self.n_iter_ = res.iterations

    def spectral_density(self, lam):
        """Fitted density including the estimated innovation variance."""
        check_is_fitted(self, "fit_")
        return self.sigma2_ * self.params_.density(lam)

    def transform(self, X):
        """Periodogram of ``X`` divided by the fitted density, j = 1..n-1."""
        check_is_fitted(self, "fit_")
        x = as_series(np.ravel(X))
        lam = fourier_frequencies(x.size)[1:]
        return periodogram(x)[1:] / self.spectral_density(lam)


class WhittleFAR(WhittleFARIMA):
    """Whittle estimator for FAR(p,d) models; ``p=None`` picks the order from n."""

    def __init__(self, p=None, maxiter=4000):
        self.p = p
        self.maxiter = maxiter

    def fit(self, X, y=None):
        x = np.ravel(X)
        p = choose_far_order(x.size) if self.p is None else self.p
        self._store(fit_whittle_far(x, p, maxiter=self.maxiter))
        self.order_ = p
        return self
