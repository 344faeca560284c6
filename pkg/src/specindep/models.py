"""Parametric spectral densities for fractionally integrated models.

All densities use unit innovation variance::

    FARIMA(1,d,0):  (2 pi)^-1 |1 - e^{i l}|^{-2d} |1 - phi e^{i l}|^{-2}
    FARIMA(0,d,1):  (2 pi)^-1 |1 - e^{i l}|^{-2d} |1 + psi e^{i l}|^{2}
    FAR(p,d):       (2 pi)^-1 |1 - e^{i l}|^{-2d} |1 + sum_j a_j e^{i j l}|^{-2}
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .exceptions import SingularModelError

D_BOUND = 0.49
COEF_BOUND = 0.99


class FarimaVariant(str, enum.Enum):
    FARIMA_1_D_0 = "farima_1_d_0"
    FARIMA_0_D_1 = "farima_0_d_1"


@dataclass(frozen=True)
class FarimaParams:
    """FARIMA(1,d,0) (``coef`` is the AR coefficient phi) or FARIMA(0,d,1)
    (``coef`` is the MA coefficient psi)."""

    d: float
    coef: float = 0.0
    variant: FarimaVariant = FarimaVariant.FARIMA_1_D_0

    def __post_init__(self):
        object.__setattr__(self, "variant", FarimaVariant(self.variant))
        if not abs(self.d) < 0.5:
            raise ValueError(f"memory parameter must lie in (-1/2, 1/2), got {self.d}")
        if not abs(self.coef) < 1:
            raise ValueError(f"|coef| must be < 1, got {self.coef}")

    @property
    def phi(self) -> float | None:
        return self.coef if self.variant is FarimaVariant.FARIMA_1_D_0 else None

    @property
    def psi(self) -> float | None:
        return self.coef if self.variant is FarimaVariant.FARIMA_0_D_1 else None

    def density(self, lam):
        return farima_spectral_density(self, lam)

    def to_dict(self) -> dict:
        return {"model": self.variant.value, "d": self.d, "coef": self.coef}


@dataclass(frozen=True)
class FarParams:
    """FAR(p,d): AR polynomial ``1 + a_1 x + ... + a_p x^p``."""

    d: float
    a: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(float(v) for v in np.ravel(self.a)))
        if not abs(self.d) < 0.5:
            raise ValueError(f"memory parameter must lie in (-1/2, 1/2), got {self.d}")

    @property
    def p(self) -> int:
        return len(self.a)

    def density(self, lam):
        return far_spectral_density(self, lam)

    def to_dict(self) -> dict:
        return {"model": "far", "p": self.p, "d": self.d, "a": list(self.a)}


def frac_diff_coeffs(delta: float, m: int) -> np.ndarray:
    """Coefficients pi_0..pi_m of the expansion of (1 - B)^delta.

    >>> frac_diff_coeffs(0.4, 2)
    array([ 1.  , -0.4 , -0.12])
    """
    if m < 0:
        raise ValueError("m must be non-negative")
    ratios = (np.arange(m) - delta) / np.arange(1, m + 1)
    return np.concatenate(([1.0], np.cumprod(ratios)))


def _abs_one_minus_exp(lam, d):
    lam = np.asarray(lam, dtype=float)
    mod = np.abs(2.0 * np.sin(lam / 2.0))
    if d > 0 and np.any(mod == 0):
        raise SingularModelError("density has a pole at frequency zero")
    if d == 0:
        return np.ones_like(mod)
    with np.errstate(divide="ignore"):
        return mod ** (-2.0 * d)


def farima_spectral_density(params: FarimaParams, lam):
    """Unit-variance FARIMA(1,d,0) or FARIMA(0,d,1) spectral density at ``lam``."""
    lam = np.asarray(lam, dtype=float)
    frac = _abs_one_minus_exp(lam, params.d)
    e = np.exp(1j * lam)
    if params.variant is FarimaVariant.FARIMA_1_D_0:
        short = np.abs(1.0 - params.coef * e) ** -2.0
    else:
        short = np.abs(1.0 + params.coef * e) ** 2.0
    out = frac * short / (2 * np.pi)
    return float(out) if out.ndim == 0 else out


def far_spectral_density(params: FarParams, lam):
    """Unit-variance FAR(p,d) spectral density at ``lam``."""
    lam = np.asarray(lam, dtype=float)
    frac = _abs_one_minus_exp(lam, params.d)
    poly = np.ones(lam.shape, dtype=complex)
    for j, aj in enumerate(params.a, start=1):
        poly = poly + aj * np.exp(1j * j * lam)
    mod2 = np.abs(poly) ** 2
    if np.any(mod2 == 0):
        raise SingularModelError("AR polynomial vanishes on the unit circle")
    out = frac / mod2 / (2 * np.pi)
    return float(out) if out.ndim == 0 else out


def is_stationary(a, margin: float = 1.0) -> bool:
    """True when ``1 + sum_j a_j x^j`` has no zero in ``|x| <= margin``.

    Uses the step-down (Schur-Cohn) recursion on the rescaled polynomial.
    """
    c = np.asarray(a, dtype=float) * margin ** np.arange(1, len(a) + 1)
    c = c.copy()
    for m in range(len(c), 0, -1):
        k = c[m - 1]
        if abs(k) >= 1.0:
            return False
        if m > 1:
            head = c[: m - 1]
            c[: m - 1] = (head - k * head[::-1]) / (1.0 - k * k)
    return True
