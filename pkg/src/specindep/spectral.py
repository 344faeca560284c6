"""Fourier-frequency DFTs, periodograms, lag-window kernels and spectral windows.

All transforms use the normalisation

    w(lambda_j) = (2 pi n)^(-1/2) sum_{t=1}^{n} z_t exp(i t lambda_j),

with lambda_j = 2 pi j / n and the time index starting at one.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .exceptions import ConfigurationError, InvalidInputError

MIN_LENGTH = 8


class Kernel(str, enum.Enum):
    """Compactly supported lag-window kernels with K(0) = 1."""

    BARTLETT = "bartlett"
    TUKEY = "tukey"
    PARZEN = "parzen"

    @classmethod
    def coerce(cls, value) -> "Kernel":
        if isinstance(value, Kernel):
            return value
        key = str(value).strip().lower()
        aliases = {"bar": "bartlett", "tuk": "tukey", "par": "parzen"}
        try:
            return cls(aliases.get(key, key))
        except ValueError:
            raise ConfigurationError(f"unknown kernel {value!r}") from None

    @property
    def short_name(self) -> str:
        return {"bartlett": "BAR", "tukey": "TUK", "parzen": "PAR"}[self.value]

    def __call__(self, x):
        return kernel_eval(self, x)


# exact integrals of K^2 and K^4 over [-1, 1]
_CONSTANTS = {
    Kernel.BARTLETT: (Fraction(2, 3), Fraction(2, 5)),
    Kernel.TUKEY: (Fraction(3, 4), Fraction(35, 64)),
    Kernel.PARZEN: (Fraction(151, 280), Fraction(122559, 320320)),
}


def kernel_eval(kernel, x):
    """Evaluate a lag-window kernel.

    Parameters
    ----------
    kernel : Kernel or str
    x : float or array_like

    Returns
    -------
    float or ndarray
        K(x), zero outside [-1, 1].
    """
    kernel = Kernel.coerce(kernel)
    scalar = np.ndim(x) == 0
    a = np.abs(np.asarray(x, dtype=float))
    out = np.zeros_like(a)
    inside = a < 1.0
    ai = a[inside]
    if kernel is Kernel.BARTLETT:
        out[inside] = 1.0 - ai
    elif kernel is Kernel.TUKEY:
        out[inside] = 0.5 * (1.0 + np.cos(np.pi * ai))
    else:
        out[inside] = np.where(ai <= 0.5, 1.0 - 6.0 * ai**2 + 6.0 * ai**3,
                               2.0 * (1.0 - ai) ** 3)
    return float(out) if scalar else out


def spectral_constants(kernel) -> tuple[float, float]:
    """Return ``(s(K), d(K))``, the integrals of K^2 and K^4 over the real line."""
    s, d = _CONSTANTS[Kernel.coerce(kernel)]
    return float(s), float(d)


def bandwidth(exponent: float, n: int) -> int:
    """Integer part of ``3 * n**exponent``.

    Raises
    ------
    ConfigurationError
        If the result is not in ``[1, n)``.
    """
    if n < MIN_LENGTH:
        raise ConfigurationError(f"n must be at least {MIN_LENGTH}, got {n}")
    # guard against 3 * n**e landing a hair below an integer
    b = int(math.floor(3.0 * n**exponent + 1e-9))
    if b < 1 or b >= n:
        raise ConfigurationError(f"bandwidth {b} not in [1, {n}) for exponent {exponent}")
    return b


@dataclass(frozen=True)
class WindowWeights:
    """Lag weights K(h / B) for h = -B..B."""

    kernel: Kernel
    bandwidth: int
    lag_weights: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        kernel = Kernel.coerce(self.kernel)
        object.__setattr__(self, "kernel", kernel)
        if self.bandwidth < 0:
            raise ConfigurationError("bandwidth must be non-negative")
        h = self.lags
        if self.bandwidth == 0:
            w = np.ones(1)
        else:
            w = kernel_eval(kernel, h / self.bandwidth)
        w.setflags(write=False)
        object.__setattr__(self, "lag_weights", w)

    @property
    def lags(self) -> np.ndarray:
        return np.arange(-self.bandwidth, self.bandwidth + 1)

    @property
    def squared_lag_weights(self) -> np.ndarray:
        return self.lag_weights**2

    def folded(self, n: int) -> np.ndarray:
        """Kernel weights summed over lags congruent modulo ``n`` (length ``n``)."""
        out = np.zeros(n)
        np.add.at(out, self.lags % n, self.lag_weights)
        return out

    def window(self, lam):
        """Spectral window W(lambda) = (2 pi)^-1 sum_h K(h/B) exp(-i h lambda)."""
        lam = np.asarray(lam, dtype=float)
        phases = np.exp(-1j * np.multiply.outer(lam, self.lags))
        return (phases @ self.lag_weights).real / (2 * np.pi)

    def lambda_n(self, lam):
        """Squared-kernel sum Lambda_n(lambda) = sum_h K^2(h/B) exp(i h lambda)."""
        lam = np.asarray(lam, dtype=float)
        phases = np.exp(1j * np.multiply.outer(lam, self.lags))
        return (phases @ self.squared_lag_weights).real


def fourier_frequencies(n: int) -> np.ndarray:
    return 2 * np.pi * np.arange(n) / n


def as_series(z, name: str = "series", min_length: int = 2) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    if z.ndim != 1:
        raise InvalidInputError(f"{name} must be one-dimensional")
    if z.size < min_length:
        raise InvalidInputError(f"{name} needs at least {min_length} observations, got {z.size}")
    if not np.all(np.isfinite(z)):
        raise InvalidInputError(f"{name} contains non-finite values")
    return z


def dft(z) -> np.ndarray:
    """DFT at all Fourier frequencies lambda_j, j = 0..n-1, time index starting at 1."""
    z = as_series(z)
    n = z.size
    lam = fourier_frequencies(n)
    # n * ifft gives sum_{k=0}^{n-1} z_{k+1} e^{i k lambda_j}; shift the index to t = k + 1
    return np.exp(1j * lam) * np.fft.ifft(z) * (n / math.sqrt(2 * np.pi * n))


@dataclass(frozen=True)
class PeriodogramSet:
    w1: np.ndarray
    w2: np.ndarray
    i11: np.ndarray
    i22: np.ndarray
    i12: np.ndarray
    freqs: np.ndarray

    @property
    def n(self) -> int:
        return self.freqs.size


def check_pair(x1, x2, min_length: int = MIN_LENGTH) -> tuple[np.ndarray, np.ndarray]:
    x1 = as_series(x1, "x1", min_length)
    x2 = as_series(x2, "x2", min_length)
    if x1.size != x2.size:
        raise InvalidInputError(f"series lengths differ: {x1.size} != {x2.size}")
    return x1, x2


def periodograms(x1, x2) -> PeriodogramSet:
    x1, x2 = check_pair(x1, x2)
    w1, w2 = dft(x1), dft(x2)
    return PeriodogramSet(
        w1=w1,
        w2=w2,
        i11=np.abs(w1) ** 2,
        i22=np.abs(w2) ** 2,
        i12=w1 * np.conj(w2),
        freqs=fourier_frequencies(x1.size),
    )


def window_sum_identity_check(weights: WindowWeights, n: int, j: int) -> tuple[float, float]:
    """Direct sum over l of W(lambda_{l-j}) next to its closed form n / (2 pi)."""
    lam = fourier_frequencies(n)
    lhs = float(np.sum(weights.window(lam - lam[j])))
    return lhs, n / (2 * np.pi)


def window_product_identity_check(weights: WindowWeights, n: int, j: int,
                                  jp: int) -> tuple[float, float]:
    """Direct sum over l of W(lambda_{l-j}) W(lambda_{l-j'}) next to n Lambda_n / (4 pi^2)."""
    lam = fourier_frequencies(n)
    lhs = float(np.sum(weights.window(lam - lam[j]) * weights.window(lam - lam[jp])))
    if 2 * weights.bandwidth < n:
        rhs = n * float(weights.lambda_n(lam[j] - lam[jp])) / (4 * np.pi**2)
    else:
        # lags h and h' = -h + n alias onto each other
        folded = weights.folded(n)
        phase = np.exp(1j * np.arange(n) * (lam[j] - lam[jp]))
        rhs = n * float(np.sum(folded**2 * phase).real) / (4 * np.pi**2)
    return lhs, rhs
