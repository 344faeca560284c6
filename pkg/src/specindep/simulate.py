"""Simulation of FARIMA pairs with correlated innovations.

A pair is produced in three steps: innovations on t = -4000..n, an AR(1) or
MA(1) core over the same range with the first 1000 values discarded, and a
3000-lag truncated fractional-integration filter keeping the last n values.
"""
from __future__ import annotations

import enum
import io
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.signal import lfilter

from .exceptions import InvalidSpecError
from .models import FarimaParams, FarimaVariant, frac_diff_coeffs

BURN_IN = 4000
CORE_DISCARD = 1000
FILTER_LAGS = 3000


class InnovationDist(str, enum.Enum):
    GAUSSIAN = "gauss"
    STUDENT_T5 = "t5"


class Construction(str, enum.Enum):
    """How cross-correlated innovations are built from independent draws.

    ``exact`` gives Corr(u_{t-j}, v_t) = rho(j). ``entrywise_root`` multiplies
    the draws by the entrywise square root of the joint covariance matrix
    (off-diagonal blocks sqrt(rho(j))), rescaled to unit variance; the lag-j
    correlation is then 2 sqrt(rho(j)) / (1 + sum_i rho(i)) for a single lag.
    """

    EXACT = "exact"
    ENTRYWISE_ROOT = "entrywise_root"


@dataclass(frozen=True)
class InnovationSpec:
    """Innovation law and cross-correlations rho(j) = Corr(u_{t-j}, v_t)."""

    dist: InnovationDist = InnovationDist.GAUSSIAN
    cross_corr: dict = field(default_factory=dict)
    seed: int | None = None
    construction: Construction = Construction.EXACT

    def __post_init__(self):
        object.__setattr__(self, "dist", InnovationDist(self.dist))
        object.__setattr__(self, "construction", Construction(self.construction))
        corr = {int(k): float(v) for k, v in self.cross_corr.items() if v != 0}
        if any(k < 0 for k in corr):
            raise InvalidSpecError("cross-correlation lags must be non-negative")
        if sum(v * v for v in corr.values()) >= 1:
            raise InvalidSpecError("sum of squared cross-correlations must be below 1")
        if self.construction is Construction.ENTRYWISE_ROOT and any(v < 0 for v in corr.values()):
            raise InvalidSpecError("entrywise square root needs non-negative correlations")
        object.__setattr__(self, "cross_corr", corr)


@dataclass(frozen=True)
class Branch:
    """One marginal: (1 - B)^d X_t = core_t, core_t = ar core_{t-1} + e_t + ma e_{t-1}."""

    d: float
    ar: float = 0.0
    ma: float = 0.0

    def density_params(self) -> FarimaParams:
        if self.ar and self.ma:
            raise ValueError("only pure AR(1) or MA(1) cores have a FARIMA density here")
        if self.ma:
            return FarimaParams(self.d, self.ma, FarimaVariant.FARIMA_0_D_1)
        return FarimaParams(self.d, self.ar, FarimaVariant.FARIMA_1_D_0)

    def density(self, lam):
        return self.density_params().density(lam)


@dataclass(frozen=True)
class DataModel:
    name: str
    branch1: Branch
    branch2: Branch

    @property
    def branches(self) -> tuple[Branch, Branch]:
        return self.branch1, self.branch2


AR1_MODEL = DataModel("ar1", Branch(0.2, ar=0.5), Branch(0.4, ar=0.5))
MA1_MODEL = DataModel("ma1", Branch(-0.2, ma=0.5), Branch(-0.4, ma=0.5))
WHITE_NOISE = DataModel("white", Branch(0.0), Branch(0.0))
MODELS = {m.name: m for m in (AR1_MODEL, MA1_MODEL, WHITE_NOISE)}


def get_model(name) -> DataModel:
    if isinstance(name, DataModel):
        return name
    try:
        return MODELS[str(name).lower()]
    except KeyError:
        raise ValueError(f"unknown data model {name!r}") from None


def alternative_corr(which: int) -> dict:
    """Innovation cross-correlations under alternatives 1-3 (0 is the null)."""
    if which == 0:
        return {}
    if which == 1:
        return {0: 0.05}
    if which == 2:
        out = {0: 0.05}
        out.update({j: math.sin(0.05 * math.pi * j) / (math.pi * j) for j in range(1, 9)})
        return out
    if which == 3:
        return {3: 0.05}
    raise ValueError(f"alternative must be 0, 1, 2 or 3, got {which}")


def _draw(rng: np.random.Generator, dist: InnovationDist, size: int) -> np.ndarray:
    if dist is InnovationDist.GAUSSIAN:
        return rng.standard_normal(size)
    return rng.standard_t(5, size) * math.sqrt(3.0 / 5.0)


def _streams(spec: InnovationSpec, rng):
    if rng is not None:
        return rng.spawn(2) if isinstance(rng, np.random.Generator) else rng
    return [np.random.default_rng(s) for s in np.random.SeedSequence(spec.seed).spawn(2)]


def gen_innovations(n_total: int, spec: InnovationSpec, rng=None) -> tuple[np.ndarray, np.ndarray]:
    """Unit-variance innovations with Corr(u_{t-j}, v_t) = rho(j).

    ``v_t = sum_j rho(j) u_{t-j} + sqrt(1 - sum_j rho(j)^2) e_t`` with ``e``
    drawn from a stream disjoint from ``u``. ``rng`` may be a pair of
    generators; otherwise streams are derived from ``spec.seed``.
    See :class:`Construction` for the alternative entrywise-root layout.
    """
    if n_total < 1:
        raise ValueError("n_total must be positive")
    rng_u, rng_e = _streams(spec, rng)
    if spec.construction is Construction.ENTRYWISE_ROOT:
        return _entrywise_root(n_total, spec, rng_u, rng_e)
    lags = max(spec.cross_corr, default=0)
    u_ext = _draw(rng_u, spec.dist, n_total + lags)
    e = _draw(rng_e, spec.dist, n_total)
    u = u_ext[lags:]
    if not spec.cross_corr:
        return u, e
    rho2 = sum(r * r for r in spec.cross_corr.values())
    v = math.sqrt(1.0 - rho2) * e
    for j, r in spec.cross_corr.items():
        v += r * u_ext[lags - j: lags - j + n_total]
    return u, v


def _entrywise_root(n_total, spec, rng_u, rng_e):
    lags = max(spec.cross_corr, default=0)
    z1 = _draw(rng_u, spec.dist, n_total + 2 * lags)
    z2 = _draw(rng_e, spec.dist, n_total + 2 * lags)
    u = z1[lags: lags + n_total].copy()
    v = z2[lags: lags + n_total].copy()
    for j, r in spec.cross_corr.items():
        a = math.sqrt(r)
        u += a * z2[lags + j: lags + j + n_total]
        v += a * z1[lags - j: lags - j + n_total]
    scale = math.sqrt(1.0 + sum(spec.cross_corr.values()))
    return u / scale, v / scale


def _core(innov: np.ndarray, branch: Branch) -> np.ndarray:
    x = innov.copy()
    if branch.ma:
        x[1:] += branch.ma * innov[:-1]
    if branch.ar:
        x = lfilter([1.0], [1.0, -branch.ar], x)
    return x


def integrate(core: np.ndarray, d: float, n: int, lags: int = FILTER_LAGS) -> np.ndarray:
    """Last ``n`` values of sum_{j=0}^{lags} psi_j core_{t-j}, psi the (1 - B)^-d expansion."""
    if d == 0:
        return core[-n:].copy()
    psi = frac_diff_coeffs(-d, lags)
    windows = sliding_window_view(core[-(n + lags):], lags + 1)
    return windows @ psi[::-1]


@dataclass(frozen=True)
class SimPath:
    x1: np.ndarray
    x2: np.ndarray
    model: str
    innovations: InnovationSpec

    @property
    def n(self) -> int:
        return self.x1.size

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("x1,x2\n")
        for a, b in zip(self.x1, self.x2):
            buf.write(f"{float(a)!r},{float(b)!r}\n")
        return buf.getvalue()


def simulate_pair(model, n: int, innovations: InnovationSpec | None = None, rng=None,
                  burn_in: int = BURN_IN, core_discard: int = CORE_DISCARD,
                  filter_lags: int = FILTER_LAGS) -> SimPath:
    """Simulate one pair of length ``n`` from ``model``."""
    model = get_model(model)
    if not 8 <= n <= 1024:
        raise ValueError(f"n must lie in [8, 1024], got {n}")
    if burn_in - core_discard < filter_lags:
        raise ValueError("burn-in too short for the filter length")
    innovations = innovations or InnovationSpec()
    u, v = gen_innovations(burn_in + n + 1, innovations, rng)
    series = []
    for innov, branch in zip((u, v), model.branches):
        core = _core(innov, branch)[core_discard:]
        series.append(integrate(core, branch.d, n, filter_lags))
    return SimPath(series[0], series[1], model.name, innovations)
