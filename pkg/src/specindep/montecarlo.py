"""Monte Carlo size and size-adjusted power experiments.

Every replication draws its random numbers from
``SeedSequence(seed, spawn_key=(alternative, rep))``, so results do not
depend on how replications are scheduled across workers.
"""
from __future__ import annotations

import csv
import io
import logging
import math
import time
from dataclasses import dataclass, field, replace

import numpy as np
from joblib import Parallel, delayed
from scipy.stats import norm

from .exceptions import ConfigurationError, DegenerateInputError
from .simulate import (
    Construction,
    DataModel,
    InnovationDist,
    InnovationSpec,
    alternative_corr,
    get_model,
    simulate_pair,
)
from .spectral import Kernel, WindowWeights, bandwidth, periodograms
from .stats import PreparedPair, StatisticKind, prepare_fitted
from .whittle import choose_far_order, fit_whittle_far, fit_whittle_farima

logger = logging.getLogger(__name__)

TABLE_STATISTICS = (StatisticKind.PARAMETRIC_WHITTLE, StatisticKind.FAR_WHITTLE)
TABLE_EXPONENTS = (0.2, 0.3, 0.4)
TABLE_LEVELS = (0.05, 0.10)


@dataclass(frozen=True)
class McConfig:
    model: DataModel
    n: int
    reps: int = 5000
    kernels: tuple = tuple(Kernel)
    bandwidth_exponents: tuple = TABLE_EXPONENTS
    statistics: tuple = TABLE_STATISTICS
    levels: tuple = TABLE_LEVELS
    alternative: int = 0
    seed: int = 20240101
    innovation_dist: InnovationDist = InnovationDist.GAUSSIAN
    construction: Construction = Construction.ENTRYWISE_ROOT
    far_order: int | None = None
    threads: int = 1

    def __post_init__(self):
        object.__setattr__(self, "model", get_model(self.model))
        object.__setattr__(self, "kernels", tuple(Kernel.coerce(k) for k in self.kernels))
        object.__setattr__(self, "statistics",
                           tuple(StatisticKind.coerce(s) for s in self.statistics))
        object.__setattr__(self, "innovation_dist", InnovationDist(self.innovation_dist))
        object.__setattr__(self, "construction", Construction(self.construction))
        object.__setattr__(self, "bandwidth_exponents", tuple(self.bandwidth_exponents))
        object.__setattr__(self, "levels", tuple(self.levels))
        if self.reps < 100:
            raise ConfigurationError("reps must be at least 100")
        if not all(0 < a < 1 for a in self.levels):
            raise ConfigurationError("levels must lie in (0, 1)")
        if self.alternative not in (0, 1, 2, 3):
            raise ConfigurationError("alternative must be 0, 1, 2 or 3")

    @property
    def bandwidths(self) -> tuple:
        return tuple(bandwidth(e, self.n) for e in self.bandwidth_exponents)

    @property
    def order(self) -> int:
        return choose_far_order(self.n) if self.far_order is None else self.far_order

    def null_key(self) -> tuple:
        """Fields a critical-value table must share with a power run."""
        return (self.model.name, self.n, self.kernels, self.bandwidths, self.statistics,
                self.innovation_dist.value, self.order)

    def to_dict(self) -> dict:
        return {
            "model": self.model.name,
            "n": self.n,
            "reps": self.reps,
            "kernels": [k.value for k in self.kernels],
            "bandwidth_exponents": list(self.bandwidth_exponents),
            "bandwidths": list(self.bandwidths),
            "statistics": [s.value for s in self.statistics],
            "levels": list(self.levels),
            "alternative": self.alternative,
            "seed": self.seed,
            "innovation_dist": self.innovation_dist.value,
            "construction": self.construction.value,
            "far_order": self.order,
        }


@dataclass
class ScoreCube:
    """Standardized scores indexed (rep, statistic, kernel, bandwidth); NaN marks a dropped cell."""

    config: McConfig
    scores: np.ndarray
    fit_failures: dict
    wall_time: float = 0.0

    def cell(self, stat, kernel, b) -> np.ndarray:
        cfg = self.config
        s = cfg.statistics.index(StatisticKind.coerce(stat))
        k = cfg.kernels.index(Kernel.coerce(kernel))
        j = cfg.bandwidths.index(b)
        col = self.scores[:, s, k, j]
        return col[np.isfinite(col)]

    def cells(self):
        cfg = self.config
        for stat in cfg.statistics:
            for kernel in cfg.kernels:
                for b in cfg.bandwidths:
                    yield stat, kernel, b, self.cell(stat, kernel, b)


def _one_replication(cfg: McConfig, rep: int, weights: list) -> tuple[np.ndarray, dict]:
    ss = np.random.SeedSequence(cfg.seed, spawn_key=(cfg.alternative, rep))
    rngs = [np.random.default_rng(s) for s in ss.spawn(2)]
    innov = InnovationSpec(cfg.innovation_dist, alternative_corr(cfg.alternative),
                           construction=cfg.construction)
    path = simulate_pair(cfg.model, cfg.n, innov, rng=rngs)
    pset = periodograms(path.x1, path.x2)
    out = np.full((len(cfg.statistics), len(cfg.kernels), len(cfg.bandwidths)), np.nan)
    failures = {}
    for s, stat in enumerate(cfg.statistics):
        try:
            if stat is StatisticKind.KNOWN_DENSITY:
                lam = pset.freqs[1:]
                prepared = PreparedPair(pset, cfg.model.branch1.density(lam),
                                        cfg.model.branch2.density(lam))
            else:
                if stat is StatisticKind.PARAMETRIC_WHITTLE:
                    # FARIMA(1,d,0) whatever the generating model
                    fits = (fit_whittle_farima(path.x1), fit_whittle_farima(path.x2))
                else:
                    fits = (fit_whittle_far(path.x1, cfg.order),
                            fit_whittle_far(path.x2, cfg.order))
                failures[stat.value] = sum(not f.converged for f in fits)
                prepared = prepare_fitted(pset, fits)
        except DegenerateInputError:
            continue
        for k in range(len(cfg.kernels)):
            for j in range(len(cfg.bandwidths)):
                out[s, k, j] = prepared.standardized(weights[k][j])
    return out, failures


def _run_chunk(cfg: McConfig, reps: range) -> tuple[np.ndarray, dict]:
    weights = [[WindowWeights(k, b) for b in cfg.bandwidths] for k in cfg.kernels]
    scores = []
    failures = {s.value: 0 for s in cfg.statistics}
    for rep in reps:
        arr, fails = _one_replication(cfg, rep, weights)
        scores.append(arr)
        for key, v in fails.items():
            failures[key] += v
    return np.stack(scores), failures


def simulate_scores(cfg: McConfig, threads: int | None = None) -> ScoreCube:
    """Standardized statistics for every replication, statistic, kernel and bandwidth."""
    threads = cfg.threads if threads is None else threads
    start = time.perf_counter()
    n_chunks = max(1, threads) * 4 if threads != 1 else 1
    bounds = np.linspace(0, cfg.reps, n_chunks + 1).astype(int)
    chunks = [range(a, b) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
    if threads == 1:
        parts = [_run_chunk(cfg, c) for c in chunks]
    else:
        parts = Parallel(n_jobs=threads)(delayed(_run_chunk)(cfg, c) for c in chunks)
    scores = np.concatenate([p[0] for p in parts])
    failures = {s.value: sum(p[1][s.value] for p in parts) for s in cfg.statistics}
    wall = time.perf_counter() - start
    logger.info("simulated %d replications of %s n=%d alt=%d in %.1fs",
                cfg.reps, cfg.model.name, cfg.n, cfg.alternative, wall)
    return ScoreCube(cfg, scores, failures, wall)


def mc_standard_error(pct: float, reps: int) -> float:
    """Standard error of a rejection percentage, 100 sqrt(a (1 - a) / reps)."""
    a = pct / 100.0
    return 100.0 * math.sqrt(a * (1.0 - a) / reps)


@dataclass
class McReport:
    cells: dict
    se: dict
    n: int
    model: str
    alternative: int
    reps: int
    seed: int
    size_adjusted: bool = False
    fit_failures: dict = field(default_factory=dict)
    wall_time: float = 0.0

    def get(self, stat, kernel, b, level) -> float:
        return self.cells[(StatisticKind.coerce(stat), Kernel.coerce(kernel), b, level)]

    def to_rows(self) -> list[dict]:
        rows = []
        for (stat, kernel, b, level), pct in sorted(self.cells.items(),
                                                    key=lambda kv: _cell_sort(kv[0])):
            rows.append({
                "model": self.model, "n": self.n, "alternative": self.alternative,
                "statistic": stat.value, "kernel": kernel.value, "bandwidth": b,
                "level": level, "rejection_pct": pct,
                "se_pct": self.se[(stat, kernel, b, level)],
            })
        return rows

    def metadata(self) -> dict:
        return {"model": self.model, "n": self.n, "alternative": self.alternative,
                "reps": self.reps, "seed": self.seed, "size_adjusted": self.size_adjusted,
                "fit_failures": self.fit_failures, "wall_time": self.wall_time}


def _cell_sort(key):
    stat, kernel, b, level = key
    return (b, level, list(StatisticKind).index(stat), list(Kernel).index(kernel))


@dataclass
class CriticalValueTable:
    values: dict
    provenance: dict
    null_key: tuple

    def get(self, stat, kernel, b, level) -> float:
        return self.values[(StatisticKind.coerce(stat), Kernel.coerce(kernel), b, level)]


def _report(cube: ScoreCube, critical, size_adjusted: bool) -> McReport:
    cfg = cube.config
    cells, se = {}, {}
    for stat, kernel, b, col in cube.cells():
        for level in cfg.levels:
            crit = critical(stat, kernel, b, level)
            pct = 100.0 * float(np.mean(col > crit)) if col.size else math.nan
            cells[(stat, kernel, b, level)] = pct
            se[(stat, kernel, b, level)] = mc_standard_error(pct, col.size) if col.size else math.nan
    return McReport(cells, se, cfg.n, cfg.model.name, cfg.alternative, cfg.reps, cfg.seed,
                    size_adjusted, dict(cube.fit_failures), cube.wall_time)


def run_size_experiment(cfg: McConfig, scores: ScoreCube | None = None) -> McReport:
    """Null rejection percentages against standard-normal upper-tail critical values."""
    if cfg.alternative != 0:
        raise ConfigurationError("size experiments run under the null (alternative=0)")
    cube = scores if scores is not None else simulate_scores(cfg)
    return _report(cube, lambda stat, kernel, b, level: norm.isf(level), False)


def empirical_critical_values(cfg: McConfig, scores: ScoreCube | None = None) -> CriticalValueTable:
    """Upper (1 - level) quantiles of the null standardized statistics."""
    if cfg.alternative != 0:
        raise ConfigurationError("critical values come from a null configuration")
    cube = scores if scores is not None else simulate_scores(cfg)
    values = {}
    for stat, kernel, b, col in cube.cells():
        for level in cfg.levels:
            values[(stat, kernel, b, level)] = float(np.quantile(col, 1.0 - level))
    provenance = cfg.to_dict()
    provenance["wall_time"] = cube.wall_time
    return CriticalValueTable(values, provenance, cfg.null_key())


def run_power_experiment(cfg: McConfig, critvals: CriticalValueTable,
                         scores: ScoreCube | None = None) -> McReport:
    """Size-adjusted power: rejection against empirical null critical values."""
    if critvals.null_key != cfg.null_key():
        raise ConfigurationError("critical values were computed for a different configuration")
    missing = [lv for lv in cfg.levels if lv not in {k[3] for k in critvals.values}]
    if missing:
        raise ConfigurationError(f"no critical values for levels {missing}")
    cube = scores if scores is not None else simulate_scores(cfg)
    return _report(cube, critvals.get, True)


def null_config(cfg: McConfig) -> McConfig:
    return replace(cfg, alternative=0)


# ---------------------------------------------------------------- tables

TABLE_ALTERNATIVE = {1: 0, 2: 1, 3: 2, 4: 3}
TABLE_TITLES = {
    1: "null rejection rates (%)",
    2: "size-adjusted power (%), alternative 1",
    3: "size-adjusted power (%), alternative 2",
    4: "size-adjusted power (%), alternative 3",
}
CSV_FIELDS = ["table", "model", "n", "bandwidth", "level", "statistic", "kernel",
              "rejection_pct", "se_pct"]


def emit_table(reports, layout: int, model: str | None = None) -> tuple[str, str]:
    """Render reports in the standard rejection-rate table layout.

    Rows are (n, B, level); columns are BAR/TUK/PAR for each fitted statistic.
    Missing cells print as ``--``. Returns ``(text, csv_text)``.
    """
    if layout not in TABLE_TITLES:
        raise ValueError("layout must be 1, 2, 3 or 4")
    reports = list(reports)
    cells = {}
    for rep in reports:
        for (stat, kernel, b, level), pct in rep.cells.items():
            cells[(rep.n, b, level, stat, kernel)] = (pct, rep.se[(stat, kernel, b, level)])
    model = model or (reports[0].model if reports else "")
    ns = sorted({rep.n for rep in reports}) or [64, 128]
    stats = TABLE_STATISTICS
    kernels = tuple(Kernel)

    header = f"{'n':>4} {'B_n':>4} {'a%':>4} | " + " | ".join(
        " ".join(f"{k.short_name:>6}" for k in kernels) for _ in stats)
    stat_line = " " * 15 + "| " + " | ".join(f"{s.value:^20}" for s in stats)
    lines = [f"Table {layout}: {TABLE_TITLES[layout]} (model {model})", stat_line, header,
             "-" * len(header)]
    for n in ns:
        bws = sorted({key[1] for key in cells if key[0] == n})
        if not bws:
            bws = [bandwidth(e, n) for e in TABLE_EXPONENTS]
        for b in bws:
            for level in TABLE_LEVELS:
                blocks = []
                for stat in stats:
                    vals = []
                    for kernel in kernels:
                        hit = cells.get((n, b, level, stat, kernel))
                        vals.append(f"{hit[0]:6.2f}" if hit else f"{'--':>6}")
                    blocks.append(" ".join(vals))
                lines.append(f"{n:>4} {b:>4} {int(round(level * 100)):>3}% | " + " | ".join(blocks))
    text = "\n".join(lines) + "\n"

    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for (n, b, level, stat, kernel), (pct, se) in sorted(
            cells.items(), key=lambda kv: (kv[0][0],) + _cell_sort(
                (kv[0][3], kv[0][4], kv[0][1], kv[0][2]))):
        writer.writerow({"table": layout, "model": model, "n": n, "bandwidth": b,
                         "level": repr(level), "statistic": stat.value, "kernel": kernel.value,
                         "rejection_pct": repr(pct), "se_pct": repr(se)})
    return text, buf.getvalue()


def read_table_csv(text: str) -> dict:
    """Parse :func:`emit_table` CSV output back into ``{(n, B, level, stat, kernel): (pct, se)}``."""
    out = {}
    for row in csv.DictReader(io.StringIO(text)):
        key = (int(row["n"]), int(row["bandwidth"]), float(row["level"]),
               StatisticKind(row["statistic"]), Kernel(row["kernel"]))
        out[key] = (float(row["rejection_pct"]), float(row["se_pct"]))
    return out
