"""Command-line interface: ``specindep test | simulate | replicate``.

Exit codes
----------
0  success
1  invalid or degenerate input (message on stderr)
2  independence rejected at ``--level`` when ``--exit-on-reject`` is given
64 usage error
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .exceptions import ConfigurationError, InvalidInputError, InvalidSpecError
from .montecarlo import (
    TABLE_EXPONENTS,
    TABLE_ALTERNATIVE,
    McConfig,
    emit_table,
    empirical_critical_values,
    null_config,
    run_power_experiment,
    run_size_experiment,
    simulate_scores,
)
from .simulate import InnovationSpec, alternative_corr, simulate_pair
from .spectral import Kernel
from .stats import SpectralIndependenceTest, StatisticKind

THREADS_ENV = "SPECINDEP_THREADS"
EXIT_INPUT = 1
EXIT_REJECT = 2
EXIT_USAGE = 64

logger = logging.getLogger("specindep")


class CsvParseError(InvalidInputError):
    pass


class _Parser(argparse.ArgumentParser):
    # exit status 2 is reserved for a rejected test
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _float(text: str) -> float:
    value = float(text)
    if not math.isfinite(value):
        raise ValueError(text)
    return value


def read_pair_csv(lines, header: str = "auto") -> np.ndarray:
    """Parse two numeric comma-separated columns into an ``(n, 2)`` array.

    Parameters
    ----------
    lines : iterable of str
    header : {"auto", "yes", "no"}
        ``auto`` treats the first row as a header when it is not numeric.
    """
    records = [(k, row) for k, row in enumerate(csv.reader(lines), start=1)
               if any(c.strip() for c in row)]
    if records and header != "no":
        lineno, row = records[0]
        if header == "yes" or not _is_numeric(row):
            records = records[1:]
    values = []
    for lineno, row in records:
        if len(row) != 2:
            raise CsvParseError(f"line {lineno}: expected 2 columns, found {len(row)}")
        try:
            values.append((_float(row[0]), _float(row[1])))
        except ValueError:
            raise CsvParseError(f"line {lineno}: non-numeric value in {row!r}") from None
    if not values:
        raise CsvParseError("no data rows")
    return np.array(values, dtype=float)


def _is_numeric(row) -> bool:
    try:
        [_float(c) for c in row]
    except ValueError:
        return False
    return True


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _dump(obj) -> str:
    # float repr is the shortest string that round-trips, so no digits are lost
    return json.dumps(obj, indent=2, default=_json_default, allow_nan=True)


def _default_threads() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ConfigurationError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None


# ------------------------------------------------------------------ test

def cmd_test(args) -> int:
    if args.input == "-":
        raw = sys.stdin.buffer.read()
    else:
        raw = Path(args.input).read_bytes()
    X = read_pair_csv(raw.decode("utf-8-sig").splitlines(), args.header)
    if X.shape[0] < 32:
        raise InvalidInputError(f"need at least 32 observations, got {X.shape[0]}")
    est = SpectralIndependenceTest(statistic=args.stat, kernel=args.kernel,
                                   bandwidth=args.bandwidth, bw_exponent=args.bw_exp,
                                   far_order=args.far_order,
                                   variants=(args.variant, args.variant), level=args.level)
    est.fit(X)
    out = est.result_.to_dict()
    if est.result_.statistic_kind is StatisticKind.FAR_WHITTLE:
        out["far_order"] = est.fits_[0].params.p
    out.update(level=args.level, reject=bool(est.predict()), seed=args.seed,
               input_sha256=_sha256(raw), version=__version__)
    print(_dump(out))
    if args.exit_on_reject and out["reject"]:
        return EXIT_REJECT
    return 0


# -------------------------------------------------------------- simulate

def cmd_simulate(args) -> int:
    spec = InnovationSpec(args.dist, alternative_corr(args.alt), seed=args.seed,
                          construction=args.construction)
    path = simulate_pair(args.model, args.n, spec, rng=np.random.default_rng(args.seed))
    text = path.to_csv()
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


# ------------------------------------------------------------- replicate

def _filtered_config(args, model, n, alternative) -> McConfig:
    kernels = tuple(args.kernel) if args.kernel else tuple(Kernel)
    exps = tuple(args.bw_exp) if args.bw_exp else TABLE_EXPONENTS
    stats = tuple(args.stat) if args.stat else ("parametric", "far")
    levels = tuple(args.level) if args.level else (0.05, 0.10)
    return McConfig(model, n, reps=args.reps, kernels=kernels, bandwidth_exponents=exps,
                    statistics=stats, levels=levels, alternative=alternative, seed=args.seed,
                    innovation_dist=args.dist, construction=args.construction,
                    threads=args.threads)


def cmd_replicate(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    alternative = TABLE_ALTERNATIVE[args.table]
    for model in args.model:
        start = time.perf_counter()
        reports, runs = [], []
        for n in args.n:
            cfg = _filtered_config(args, model, n, alternative)
            if alternative == 0:
                report = run_size_experiment(cfg, simulate_scores(cfg))
                runs.append({"phase": "size", "config": cfg.to_dict(),
                             "fit_failures": report.fit_failures,
                             "wall_time": report.wall_time})
            else:
                ncfg = null_config(cfg)
                logger.info("critical-value phase: %s n=%d reps=%d", model, n, ncfg.reps)
                critvals = empirical_critical_values(ncfg)
                report = run_power_experiment(cfg, critvals)
                runs.append({"phase": "critical_values", "config": ncfg.to_dict(),
                             "critical_values": [
                                 {"statistic": k[0].value, "kernel": k[1].value,
                                  "bandwidth": k[2], "level": k[3], "value": v}
                                 for k, v in critvals.values.items()],
                             "wall_time": critvals.provenance["wall_time"]})
                runs.append({"phase": "power", "config": cfg.to_dict(),
                             "fit_failures": report.fit_failures,
                             "wall_time": report.wall_time})
            reports.append(report)
        text, csv_text = emit_table(reports, args.table, model)
        stem = out_dir / f"table{args.table}_{model}"
        Path(f"{stem}.txt").write_text(text, encoding="utf-8")
        Path(f"{stem}.csv").write_text(csv_text, encoding="utf-8")
        manifest = {
            "command": "replicate",
            "argv": args.argv,
            "version": __version__,
            "numpy_version": np.__version__,
            "table": args.table,
            "model": model,
            "seed": args.seed,
            "reps": args.reps,
            "critical_value_reps": args.reps if alternative else None,
            "runs": runs,
            "wall_time": time.perf_counter() - start,
            "outputs": {f"{stem.name}.txt": _sha256(text.encode()),
                        f"{stem.name}.csv": _sha256(csv_text.encode())},
        }
        Path(f"{stem}.manifest.json").write_text(_dump(manifest) + "\n", encoding="utf-8")
        sys.stdout.write(text + "\n")
    return 0


# ---------------------------------------------------------------- parser

def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _level(text: str) -> float:
    value = float(text)
    if not 0 < value < 1:
        raise argparse.ArgumentTypeError(f"level must lie in (0, 1), got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="specindep", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    kernels = [k.value for k in Kernel]

    p = sub.add_parser("test", help="test two columns of a CSV file for independence")
    p.add_argument("input", help="CSV path, or - for stdin")
    p.add_argument("--header", choices=("auto", "yes", "no"), default="auto")
    p.add_argument("--kernel", choices=kernels, default="bartlett")
    p.add_argument("--bw-exp", type=float, default=0.3,
                   help="bandwidth exponent e in B = [3 n^e] (default 0.3)")
    p.add_argument("--bandwidth", type=_positive_int, default=None,
                   help="explicit bandwidth, overrides --bw-exp")
    p.add_argument("--stat", choices=("far", "parametric"), default="far")
    p.add_argument("--far-order", type=int, default=None)
    p.add_argument("--variant", choices=("farima_1_d_0", "farima_0_d_1"),
                   default="farima_1_d_0", help="working model for --stat parametric")
    p.add_argument("--level", type=_level, default=0.05)
    p.add_argument("--exit-on-reject", action="store_true")
    p.add_argument("--seed", type=int, default=0,
                   help="accepted for uniformity; the test itself draws no random numbers")
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("simulate", help="simulate a pair of FARIMA series as CSV")
    p.add_argument("--model", choices=("ar1", "ma1"), required=True)
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--alt", type=int, choices=(0, 1, 2, 3), default=0)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--dist", choices=("gauss", "t5"), default="gauss")
    p.add_argument("--construction", choices=("exact", "entrywise_root"), default="exact")
    p.add_argument("--out", default=None, help="output path (default stdout)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("replicate", help="Monte Carlo rejection-rate tables")
    p.add_argument("--table", type=int, choices=(1, 2, 3, 4), required=True)
    p.add_argument("--reps", type=_positive_int, default=5000)
    p.add_argument("--seed", type=int, default=McConfig.seed)
    p.add_argument("--n", type=_positive_int, nargs="+", default=[64, 128])
    p.add_argument("--model", choices=("ar1", "ma1"), nargs="+", default=["ar1", "ma1"])
    p.add_argument("--kernel", choices=kernels, nargs="+", default=None)
    p.add_argument("--bw-exp", type=float, nargs="+", default=None)
    p.add_argument("--stat", choices=("parametric", "far", "known"), nargs="+", default=None)
    p.add_argument("--level", type=_level, nargs="+", default=None)
    p.add_argument("--dist", choices=("gauss", "t5"), default="gauss")
    p.add_argument("--construction", choices=("exact", "entrywise_root"),
                   default="entrywise_root")
    p.add_argument("--threads", type=_positive_int, default=None,
                   help=f"worker processes (default ${THREADS_ENV} or 1)")
    p.add_argument("--out-dir", default="results")
    p.set_defaults(func=cmd_replicate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(argv)
    args.argv = argv
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(asctime)s %(levelname)s %(message)s", stream=sys.stderr)
    try:
        if getattr(args, "threads", 0) is None:
            args.threads = _default_threads()
        return args.func(args)
    except (InvalidInputError, InvalidSpecError, ConfigurationError, ValueError, OSError) as exc:
        print(f"specindep {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
