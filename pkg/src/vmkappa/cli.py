"""Command line: estimate on a file of angles, run the benchmark, summarize,
fit trends, and print report tables.

Exit codes: 0 success, 1 usage or I/O problem, 2 every requested estimator
failed (estimate subcommand only).
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import fields as dataclass_fields
from pathlib import Path

from . import trendfit
from .estimators import ESTIMATOR_IDS, run_estimator
from .harness import (
    BenchmarkConfig,
    SchemaError,
    iter_records_csv,
    iter_summary_csv,
    planned_record_count,
    run_benchmark,
    summarize_errors,
    write_summary_csv,
)
from .sampling import TWO_PI

OUTPUT_DIR_ENV = "VMKAPPA_OUT"

_CONFIG_KEYS = {f.name for f in dataclass_fields(BenchmarkConfig)}


class _Parser(argparse.ArgumentParser):
    # usage errors exit 1 (argparse defaults to 2)
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


def _err(message: str) -> int:
    print(f"vmkappa: error: {message}", file=sys.stderr)
    return 1


def _split_tokens(values: list[str]) -> list[str]:
    out = []
    for v in values:
        out.extend(t for t in v.split(",") if t)
    return out


def _read_angle_file(path: str, degrees: bool) -> list[float]:
    angles = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            try:
                value = float(text)
            except ValueError:
                raise ValueError(f"{path}:{lineno}: not a number: {text!r}") from None
            if degrees:
                value = math.radians(value)
            angles.append(value % TWO_PI)
    if not angles:
        raise ValueError(f"{path}: no angles found")
    return angles


def cmd_estimate(args) -> int:
    try:
        angles = _read_angle_file(args.input, args.degrees)
    except OSError as exc:
        return _err(f"cannot read {args.input}: {exc.strerror or exc}")
    except ValueError as exc:
        return _err(str(exc))

    requested = _split_tokens(args.estimators) if args.estimators else list(ESTIMATOR_IDS)
    unknown = [e for e in requested if e not in ESTIMATOR_IDS]
    if unknown:
        return _err(
            f"unknown estimator(s) {', '.join(unknown)}; valid ids: {', '.join(ESTIMATOR_IDS)}"
        )

    sep = "," if args.format == "csv" else "\t"
    any_ok = False
    for estimator in requested:
        outcome = run_estimator(estimator, angles)
        if outcome.failed:
            print(f"{estimator}{sep}{outcome.failure}")
        else:
            any_ok = True
            print(f"{estimator}{sep}{format(outcome.value, '.17g')}")
    return 0 if any_ok else 2


def _parse_config_file(path: str) -> dict:
    raw: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            if "=" not in text:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {text!r}")
            key, _, value = text.partition("=")
            key = key.strip()
            if key not in _CONFIG_KEYS:
                raise ValueError(
                    f"{path}:{lineno}: unknown key {key!r}; valid keys: {', '.join(sorted(_CONFIG_KEYS))}"
                )
            raw[key] = value.strip()
    out: dict = {}
    if "kappas" in raw:
        out["kappas"] = tuple(float(t) for t in raw["kappas"].replace(",", " ").split())
    if "m_replicates" in raw:
        out["m_replicates"] = int(raw["m_replicates"])
    if "l_max" in raw:
        out["l_max"] = int(raw["l_max"])
    if "estimators" in raw:
        out["estimators"] = tuple(raw["estimators"].replace(",", " ").split())
    if "master_seed" in raw:
        out["master_seed"] = int(raw["master_seed"])
    if "output_dir" in raw:
        out["output_dir"] = Path(raw["output_dir"])
    return out


def _build_config(args) -> tuple[BenchmarkConfig, bool]:
    """(config, have_output_dir) from config file, flags and environment."""
    settings: dict = {}
    if args.config:
        settings.update(_parse_config_file(args.config))
    if args.kappas:
        settings["kappas"] = tuple(float(t) for t in _split_tokens(args.kappas))
    if args.m is not None:
        settings["m_replicates"] = args.m
    if args.lmax is not None:
        settings["l_max"] = args.lmax
    if args.estimators:
        settings["estimators"] = tuple(_split_tokens(args.estimators))
    if args.seed is not None:
        settings["master_seed"] = args.seed
    have_out = True
    if args.out:
        settings["output_dir"] = Path(args.out)
    elif "output_dir" not in settings:
        env = os.environ.get(OUTPUT_DIR_ENV)
        if env:
            settings["output_dir"] = Path(env)
        else:
            have_out = False
    return BenchmarkConfig(**settings), have_out


def cmd_simulate(args) -> int:
    try:
        config, have_out = _build_config(args)
    except (OSError, ValueError) as exc:
        return _err(str(exc))
    if args.dry_run:
        print(planned_record_count(config))
        return 0
    if not have_out:
        return _err(f"output directory required (--out flag or {OUTPUT_DIR_ENV})")
    path = run_benchmark(config, jobs=args.jobs, progress=args.progress)
    print(path)
    return 0


def _sibling(input_path: str, out_flag: str | None, default_name: str) -> Path:
    if out_flag:
        return Path(out_flag)
    return Path(input_path).parent / default_name


def cmd_summarize(args) -> int:
    out_path = _sibling(args.input, args.out, "summary.csv")
    try:
        summaries = summarize_errors(iter_records_csv(args.input))
    except OSError as exc:
        return _err(f"cannot read {args.input}: {exc.strerror or exc}")
    except SchemaError as exc:
        return _err(str(exc))
    write_summary_csv(summaries, out_path)
    print(out_path)
    return 0


def cmd_fit(args) -> int:
    out_path = _sibling(args.input, args.out, "fits.csv")
    try:
        summaries = list(iter_summary_csv(args.input))
    except OSError as exc:
        return _err(f"cannot read {args.input}: {exc.strerror or exc}")
    except SchemaError as exc:
        return _err(str(exc))
    results = trendfit.fit_error_curves(summaries)
    if not results:
        return _err("no fittable curves: need l >= 4 levels with at least 3 positive mean errors")
    trendfit.write_fits_csv(results, out_path)
    print(out_path)
    return 0


def cmd_report(args) -> int:
    try:
        summaries = list(iter_summary_csv(args.summary))
        fits = list(trendfit.iter_fits_csv(args.fits)) if args.fits else []
    except OSError as exc:
        return _err(f"cannot read input: {exc.strerror or exc}")
    except (SchemaError, ValueError) as exc:
        return _err(str(exc))

    def fmt(v, digits=4):
        return "-" if v is None else f"{v:.{digits}g}"

    estimators = []
    for s in summaries:
        if s.estimator not in estimators:
            estimators.append(s.estimator)
    for estimator in estimators:
        rows = [s for s in summaries if s.estimator == estimator]
        print(f"== {estimator} ==")
        print(f"{'kappa':>8} {'N':>6} {'MAE':>12} {'MRAE':>12} {'fail':>6} {'used':>6} {'time[ms]':>18}")
        for s in sorted(rows, key=lambda s: (s.kappa, s.n)):
            time_col = f"{s.time_mean_ms:.3g} +/- {s.time_std_ms:.3g}"
            print(
                f"{s.kappa:>8g} {s.n:>6d} {fmt(s.mae):>12} {fmt(s.mrae):>12} "
                f"{s.n_failures:>6d} {s.n_used:>6d} {time_col:>18}"
            )
        print()
    if fits:
        print("== trend fits ==")
        print(
            f"{'estimator':>20} {'kappa':>8} {'kind':>5} {'alpha':>9} {'beta':>9} "
            f"{'gamma':>9} {'tau':>9} {'degen':>6}"
        )
        for f in fits:
            print(
                f"{f.estimator:>20} {f.kappa:>8g} {f.error_kind:>5} {f.linear.alpha:>9.3g} "
                f"{f.linear.beta:>9.3g} {f.decay.gamma:>9.3g} {f.decay.tau:>9.3g} "
                f"{'yes' if f.decay.tau_degenerate else 'no':>6}"
            )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="vmkappa", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_est = sub.add_parser("estimate", help="run estimators on a file of angles")
    p_est.add_argument("input", help="text file, one angle per line (# comments allowed)")
    p_est.add_argument("--estimators", nargs="+", metavar="ID", help="subset of estimator ids")
    p_est.add_argument("--degrees", action="store_true", help="input angles are in degrees")
    p_est.add_argument("--format", choices=("tsv", "csv"), default="tsv")
    p_est.set_defaults(func=cmd_estimate)

    p_sim = sub.add_parser("simulate", help="run the Monte Carlo benchmark")
    p_sim.add_argument("--kappas", nargs="+", metavar="K")
    p_sim.add_argument("--m", type=int, help="replicates per kappa")
    p_sim.add_argument("--lmax", type=int, help="largest level; N_max = 2^lmax")
    p_sim.add_argument("--estimators", nargs="+", metavar="ID")
    p_sim.add_argument("--seed", type=int, help="master seed")
    p_sim.add_argument("--out", help="output directory for estimates.csv")
    p_sim.add_argument("--jobs", type=int, default=1, help="worker processes")
    p_sim.add_argument("--config", help="key=value config file; flags override")
    p_sim.add_argument("--dry-run", action="store_true", help="print planned record count")
    p_sim.add_argument("--progress", action="store_true")
    p_sim.set_defaults(func=cmd_simulate)

    p_sum = sub.add_parser("summarize", help="aggregate estimates.csv into summary.csv")
    p_sum.add_argument("input", help="estimates.csv from simulate")
    p_sum.add_argument("--out", help="summary.csv path (default: next to input)")
    p_sum.set_defaults(func=cmd_summarize)

    p_fit = sub.add_parser("fit", help="fit error trends from summary.csv")
    p_fit.add_argument("input", help="summary.csv from summarize")
    p_fit.add_argument("--out", help="fits.csv path (default: next to input)")
    p_fit.set_defaults(func=cmd_fit)

    p_rep = sub.add_parser("report", help="print text tables from summary/fits CSVs")
    p_rep.add_argument("summary", help="summary.csv")
    p_rep.add_argument("fits", nargs="?", help="fits.csv (optional)")
    p_rep.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    return args.func(args)


def entrypoint() -> None:
    try:
        sys.exit(main())
    except BrokenPipeError:
        # downstream consumer (e.g. head) closed the pipe; not an error
        sys.stderr.close()
        sys.exit(0)


if __name__ == "__main__":
    entrypoint()
