"""Monte Carlo benchmark: nested dataset generation, per-estimator timing and
failure accounting, MAE/MRAE summaries, CSV persistence."""

from __future__ import annotations

import csv
import math
import multiprocessing
from dataclasses import dataclass, field
from functools import partial
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from .estimators import ESTIMATOR_IDS, FAILURE_TAGS, EstimateOutcome, run_estimator
from .sampling import TWO_PI, TrueParams, draw_von_mises, make_rng, prefix

DEFAULT_KAPPAS = (0.0, 0.01, 0.1, 1.0, 10.0, 100.0)

RAW_HEADER = ("estimator", "kappa", "l", "N", "m", "estimate", "failure", "seconds")
SUMMARY_HEADER = (
    "estimator",
    "kappa",
    "N",
    "mae",
    "mrae",
    "n_failures",
    "n_used",
    "time_mean_ms",
    "time_std_ms",
)

_FLUSH_EVERY = 10_000
_MASK64 = (1 << 64) - 1


class SchemaError(ValueError):
    """A CSV input does not match the expected schema."""

    def __init__(self, message: str, column: str | None = None):
        super().__init__(message)
        self.column = column


def _fmt(x: float) -> str:
    return format(x, ".17g")


@dataclass
class BenchmarkConfig:
    """Scale and seeding of one benchmark run."""

    kappas: tuple[float, ...] = DEFAULT_KAPPAS
    m_replicates: int = 1000
    l_max: int = 13
    estimators: tuple[str, ...] = ESTIMATOR_IDS
    master_seed: int = 12345
    output_dir: Path = Path("out")

    def __post_init__(self):
        self.kappas = tuple(float(k) for k in self.kappas)
        self.estimators = tuple(self.estimators)
        self.output_dir = Path(self.output_dir)
        if not self.kappas:
            raise ValueError("kappas must be non-empty")
        if len(set(self.kappas)) != len(self.kappas):
            raise ValueError("kappas must be distinct")
        if any(not math.isfinite(k) or k < 0 for k in self.kappas):
            raise ValueError("kappas must be finite and >= 0")
        if self.m_replicates < 1:
            raise ValueError("m_replicates must be >= 1")
        if self.l_max < 1:
            raise ValueError("l_max must be >= 1")
        if not self.estimators:
            raise ValueError("estimators must be non-empty")
        unknown = [e for e in self.estimators if e not in ESTIMATOR_IDS]
        if unknown:
            raise ValueError(f"unknown estimators: {unknown}")


def planned_record_count(config: BenchmarkConfig) -> int:
    return len(config.kappas) * config.m_replicates * config.l_max * len(config.estimators)


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def dataset_seed(master_seed: int, kappa_index: int, replicate: int) -> int:
    """Deterministic 64-bit seed for one (kappa, replicate) dataset."""
    h = _splitmix64(master_seed & _MASK64)
    h = _splitmix64(h ^ _splitmix64(kappa_index))
    return _splitmix64(h ^ _splitmix64(replicate))


def generate_maximal_dataset(
    kappa: float, replicate_index: int, config: BenchmarkConfig
) -> tuple[TrueParams, np.ndarray]:
    """2^l_max draws with a location sampled from the dataset's own stream."""
    q = config.kappas.index(float(kappa))
    rng = make_rng(dataset_seed(config.master_seed, q, replicate_index))
    mu = float(rng.uniform(0.0, TWO_PI))
    params = TrueParams(mu=mu, kappa=float(kappa))
    return params, draw_von_mises(rng, params, 2**config.l_max)


@dataclass(frozen=True)
class ErrorRecord:
    """One estimator application with its error decomposition."""

    estimator: str
    kappa: float
    l: int
    n: int
    m: int
    estimate: float | None
    failure: str | None
    seconds: float

    @property
    def abs_error(self) -> float | None:
        if self.estimate is None:
            return None
        return abs(self.estimate - self.kappa)

    @property
    def rel_error(self) -> float | None:
        if self.estimate is None or self.kappa <= 0.0:
            return None
        return abs(self.estimate - self.kappa) / self.kappa


def _record(outcome: EstimateOutcome, kappa: float, l: int, m: int) -> ErrorRecord:
    return ErrorRecord(
        estimator=outcome.estimator,
        kappa=kappa,
        l=l,
        n=2**l,
        m=m,
        estimate=outcome.value,
        failure=outcome.failure,
        seconds=outcome.seconds,
    )


# Execution order groups the cache-light O(n) estimators ahead of the ones
# that stream large intermediates (BF2's leave-one-out loop, the O(n^2)
# medians), so each timed call reads warm data and pays only its own cost.
# Records are still emitted in the configured estimator order.
_EXEC_ORDER = (
    "jML",
    "mML",
    "BF1",
    "linear",
    "BayesEst-2-jMAP-km",
    "BayesEst-3-jMAP-km",
    "BayesEst-3-jMAP-xy",
    "MML-2",
    "MML-3",
    "BF2",
    "median-1",
    "median-2",
)


def _work_item(config: BenchmarkConfig, item: tuple[int, int]) -> list[ErrorRecord]:
    q, m = item
    kappa = config.kappas[q]
    _, full = generate_maximal_dataset(kappa, m, config)
    run_order = [e for e in _EXEC_ORDER if e in config.estimators]
    records = []
    for l in range(1, config.l_max + 1):
        sub = prefix(full, 2**l)
        outcomes = {estimator: run_estimator(estimator, sub) for estimator in run_order}
        for estimator in config.estimators:
            records.append(_record(outcomes[estimator], kappa, l, m))
    return records


def _warm_up(estimators: Iterable[str]) -> None:
    # first call per estimator triggers one-time lazy setup; keep it out of
    # the timed records
    sample = draw_von_mises(make_rng(0), TrueParams(mu=1.0, kappa=1.0), 8)
    for estimator in estimators:
        run_estimator(estimator, sample)


def record_to_row(r: ErrorRecord) -> list[str]:
    return [
        r.estimator,
        _fmt(r.kappa),
        str(r.l),
        str(r.n),
        str(r.m),
        "" if r.estimate is None else _fmt(r.estimate),
        r.failure or "",
        _fmt(r.seconds),
    ]


def run_benchmark(config: BenchmarkConfig, jobs: int = 1, progress: bool = False) -> Path:
    """Execute the full grid and stream records to <output_dir>/estimates.csv.

    Records are emitted in (kappa, replicate, level, estimator) order
    independently of ``jobs``.  On an abort, rows already buffered are
    flushed and a watermark sidecar records how many work items completed.
    """
    config.output_dir.mkdir(parents=True, exist_ok=True)
    out_path = config.output_dir / "estimates.csv"
    watermark = out_path.with_suffix(".csv.watermark")
    items = [(q, m) for q in range(len(config.kappas)) for m in range(config.m_replicates)]

    seeds = {dataset_seed(config.master_seed, q, m) for q, m in items}
    if len(seeds) != len(items):
        raise RuntimeError("dataset seed collision across the run; change master_seed")

    _warm_up(config.estimators)

    def write_all(sink, record_lists: Iterator[list[ErrorRecord]]) -> None:
        writer = csv.writer(sink, lineterminator="\n")
        writer.writerow(RAW_HEADER)
        buffered = 0
        done = 0
        try:
            for records in record_lists:
                for r in records:
                    writer.writerow(record_to_row(r))
                buffered += len(records)
                done += 1
                if buffered >= _FLUSH_EVERY:
                    sink.flush()
                    watermark.write_text(f"{done}/{len(items)} work items\n")
                    buffered = 0
                if progress and done % 50 == 0:
                    print(f"\r{done}/{len(items)} datasets", end="", flush=True)
        except BaseException:
            sink.flush()
            watermark.write_text(f"{done}/{len(items)} work items\n")
            raise
        if progress:
            print(f"\r{len(items)}/{len(items)} datasets")

    with open(out_path, "w", newline="") as sink:
        if jobs > 1:
            ctx = multiprocessing.get_context("fork")
            with ctx.Pool(jobs, initializer=_warm_up, initargs=(config.estimators,)) as pool:
                chunk = max(1, len(items) // (jobs * 8))
                write_all(sink, pool.imap(partial(_work_item, config), items, chunksize=chunk))
        else:
            write_all(sink, (_work_item(config, item) for item in items))
    if watermark.exists():
        watermark.unlink()
    return out_path


def iter_records_csv(path: Path | str) -> Iterator[ErrorRecord]:
    """Parse estimates.csv back into records, validating the schema."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise SchemaError(f"{path}: empty file")
        for got, want in zip(header, RAW_HEADER):
            if got != want:
                raise SchemaError(f"{path}: unexpected column {got!r} (wanted {want!r})", got)
        if len(header) != len(RAW_HEADER):
            raise SchemaError(f"{path}: expected {len(RAW_HEADER)} columns, got {len(header)}")
        for row in reader:
            if len(row) != len(RAW_HEADER):
                raise SchemaError(f"{path}: malformed row {row!r}")
            estimator, kappa, l, n, m, estimate, failure, seconds = row
            if failure and failure not in FAILURE_TAGS:
                raise SchemaError(f"{path}: unknown failure tag {failure!r}", "failure")
            yield ErrorRecord(
                estimator=estimator,
                kappa=float(kappa),
                l=int(l),
                n=int(n),
                m=int(m),
                estimate=float(estimate) if estimate else None,
                failure=failure or None,
                seconds=float(seconds),
            )


@dataclass
class ErrorSummary:
    """Aggregate of one (estimator, kappa, N) group, failures excluded from errors."""

    estimator: str
    kappa: float
    n: int
    mae: float | None
    mrae: float | None
    failures: dict[str, int] = field(default_factory=dict)
    n_used: int = 0
    time_mean_ms: float = 0.0
    time_std_ms: float = 0.0

    @property
    def n_failures(self) -> int:
        return sum(self.failures.values())


class _GroupAcc:
    __slots__ = ("sum_abs", "sum_rel", "n_used", "failures", "t_count", "t_mean", "t_m2")

    def __init__(self):
        self.sum_abs = 0.0
        self.sum_rel = 0.0
        self.n_used = 0
        self.failures: dict[str, int] = {}
        self.t_count = 0
        self.t_mean = 0.0
        self.t_m2 = 0.0

    def add(self, r: ErrorRecord) -> None:
        if r.failure is not None:
            self.failures[r.failure] = self.failures.get(r.failure, 0) + 1
        else:
            self.n_used += 1
            self.sum_abs += r.abs_error
            if r.rel_error is not None:
                self.sum_rel += r.rel_error
        # timing covers every call, failed or not (Welford)
        self.t_count += 1
        delta = r.seconds - self.t_mean
        self.t_mean += delta / self.t_count
        self.t_m2 += delta * (r.seconds - self.t_mean)


def summarize_errors(records: Iterable[ErrorRecord]) -> list[ErrorSummary]:
    """MAE/MRAE, failure counts and timing per (estimator, kappa, N) group."""
    groups: dict[tuple[str, float, int], _GroupAcc] = {}
    for r in records:
        key = (r.estimator, r.kappa, r.n)
        acc = groups.get(key)
        if acc is None:
            acc = groups[key] = _GroupAcc()
        acc.add(r)
    out = []
    for (estimator, kappa, n), acc in groups.items():
        mae = acc.sum_abs / acc.n_used if acc.n_used else None
        mrae = acc.sum_rel / acc.n_used if (acc.n_used and kappa > 0.0) else None
        t_std = math.sqrt(acc.t_m2 / (acc.t_count - 1)) if acc.t_count > 1 else 0.0
        out.append(
            ErrorSummary(
                estimator=estimator,
                kappa=kappa,
                n=n,
                mae=mae,
                mrae=mrae,
                failures=acc.failures,
                n_used=acc.n_used,
                time_mean_ms=acc.t_mean * 1e3,
                time_std_ms=t_std * 1e3,
            )
        )
    return out


def write_summary_csv(summaries: Iterable[ErrorSummary], path: Path | str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SUMMARY_HEADER)
        for s in summaries:
            writer.writerow(
                [
                    s.estimator,
                    _fmt(s.kappa),
                    str(s.n),
                    "" if s.mae is None else _fmt(s.mae),
                    "" if s.mrae is None else _fmt(s.mrae),
                    str(s.n_failures),
                    str(s.n_used),
                    _fmt(s.time_mean_ms),
                    _fmt(s.time_std_ms),
                ]
            )


def iter_summary_csv(path: Path | str) -> Iterator[ErrorSummary]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise SchemaError(f"{path}: empty file")
        for got, want in zip(header, SUMMARY_HEADER):
            if got != want:
                raise SchemaError(f"{path}: unexpected column {got!r} (wanted {want!r})", got)
        if len(header) != len(SUMMARY_HEADER):
            raise SchemaError(f"{path}: expected {len(SUMMARY_HEADER)} columns")
        for row in reader:
            if len(row) != len(SUMMARY_HEADER):
                raise SchemaError(f"{path}: malformed row {row!r}")
            estimator, kappa, n, mae, mrae, n_failures, n_used, t_mean, t_std = row
            yield ErrorSummary(
                estimator=estimator,
                kappa=float(kappa),
                n=int(n),
                mae=float(mae) if mae else None,
                mrae=float(mrae) if mrae else None,
                failures={"total": int(n_failures)} if int(n_failures) else {},
                n_used=int(n_used),
                time_mean_ms=float(t_mean),
                time_std_ms=float(t_std),
            )
