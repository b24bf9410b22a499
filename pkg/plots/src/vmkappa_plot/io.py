"""Schema-checked readers for the three benchmark CSV formats.

The schemas are the file contract with the benchmark toolchain; headers
must match exactly and mismatches are reported by column name.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

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
FITS_HEADER = (
    "estimator",
    "kappa",
    "error_kind",
    "alpha",
    "beta",
    "resid_std_lin",
    "pred_l4",
    "pred_l13",
    "gamma",
    "tau",
    "tau_degenerate",
    "resid_std_decay",
)


class SchemaError(ValueError):
    """A CSV does not match the expected benchmark schema."""


def _check_header(path, header, expected) -> None:
    if header is None:
        raise SchemaError(f"{path}: empty file")
    for got, want in zip(header, expected):
        if got != want:
            raise SchemaError(f"{path}: unexpected column {got!r} (wanted {want!r})")
    if len(header) != len(expected):
        raise SchemaError(f"{path}: expected {len(expected)} columns, got {len(header)}")


@dataclass(frozen=True)
class RawRow:
    estimator: str
    kappa: float
    l: int
    n: int
    failed: bool
    seconds: float


@dataclass(frozen=True)
class SummaryRow:
    estimator: str
    kappa: float
    n: int
    mae: float | None
    mrae: float | None


@dataclass(frozen=True)
class FitRow:
    estimator: str
    kappa: float
    error_kind: str
    alpha: float
    beta: float
    resid_std_lin: float
    pred_l4: float
    pred_l13: float
    gamma: float
    tau: float
    tau_degenerate: bool
    resid_std_decay: float


def iter_raw(path: str | Path) -> Iterator[RawRow]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        _check_header(path, next(reader, None), RAW_HEADER)
        for row in reader:
            yield RawRow(
                estimator=row[0],
                kappa=float(row[1]),
                l=int(row[2]),
                n=int(row[3]),
                failed=bool(row[6]),
                seconds=float(row[7]),
            )


def iter_summary(path: str | Path) -> Iterator[SummaryRow]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        _check_header(path, next(reader, None), SUMMARY_HEADER)
        for row in reader:
            yield SummaryRow(
                estimator=row[0],
                kappa=float(row[1]),
                n=int(row[2]),
                mae=float(row[3]) if row[3] else None,
                mrae=float(row[4]) if row[4] else None,
            )


def iter_fits(path: str | Path) -> Iterator[FitRow]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        _check_header(path, next(reader, None), FITS_HEADER)
        for row in reader:
            yield FitRow(
                estimator=row[0],
                kappa=float(row[1]),
                error_kind=row[2],
                alpha=float(row[3]),
                beta=float(row[4]),
                resid_std_lin=float(row[5]),
                pred_l4=float(row[6]),
                pred_l13=float(row[7]),
                gamma=float(row[8]),
                tau=float(row[9]),
                tau_degenerate=row[10] == "true",
                resid_std_decay=float(row[11]),
            )
