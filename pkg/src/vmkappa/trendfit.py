"""Trend analysis of mean-error curves.

Large-sample behavior is summarized by ordinary least squares of
log10(error) on log10(N) over N >= 2^4; small-sample departure from that
trend is modeled as an exponential decay whose amplitude gamma is the
excess at N = 2 and whose constant tau is the number of decades of N over
which the departure shrinks tenfold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

LOG10_2 = math.log10(2.0)

TAU_MIN = 0.01
TAU_MAX = 4.0

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class LinearFit:
    """log10(error) = alpha * log10(N) + beta + noise."""

    alpha: float
    beta: float
    resid_std: float


@dataclass(frozen=True)
class DecayFit:
    """Departure from a fixed linear trend: gamma * 10^(-(log10 N - log10 2)/tau)."""

    gamma: float
    tau: float
    resid_std: float
    tau_degenerate: bool = False


def error_kinds_for_kappa(kappa: float) -> tuple[str, ...]:
    """Which mean-error column(s) a concentration is fitted on.

    Absolute error below 1, relative error above 1; exactly 1 gets both.
    """
    if kappa < 1.0:
        return ("mae",)
    if kappa == 1.0:
        return ("mae", "mrae")
    return ("mrae",)


def _validate_curve(curve: Sequence[tuple[int, float]], min_points: int, min_l: int) -> tuple[np.ndarray, np.ndarray]:
    if len(curve) < min_points:
        raise ValueError(f"need at least {min_points} curve points, got {len(curve)}")
    ls = np.array([l for l, _ in curve], dtype=float)
    errs = np.array([e for _, e in curve], dtype=float)
    if np.any(ls < min_l):
        raise ValueError(f"curve levels must satisfy l >= {min_l}")
    if np.any(~np.isfinite(errs)) or np.any(errs <= 0.0):
        raise ValueError("curve errors must be finite and > 0")
    return ls, errs


def fit_linear(curve: Sequence[tuple[int, float]]) -> LinearFit:
    """OLS of log10(error) on log10(2^l) for a curve of (l, mean_error) pairs.

    The curve must cover the large-sample regime only (l >= 4) with at least
    three strictly positive error values.
    """
    ls, errs = _validate_curve(curve, min_points=3, min_l=4)
    x = ls * LOG10_2
    y = np.log10(errs)
    xm, ym = x.mean(), y.mean()
    dx = x - xm
    alpha = float(dx @ (y - ym) / (dx @ dx))
    beta = float(ym - alpha * xm)
    resid = y - (alpha * x + beta)
    resid_std = float(resid.std(ddof=1)) if len(curve) > 1 else 0.0
    return LinearFit(alpha=alpha, beta=beta, resid_std=resid_std)


def predict(linear: LinearFit, l: int) -> float:
    """Predicted log10(error) of the linear trend at N = 2^l."""
    return linear.alpha * l * LOG10_2 + linear.beta


def _decay_basis(ls: np.ndarray, tau: float) -> np.ndarray:
    return 10.0 ** (-(ls - 1.0) * LOG10_2 / tau)


def fit_decay(curve: Sequence[tuple[int, float]], linear: LinearFit) -> DecayFit:
    """Fit (gamma, tau) with the linear trend held fixed.

    For fixed tau the optimal gamma is the closed-form projection of the
    trend residuals onto the decay basis, so the search is one-dimensional:
    a scan over tau in [TAU_MIN, TAU_MAX] refined by golden section.  A
    curve lying exactly on the trend leaves tau unidentifiable; gamma is
    reported as 0 with the degeneracy flag set and tau at the scan floor.
    """
    ls, errs = _validate_curve(curve, min_points=2, min_l=1)
    r = np.log10(errs) - (linear.alpha * ls * LOG10_2 + linear.beta)

    if np.max(np.abs(r)) <= 1e-12:
        resid_std = float(r.std(ddof=1)) if len(curve) > 1 else 0.0
        return DecayFit(gamma=0.0, tau=TAU_MIN, resid_std=resid_std, tau_degenerate=True)

    def sse(tau: float) -> tuple[float, float]:
        b = _decay_basis(ls, tau)
        gamma = float(r @ b / (b @ b))
        resid = r - gamma * b
        return float(resid @ resid), gamma

    taus = np.geomspace(TAU_MIN, TAU_MAX, 241)
    values = [sse(t)[0] for t in taus]
    i = int(np.argmin(values))

    lo = math.log(taus[max(i - 1, 0)])
    hi = math.log(taus[min(i + 1, len(taus) - 1)])
    a, b = lo, hi
    h = b - a
    c = b - _GOLDEN * h
    d = a + _GOLDEN * h
    fc, _ = sse(math.exp(c))
    fd, _ = sse(math.exp(d))
    while h > 1e-10:
        if fc <= fd:
            b, d, fd = d, c, fc
            h = b - a
            c = b - _GOLDEN * h
            fc, _ = sse(math.exp(c))
        else:
            a, c, fc = c, d, fd
            h = b - a
            d = a + _GOLDEN * h
            fd, _ = sse(math.exp(d))
    tau = math.exp(0.5 * (a + b))
    best_sse, gamma = sse(tau)
    if values[i] < best_sse:
        tau = float(taus[i])
        best_sse, gamma = sse(tau)

    resid = r - gamma * _decay_basis(ls, tau)
    resid_std = float(resid.std(ddof=1)) if len(curve) > 1 else 0.0
    return DecayFit(gamma=gamma, tau=tau, resid_std=resid_std)


# ---------------------------------------------------------------------------
# Fit table over a whole benchmark summary
# ---------------------------------------------------------------------------

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


@dataclass(frozen=True)
class FitResult:
    estimator: str
    kappa: float
    error_kind: str
    linear: LinearFit
    decay: DecayFit
    pred_l4: float
    pred_l13: float


def fit_error_curves(summaries) -> list[FitResult]:
    """Both fits for every (estimator, kappa) curve in a benchmark summary.

    ``summaries`` is an iterable with estimator/kappa/n/mae/mrae attributes
    (one entry per sample size).  Groups whose error is absent (all
    replicates failed) or nonpositive are dropped point-wise; curves left
    with fewer than three large-sample points are skipped entirely.
    """
    curves: dict[tuple[str, float], dict[int, object]] = {}
    for s in summaries:
        curves.setdefault((s.estimator, s.kappa), {})[int(round(math.log2(s.n)))] = s

    results = []
    for (estimator, kappa), by_level in curves.items():
        for kind in error_kinds_for_kappa(kappa):
            pts = []
            for l in sorted(by_level):
                err = getattr(by_level[l], kind)
                if err is not None and err > 0.0:
                    pts.append((l, err))
            linear_pts = [(l, e) for l, e in pts if l >= 4]
            if len(linear_pts) < 3:
                continue
            lf = fit_linear(linear_pts)
            df = fit_decay(pts, lf)
            results.append(
                FitResult(
                    estimator=estimator,
                    kappa=kappa,
                    error_kind=kind,
                    linear=lf,
                    decay=df,
                    pred_l4=predict(lf, 4),
                    pred_l13=predict(lf, 13),
                )
            )
    return results


def write_fits_csv(results, path) -> None:
    import csv

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(FITS_HEADER)
        for r in results:
            writer.writerow(
                [
                    r.estimator,
                    format(r.kappa, ".17g"),
                    r.error_kind,
                    format(r.linear.alpha, ".17g"),
                    format(r.linear.beta, ".17g"),
                    format(r.linear.resid_std, ".17g"),
                    format(r.pred_l4, ".17g"),
                    format(r.pred_l13, ".17g"),
                    format(r.decay.gamma, ".17g"),
                    format(r.decay.tau, ".17g"),
                    "true" if r.decay.tau_degenerate else "false",
                    format(r.decay.resid_std, ".17g"),
                ]
            )


def iter_fits_csv(path):
    """Rows of a fits.csv as FitResult objects (schema-checked)."""
    import csv

    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ValueError(f"{path}: empty file")
        if tuple(header) != FITS_HEADER:
            for got, want in zip(header, FITS_HEADER):
                if got != want:
                    raise ValueError(f"{path}: unexpected column {got!r} (wanted {want!r})")
            raise ValueError(f"{path}: expected {len(FITS_HEADER)} columns")
        for row in reader:
            yield FitResult(
                estimator=row[0],
                kappa=float(row[1]),
                error_kind=row[2],
                linear=LinearFit(alpha=float(row[3]), beta=float(row[4]), resid_std=float(row[5])),
                decay=DecayFit(
                    gamma=float(row[8]),
                    tau=float(row[9]),
                    resid_std=float(row[11]),
                    tau_degenerate=row[10] == "true",
                ),
                pred_l4=float(row[6]),
                pred_l13=float(row[7]),
            )
