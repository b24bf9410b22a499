"""Circular summary statistics: resultant length, mean direction, circular
median, and wrapped deviations."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .sampling import TWO_PI

# Below this resultant length the mean direction is numerically meaningless
# (antipodal cancellation); it is reported as 0 with the degenerate flag set.
DEGENERATE_RESULTANT = 1e-15


@dataclass(frozen=True)
class CircularSummary:
    """First trigonometric moment of a sample.

    ``sum_cos``/``sum_sin`` are kept exactly so that leave-one-out resultants
    can be formed without touching the raw angles again.
    """

    n: int
    rbar: float
    mean_dir: float
    sum_cos: float
    sum_sin: float
    degenerate: bool = False


def _as_angles(sample) -> np.ndarray:
    x = np.asarray(sample, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("sample must be a non-empty 1-d array of angles")
    return x


def resultant_to_polar(sum_cos: float, sum_sin: float, n: int) -> tuple[float, float, bool]:
    """(rbar, mean_dir, degenerate) from exact trigonometric sums."""
    rbar = math.hypot(sum_cos, sum_sin) / n
    if rbar < DEGENERATE_RESULTANT:
        return 0.0, 0.0, True
    rbar = min(rbar, 1.0)
    mean_dir = math.atan2(sum_sin, sum_cos) % TWO_PI
    if mean_dir >= TWO_PI:
        mean_dir = 0.0
    return rbar, mean_dir, False


def summarize(sample) -> CircularSummary:
    """Resultant length and mean direction of a sample of angles."""
    x = _as_angles(sample)
    if _kernels.HAVE_NUMBA:
        sum_cos, sum_sin = _kernels.resultant_sums(np.ascontiguousarray(x))
    else:
        sum_cos = float(np.cos(x).sum())
        sum_sin = float(np.sin(x).sum())
    rbar, mean_dir, degenerate = resultant_to_polar(sum_cos, sum_sin, x.size)
    return CircularSummary(
        n=x.size,
        rbar=rbar,
        mean_dir=mean_dir,
        sum_cos=sum_cos,
        sum_sin=sum_sin,
        degenerate=degenerate,
    )


def mean_arc_deviation(sample, center: float) -> float:
    """Mean shortest angular distance from ``center`` to the sample."""
    x = _as_angles(sample)
    d = np.abs(x - center) % TWO_PI
    return float(np.minimum(d, TWO_PI - d).mean())


def circular_median(sample) -> float:
    """Angle minimizing the mean arc deviation, searched over data points.

    The deviation is piecewise linear in the candidate angle with upward
    kinks exactly at data points, so restricting the search to them is
    lossless.  Ties are broken by the smallest angle.
    """
    x = _as_angles(sample)
    n = x.size
    totals = np.empty(n)
    # pairwise arc distances, chunked so each block stays cache-sized
    chunk = max(1, 32_768 // n)
    for start in range(0, n, chunk):
        cand = x[start : start + chunk]
        d = np.abs(cand[:, None] - x[None, :])
        np.minimum(d, TWO_PI - d, out=d)
        totals[start : start + chunk] = d.mean(axis=1)
    best = totals.min()
    return float(x[totals == best].min())


def rotated_deviations(sample, center: float) -> np.ndarray:
    """(x - center) wrapped into (-pi, pi] for every angle in the sample."""
    x = _as_angles(sample)
    d = np.mod(x - center, TWO_PI)
    return np.where(d > math.pi, d - TWO_PI, d)
