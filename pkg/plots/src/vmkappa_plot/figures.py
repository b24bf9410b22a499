"""Figure builders over the benchmark CSVs.

All figures are batch artifacts: deterministic styling, no interactivity,
byte-identical SVG output for identical inputs.
"""

from __future__ import annotations

import statistics
from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .io import iter_fits, iter_raw, iter_summary

# fixed style: identical inputs must reproduce identical bytes
matplotlib.rcParams["svg.hashsalt"] = "vmkappa-plot"
matplotlib.rcParams["figure.dpi"] = 100

_CMAP = "viridis"


class PlotDataError(ValueError):
    """The inputs cannot produce the requested figure."""


def _save(fig, out_path: str | Path) -> Path:
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    if out_path.suffix.lower() == ".svg":
        fig.savefig(out_path, metadata={"Date": None})
    elif out_path.suffix.lower() == ".png":
        fig.savefig(out_path, metadata={"Software": None})
    else:
        raise PlotDataError(f"unsupported image format {out_path.suffix!r} (use .svg or .png)")
    plt.close(fig)
    return out_path


def error_kind_for(kappa: float) -> str:
    """Mean absolute error below 1, mean relative absolute error from 1 up."""
    return "mae" if kappa < 1.0 else "mrae"


def plot_error_curves(summary_path: str | Path, kappa: float, out_path: str | Path) -> list[str]:
    """Log-log mean error against sample size, one series per estimator.

    Returns the estimator ids plotted.  Raises PlotDataError when the
    summary has no rows at ``kappa``, naming the available values.
    """
    rows = list(iter_summary(summary_path))
    available = sorted({r.kappa for r in rows})
    selected = [r for r in rows if r.kappa == kappa]
    if not selected:
        raise PlotDataError(
            f"no rows for kappa={kappa:g}; available: {', '.join(f'{k:g}' for k in available)}"
        )
    kind = error_kind_for(kappa)

    curves: dict[str, list[tuple[int, float]]] = defaultdict(list)
    for r in selected:
        err = r.mae if kind == "mae" else r.mrae
        if err is not None and err > 0.0:
            curves[r.estimator].append((r.n, err))

    estimators = [r.estimator for r in selected]
    order = list(dict.fromkeys(estimators))
    fig, ax = plt.subplots(figsize=(7.5, 5.5))
    colors = plt.get_cmap(_CMAP)(np.linspace(0.0, 0.95, max(len(order), 2)))
    for color, estimator in zip(colors, order):
        pts = sorted(curves.get(estimator, []))
        if not pts:
            continue
        ns, errs = zip(*pts)
        ax.plot(ns, errs, marker="o", markersize=3, lw=1.2, label=estimator, color=color)
    ax.set_xscale("log", base=2)
    ax.set_yscale("log")
    ax.set_xlabel("N")
    ax.set_ylabel("MAE" if kind == "mae" else "MRAE")
    ax.set_title(f"mean {'absolute' if kind == 'mae' else 'relative absolute'} error, kappa = {kappa:g}")
    ax.grid(True, which="both", alpha=0.25)
    ax.legend(fontsize=7, ncol=2)
    fig.tight_layout()
    _save(fig, out_path)
    return [e for e in order if curves.get(e)]


_PANELS = (
    ("alpha", "slope of the log-log trend", lambda r: r.alpha, None),
    ("beta", "intercept of the log-log trend", lambda r: r.beta, None),
    ("pred_l4", "predicted log10 error at N=2^4", lambda r: r.pred_l4, None),
    ("pred_l13", "predicted log10 error at N=2^13", lambda r: r.pred_l13, None),
    ("resid_lin", "residual std of the linear fit", lambda r: r.resid_std_lin, None),
    ("gamma", "small-sample departure at N=2", lambda r: r.gamma, None),
    ("tau", "decay constant (decades of N)", lambda r: r.tau, "degenerate"),
    ("resid_decay", "residual std of the decay fit", lambda r: r.resid_std_decay, None),
)


def plot_fit_panels(fits_path: str | Path, out_dir: str | Path) -> list[Path]:
    """One heatmap per fit quantity over (estimator, kappa) cells.

    Degenerate-tau cells are crossed out on the tau panel.  Returns the
    written image paths (SVG).
    """
    rows = list(iter_fits(fits_path))
    if not rows:
        raise PlotDataError(f"{fits_path}: no fit rows")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    estimators = list(dict.fromkeys(r.estimator for r in rows))
    kappas = sorted({r.kappa for r in rows})
    # at kappa = 1 both error kinds exist; display the relative-error fit
    def pick(estimator, kappa):
        cands = [r for r in rows if r.estimator == estimator and r.kappa == kappa]
        if not cands:
            return None
        return max(cands, key=lambda r: r.error_kind)  # mrae > mae alphabetically

    written = []
    for name, title, value_of, flag in _PANELS:
        grid = np.full((len(estimators), len(kappas)), np.nan)
        flagged = []
        for i, estimator in enumerate(estimators):
            for j, kappa in enumerate(kappas):
                row = pick(estimator, kappa)
                if row is None:
                    continue
                grid[i, j] = value_of(row)
                if flag == "degenerate" and row.tau_degenerate:
                    flagged.append((i, j))
        fig, ax = plt.subplots(figsize=(6.5, 6.0))
        masked = np.ma.masked_invalid(grid)
        mesh = ax.pcolormesh(masked, cmap=_CMAP)
        fig.colorbar(mesh, ax=ax, shrink=0.85)
        for i, j in flagged:
            ax.text(j + 0.5, i + 0.5, "x", ha="center", va="center", color="red", fontsize=12)
        ax.set_xticks(np.arange(len(kappas)) + 0.5, [f"{k:g}" for k in kappas])
        ax.set_yticks(np.arange(len(estimators)) + 0.5, estimators, fontsize=7)
        ax.set_xlabel("kappa")
        ax.set_title(title)
        fig.tight_layout()
        written.append(_save(fig, out_dir / f"{name}.svg"))
    return written


def plot_timing(estimates_path: str | Path, out_path: str | Path) -> list[str]:
    """Box plots of per-call seconds against N for size-dependent estimators.

    An estimator qualifies when its median time at the largest N exceeds
    twice its median at N=2.  Failed calls are fast bail-outs rather than
    measurements of estimation cost, so only successful calls count here;
    estimators with no successful N=2 call (e.g. ones undefined there)
    are not candidates.  Returns the estimator ids plotted.
    """
    times: dict[str, dict[int, list[float]]] = defaultdict(lambda: defaultdict(list))
    any_records = False
    for r in iter_raw(estimates_path):
        any_records = True
        if not r.failed:
            times[r.estimator][r.l].append(r.seconds)
    if not any_records:
        raise PlotDataError(f"{estimates_path}: no records")

    l_max = max(l for per in times.values() for l in per)
    dependent = []
    for estimator, per in times.items():
        if 1 in per and l_max in per:
            if statistics.median(per[l_max]) > 2.0 * statistics.median(per[1]):
                dependent.append(estimator)
    if not dependent:
        raise PlotDataError("no size-dependent estimators found (median at l_max <= 2x median at l=1)")

    fig, axes = plt.subplots(
        1, len(dependent), figsize=(3.4 * len(dependent), 4.6), squeeze=False, sharey=True
    )
    for ax, estimator in zip(axes[0], dependent):
        levels = sorted(times[estimator])
        data = [np.asarray(times[estimator][l]) * 1e3 for l in levels]
        ax.boxplot(
            data,
            positions=range(len(levels)),
            whis=(25.0, 75.0),
            showfliers=False,
            medianprops={"color": "black"},
        )
        ax.set_xticks(range(len(levels)), [str(2**l) for l in levels], fontsize=7, rotation=45)
        ax.set_yscale("log")
        ax.set_xlabel("N")
        ax.set_title(estimator, fontsize=9)
    axes[0][0].set_ylabel("time per call [ms]")
    fig.tight_layout()
    _save(fig, out_path)
    return dependent
