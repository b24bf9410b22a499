"""vmkappa-plot: render benchmark figures from the toolchain's CSV files.

Kinds: error_curves (summary.csv, needs --kappa), fit_panels (fits.csv,
--out is a directory), timing_box (estimates.csv).
"""

from __future__ import annotations

import argparse
import sys

from .figures import PlotDataError, plot_error_curves, plot_fit_panels, plot_timing
from .io import SchemaError


def _err(message: str) -> int:
    print(f"vmkappa-plot: error: {message}", file=sys.stderr)
    return 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="vmkappa-plot", description=__doc__)
    parser.add_argument("kind", choices=("error_curves", "fit_panels", "timing_box"))
    parser.add_argument("--in", dest="inputs", nargs="+", required=True, metavar="CSV")
    parser.add_argument("--out", required=True, help="image path (directory for fit_panels)")
    parser.add_argument("--kappa", type=float, help="concentration to plot (error_curves)")
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0

    source = args.inputs[0]
    try:
        if args.kind == "error_curves":
            if args.kappa is None:
                return _err("error_curves requires --kappa")
            series = plot_error_curves(source, args.kappa, args.out)
            print(f"{args.out}: {len(series)} series")
        elif args.kind == "fit_panels":
            written = plot_fit_panels(source, args.out)
            print(f"{args.out}: {len(written)} panels")
        else:
            estimators = plot_timing(source, args.out)
            print(f"{args.out}: {len(estimators)} size-dependent estimators "
                  f"({', '.join(estimators)})")
    except OSError as exc:
        return _err(f"cannot read {source}: {exc.strerror or exc}")
    except (SchemaError, PlotDataError) as exc:
        return _err(str(exc))
    return 0


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
