#!/usr/bin/env python3
"""Run the desk-scale benchmark end to end: simulate, summarize, fit, report.

Desk scale (M=200 replicates, N up to 2^10, all six concentrations, all
twelve estimators) finishes in a few minutes on a laptop.  Pass --full for
the full-scale protocol (M=1000, N up to 2^13; expect hours).
"""

import argparse
import sys
import time
from pathlib import Path

from vmkappa.cli import main as vmkappa_main


def run(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="out/desk", help="output directory")
    parser.add_argument("--full", action="store_true", help="full-scale protocol")
    parser.add_argument("--m", type=int, help="override replicate count")
    parser.add_argument("--lmax", type=int, help="override largest level")
    parser.add_argument("--seed", type=int, default=20260810)
    parser.add_argument("--jobs", type=int, default=1)
    args = parser.parse_args(argv)

    m = args.m if args.m is not None else (1000 if args.full else 200)
    lmax = args.lmax if args.lmax is not None else (13 if args.full else 10)
    out = Path(args.out)

    t0 = time.time()
    code = vmkappa_main(
        ["simulate", "--m", str(m), "--lmax", str(lmax), "--seed", str(args.seed),
         "--jobs", str(args.jobs), "--out", str(out), "--progress"]
    )
    if code:
        return code
    print(f"simulate done in {time.time() - t0:.1f}s")
    for step in (
        ["summarize", str(out / "estimates.csv")],
        ["fit", str(out / "summary.csv")],
        ["report", str(out / "summary.csv"), str(out / "fits.csv")],
    ):
        code = vmkappa_main(step)
        if code:
            return code
    return 0


if __name__ == "__main__":
    sys.exit(run())
