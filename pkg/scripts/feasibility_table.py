#!/usr/bin/env python3
"""Feasibility table for the three reference experiments, plus an r_human sweep."""

import argparse
import warnings

import numpy as np

from humanbell import planner, reports


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sweep-preset", default="canary2010", choices=sorted(planner.PLAN_PRESETS))
    ap.add_argument("--r-max", type=float, default=40.0, help="largest per-human rate in the sweep (Hz)")
    args = ap.parse_args()

    warnings.simplefilter("ignore", planner.LinearAlphaWarning)
    reps = [planner.report(p) for p in planner.PLAN_PRESETS.values()]
    print(reports.text_table(reports.plan_rows(reps), reports.PLAN_COLUMNS))

    base = planner.plan_preset(args.sweep_preset)
    sweep = planner.sweep(base, "r_human", np.linspace(2.5, args.r_max, 8))
    print(f"r_human sweep on {args.sweep_preset}:")
    print(reports.text_table(reports.plan_rows(sweep, "r_human"), reports.PLAN_COLUMNS))


if __name__ == "__main__":
    main()
