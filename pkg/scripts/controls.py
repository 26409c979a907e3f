#!/usr/bin/env python3
"""Replay and delay-injection controls on a retarded-LHV Canary run."""

import argparse

import numpy as np

from humanbell import engine
from humanbell.config import RunConfig
from humanbell.geometry import separation_times
from humanbell.stats import INTERNAL_BOTH, InsufficientData, chsh


def _line(label, res):
    s = chsh(res.records)
    try:
        si = chsh(res.records, condition=INTERNAL_BOTH)
        inner = f"{si.s:+.3f} +- {si.stderr:.3f}"
    except InsufficientData:
        inner = "   (no internal-both records)"
    frac = res.summary["empirical_alpha"]
    print(f"{label:<22} f={frac:.5f}  S_full={s.s:+.4f} +- {s.stderr:.4f}  S_internal={inner}")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=47)
    ap.add_argument("--duration", type=float, default=300.0)
    args = ap.parse_args()

    cfg = RunConfig(seed=args.seed, duration=args.duration, preset="canary2010", world="retarded-lhv",
                    n_a=100, n_b=100, r_coinc=5000.0)
    live = engine.run(cfg)
    _line("live", live)
    _line("replay", engine.control_replay(cfg, live.stream))

    sep = separation_times(cfg.geometry())
    for frac in np.linspace(0.0, 1.0, 5):
        delay = frac * max(sep.tau_a_sep, sep.tau_b_sep)
        _line(f"delay {delay * 1e6:7.1f} us", engine.control_delay_injection(cfg, delay))


if __name__ == "__main__":
    main()
