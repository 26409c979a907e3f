#!/usr/bin/env python3
"""CHSH violation significance against run length; should grow as sqrt(T)."""

import argparse
import math

from humanbell import engine
from humanbell.config import RunConfig
from humanbell.stats import chsh


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=700)
    ap.add_argument("--base", type=float, default=5.0, help="shortest duration, seconds")
    args = ap.parse_args()

    cfg = RunConfig(seed=args.seed, preset="canary2010", world="retarded-lhv", n_a=100, n_b=100, r_coinc=5000.0)
    ref = None
    for k in range(5):
        t = args.base * 4 ** k
        s = chsh(engine.run(cfg.replace(seed=args.seed + k, duration=t)).records)
        ref = ref or (s.sigma_violation, t)
        expected = ref[0] * math.sqrt(t / ref[1])
        print(f"T={t:8.1f} s  S={s.s:+.4f}  sigma={s.sigma_violation:7.1f}  sqrt-scaling {expected:7.1f}")


if __name__ == "__main__":
    main()
