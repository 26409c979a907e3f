#!/usr/bin/env python3
"""Bell-experiment Turing test: human vs machine agents, in the LHV and quantum worlds."""

import argparse
import json

from humanbell import engine
from humanbell.config import RunConfig


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=8)
    ap.add_argument("--duration", type=float, default=200.0)
    args = ap.parse_args()

    for world in ("ldd-world", "quantum"):
        cfg = RunConfig(seed=args.seed, duration=args.duration, preset="canary2010", world=world,
                        n_a=100, n_b=100, r_coinc=5000.0)
        for agents in ("human", "machine"):
            v = engine.turing_bell_test(cfg, agents)
            print(json.dumps({k: v.to_dict()[k] for k in ("world", "agents", "verdict", "s_conditioned",
                                                          "separation_sigma", "internal_both")}))


if __name__ == "__main__":
    main()
