"""Command line: simulate, analyze, plan, replay, delay-inject, turing-test."""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import config as cfgmod
from . import engine, planner, reports
from .geometry import C
from .records import read_jsonl, write_jsonl
from .sources import read_stream, write_stream
from .stats import parse_condition

# flag -> RunConfig key, for the common knobs; anything else goes through --set
RUN_FLAGS = {
    "preset": str, "world": str, "duration": float, "n_a": int, "n_b": int,
    "r_human": float, "r_coinc": float, "switch_latency": float,
}


def _add_run_args(p: argparse.ArgumentParser, seed_required: bool = True) -> None:
    p.add_argument("--config", help="key = value config file (or .json)")
    p.add_argument("--seed", type=int, required=seed_required, help="master seed")
    p.add_argument("--output", "-o", help="record log path (JSON Lines)")
    for key, typ in RUN_FLAGS.items():
        p.add_argument(f"--{key.replace('_', '-')}", dest=key, type=typ)
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="any other config key")


def _load_config(args) -> cfgmod.RunConfig:
    overrides = {k: getattr(args, k) for k in RUN_FLAGS}
    overrides["seed"] = args.seed
    overrides["output"] = getattr(args, "output", None)
    for item in args.set:
        k, _, v = item.partition("=")
        overrides[k.strip()] = v
    return cfgmod.load(args.config, overrides)


def _write_run(res: engine.RunResult, output: str | None, stream_too: bool = True) -> None:
    if output is None:
        json.dump(res.summary, sys.stdout, indent=2)
        sys.stdout.write("\n")
        return
    out = Path(output)
    write_jsonl(out, res.records)
    out.with_suffix(".summary.json").write_text(json.dumps(res.summary, indent=2) + "\n")
    if stream_too:
        write_stream(out.with_suffix(".streams.jsonl"), res.stream)
    print(f"wrote {len(res.records)} records to {out}", file=sys.stderr)


def cmd_simulate(args) -> int:
    cfg = _load_config(args)
    _write_run(engine.run(cfg), cfg.output)
    return 0


def cmd_replay(args) -> int:
    cfg = _load_config(args)
    res = engine.control_replay(cfg, read_stream(args.streams))
    _write_run(res, cfg.output, stream_too=False)
    return 0


def cmd_delay_inject(args) -> int:
    cfg = _load_config(args)
    _write_run(engine.control_delay_injection(cfg, args.seconds), cfg.output)
    return 0


def cmd_turing(args) -> int:
    cfg = _load_config(args)
    if cfg.world not in ("ldd-world", "retarded-lhv") and not args.any_world:
        print(f"note: world is {cfg.world!r}; the test is designed for ldd-world", file=sys.stderr)
    verdict = engine.turing_bell_test(cfg, args.agents)
    print(json.dumps(verdict.to_dict(), indent=2))
    return 0


def cmd_analyze(args) -> int:
    records = read_jsonl(args.log)
    conditions = [parse_condition(c) for c in (args.condition or ["all"])]
    quad = tuple(int(x) for x in args.quad.split(","))
    doc = reports.analysis_document(records, conditions, quad, args.alpha)
    if args.format == "json":
        print(json.dumps(doc, indent=2))
    elif args.format == "csv":
        sys.stdout.write(reports.csv_table(doc["rows"]))
    else:
        sys.stdout.write(reports.text_table(doc["rows"], reports.CSV_COLUMNS))
        if "shift" in doc:
            sys.stdout.write("\n" + "\n".join(f"{k}: {v}" for k, v in doc["shift"].items()) + "\n")
    return 0


def _parse_sweep(text: str) -> tuple[str, list[float]]:
    name, _, rng = text.partition("=")
    start, stop, steps = rng.split(":")
    return name.strip(), list(np.linspace(float(start), float(stop), int(steps)))


def cmd_plan(args) -> int:
    fields = ("n_a", "n_b", "r_human", "tau_a", "tau_b", "t_exp_baseline", "baseline_sigma", "r_coinc")
    given = {f: getattr(args, f) for f in fields if getattr(args, f) is not None}
    if args.ctau_a is not None:
        given["tau_a"] = args.ctau_a / C
    if args.ctau_b is not None:
        given["tau_b"] = args.ctau_b / C

    if args.preset:
        plans = [replace(planner.plan_preset(args.preset), **given)]
    elif given:
        missing = {"tau_a", "tau_b"} - set(given)
        if missing:
            print(f"error: need {sorted(missing)} (or --preset)", file=sys.stderr)
            return 2
        base = dict(n_a=100, n_b=100, r_human=10.0, t_exp_baseline=1.0, baseline_sigma=1.0)
        base.update(given)
        plans = [planner.ExperimentPlan(**base)]
    else:
        plans = list(planner.PLAN_PRESETS.values())

    with warnings.catch_warnings():
        warnings.simplefilter("always", planner.LinearAlphaWarning)
        if args.sweep:
            param, values = _parse_sweep(args.sweep)
            reps = [r for p in plans for r in planner.sweep(p, param, values)]
            label = param
        else:
            reps = [planner.report(p) for p in plans]
            label = None

    rows = reports.plan_rows(reps, label)
    if args.format == "json":
        print(reports.plan_json(reps))
    elif args.format == "csv":
        sys.stdout.write(reports.csv_table(rows, reports.PLAN_COLUMNS))
    else:
        sys.stdout.write(reports.text_table(rows, reports.PLAN_COLUMNS))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="humanbell", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run the event simulation")
    _add_run_args(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("analyze", help="correlations and CHSH from a record log")
    p.add_argument("log")
    p.add_argument("--condition", action="append",
                   help="all | internal-both | external | complement | retarded=a,b | template=K (repeatable)")
    p.add_argument("--quad", default="0,1,0,1", help="setting indices a,a',b,b'")
    p.add_argument("--alpha", type=float, help="expected doubly-internal fraction; adds the shift report")
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("plan", help="feasibility numbers (alpha, T_exp^human)")
    p.add_argument("--preset", choices=sorted(planner.PLAN_PRESETS))
    p.add_argument("--n-a", dest="n_a", type=int)
    p.add_argument("--n-b", dest="n_b", type=int)
    p.add_argument("--r-human", dest="r_human", type=float)
    p.add_argument("--r-coinc", dest="r_coinc", type=float)
    p.add_argument("--tau-a", dest="tau_a", type=float, help="seconds")
    p.add_argument("--tau-b", dest="tau_b", type=float, help="seconds")
    p.add_argument("--ctau-a", dest="ctau_a", type=float, help="window as light distance, metres")
    p.add_argument("--ctau-b", dest="ctau_b", type=float, help="window as light distance, metres")
    p.add_argument("--t-exp", dest="t_exp_baseline", type=float, help="baseline run time, seconds")
    p.add_argument("--sigma", dest="baseline_sigma", type=float, help="baseline significance")
    p.add_argument("--sweep", metavar="PARAM=START:STOP:STEPS")
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("replay", help="control run driven by a recorded pulse stream")
    _add_run_args(p)
    p.add_argument("--streams", required=True, help="stream JSON Lines written by simulate")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("delay-inject", help="control run with extra headset-to-switch delay")
    _add_run_args(p)
    p.add_argument("--seconds", type=float, required=True)
    p.set_defaults(func=cmd_delay_inject)

    p = sub.add_parser("turing-test", help="Bell-experiment Turing test for an agent pair")
    _add_run_args(p)
    p.add_argument("--agents", choices=("human", "machine"), required=True)
    p.add_argument("--any-world", action="store_true", help="silence the world-model note")
    p.set_defaults(func=cmd_turing)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
