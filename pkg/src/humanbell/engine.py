"""Event-level simulation of a human-switched Bell run.

Each end owns a :class:`SettingProcess`: a deterministic cyclic schedule plus
one cyclic advance per arriving pulse.  For every coincidence the engine reads
the actual setting at each measurement, the retarded setting (the same
trajectory with every intervention pulse removed whose light signal cannot
have reached the far measurement), and the internal flag (some template-passing
pulse changed the setting inside that window).  Outcomes come from the world
model given all four settings.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import geometry as geo
from . import rng
from .config import RunConfig
from .geometry import C, HumanPlacement, LineGeometry
from .models import Setting, world as get_world
from .planner import ExperimentPlan, LinearAlphaWarning, alpha, plan_from_geometry
from .records import RecordTable
from .sources import (
    ENDS,
    InterventionStream,
    generate_coincidences,
    generate_interventions,
    machine_pulses,
    replay_stream,
)
from .stats import TSIRELSON, INTERNAL_BOTH, InsufficientData, cell_tallies, chsh


@dataclass
class _PulseGroup:
    """Pulses sharing one lead = (far-end light arrival) - (setting change)."""

    lead: float
    change: np.ndarray  # sorted
    cum_intervention: np.ndarray  # cum_intervention[k] = #interventions among change[:k]
    pass_change: np.ndarray  # sorted change times of template-passing pulses
    pass_template: np.ndarray
    pass_origin: np.ndarray
    pass_x: np.ndarray
    pass_human: np.ndarray


class SettingProcess:
    """Piecewise-constant setting trajectory at one end.

    ``intervention[i]`` marks pulses the world cannot predict; those are the
    ones removed when forming the retarded prediction.  Interventions must be
    template-passing pulses.
    """

    def __init__(self, end: str, angles, geom: LineGeometry, placements, stream: InterventionStream,
                 intervention: np.ndarray, schedule_period: float = 0.0, switch_latency: float = 0.0):
        self.end = end
        self.angles = tuple(float(a) for a in angles)
        self.k = len(self.angles)
        self.schedule_period = float(schedule_period)
        self.switch_latency = float(switch_latency)

        mask = stream.end == ENDS.index(end)
        hid = stream.human_id[mask]
        t0 = stream.t_origin[mask]
        tmpl = stream.template_id[mask]
        passing = stream.passes_template[mask]
        interv = np.asarray(intervention, dtype=bool)[mask]
        if np.any(interv & ~passing):
            raise ValueError("only template-passing pulses can be interventions")

        by_id = {p.human_id: p for p in placements if p.end == end}
        missing = set(np.unique(hid).tolist()) - set(by_id)
        if missing:
            raise ValueError(f"stream has pulses from unplaced humans at end {end}: {sorted(missing)[:5]}")
        for p in by_id.values():
            p.check(geom)

        ids = sorted(by_id)
        id_index = np.searchsorted(np.array(ids, dtype=np.int64), hid) if len(ids) else np.zeros(0, int)
        travel = np.array([geo.switch_travel_time(geom, by_id[i]) + self.switch_latency for i in ids])
        horizon_gap = np.array([abs(geom.other_station_x(end) - by_id[i].x) / C for i in ids])
        xs = np.array([by_id[i].x for i in ids])

        change = t0 + travel[id_index] if len(t0) else np.zeros(0)
        lead = horizon_gap[id_index] - travel[id_index] if len(t0) else np.zeros(0)
        hx = xs[id_index] if len(t0) else np.zeros(0)

        order = np.argsort(change, kind="stable")
        self.change_times = change[order]
        self.origin_times = t0[order]
        self.templates = tmpl[order]
        self.passing = passing[order]
        self.intervention = interv[order]
        self.human_x = hx[order]
        self.human_ids = hid[order]
        self.leads = lead[order]

        self._groups = []
        for g in np.unique(self.leads):
            sel = self.leads == g
            ch = self.change_times[sel]
            cum = np.concatenate([[0], np.cumsum(self.intervention[sel])])
            ps = self.passing[sel]
            self._groups.append(_PulseGroup(
                float(g), ch, cum, ch[ps], self.templates[sel][ps], self.origin_times[sel][ps],
                self.human_x[sel][ps], self.human_ids[sel][ps],
            ))

    # -- trajectory --------------------------------------------------------

    def schedule_index(self, t):
        t = np.asarray(t, dtype=float)
        if self.schedule_period <= 0:
            return np.zeros(t.shape, dtype=np.int64)
        return np.floor(t / self.schedule_period).astype(np.int64) % self.k

    def actual_index(self, t):
        t = np.asarray(t, dtype=float)
        n = np.searchsorted(self.change_times, t, side="right")
        return (self.schedule_index(t) + n) % self.k

    def removed_count(self, t, t_other):
        """Interventions that changed the setting by t yet stay outside the far
        measurement's backward light cone."""
        t = np.asarray(t, dtype=float)
        t_other = np.asarray(t_other, dtype=float)
        total = np.zeros(np.broadcast(t, t_other).shape, dtype=np.int64)
        for g in self._groups:
            hi = np.searchsorted(g.change, t, side="right")
            lo = np.searchsorted(g.change, t_other - g.lead, side="right")
            total += np.maximum(0, g.cum_intervention[hi] - g.cum_intervention[np.minimum(lo, hi)])
        return total

    def retarded_index(self, t, t_other):
        return (self.actual_index(t) - self.removed_count(t, t_other)) % self.k

    def internal(self, t, t_other):
        """Latest template-passing pulse inside the internal window, per query.

        Returns (flag, template, trigger_origin_t, trigger_x, trigger_change, trigger_human).
        """
        t = np.asarray(t, dtype=float)
        t_other = np.asarray(t_other, dtype=float)
        shape = np.broadcast(t, t_other).shape
        best = np.full(shape, -np.inf)
        tmpl = np.full(shape, -1, dtype=np.int64)
        origin = np.full(shape, np.nan)
        xs = np.full(shape, np.nan)
        hum = np.full(shape, -1, dtype=np.int64)
        for g in self._groups:
            if len(g.pass_change) == 0:
                continue
            idx = np.searchsorted(g.pass_change, t, side="right") - 1
            safe = np.maximum(idx, 0)
            cand = g.pass_change[safe]
            ok = (idx >= 0) & (cand > t_other - g.lead) & (cand > best)
            best = np.where(ok, cand, best)
            tmpl = np.where(ok, g.pass_template[safe], tmpl)
            origin = np.where(ok, g.pass_origin[safe], origin)
            xs = np.where(ok, g.pass_x[safe], xs)
            hum = np.where(ok, g.pass_human[safe], hum)
        return np.isfinite(best), tmpl, origin, xs, best, hum

    def setting(self, index: int) -> Setting:
        return Setting(self.angles[index], int(index))

    def actual_setting(self, t: float) -> Setting:
        return self.setting(int(self.actual_index(t)))

    def retarded_setting(self, t: float, t_other: float) -> Setting:
        return self.setting(int(self.retarded_index(t, t_other)))


@dataclass
class RunResult:
    config: RunConfig
    records: RecordTable
    stream: InterventionStream
    summary: dict
    # trigger pulse of each internal flag, for the causality audit
    triggers: dict = field(repr=False, default_factory=dict)
    processes: tuple = field(repr=False, default=())


def _intervention_mask(stream: InterventionStream, cfg: RunConfig, predictable: bool) -> np.ndarray:
    w = get_world(cfg.world)
    if predictable or cfg.agents == "machine" or not w.humans_intervene:
        return np.zeros(len(stream), dtype=bool)
    return stream.passes_template.copy()


def effective_placements(cfg: RunConfig) -> list[HumanPlacement]:
    """Placements with switch latency folded into the equipment delay."""
    return [HumanPlacement(p.human_id, p.end, p.x, p.fixed_equipment_delay + cfg.switch_latency)
            for p in cfg.placements()]


def planned(cfg: RunConfig) -> ExperimentPlan:
    return plan_from_geometry(cfg.geometry(), effective_placements(cfg), cfg.r_human, r_coinc=cfg.r_coinc)


def run(cfg: RunConfig, stream: Optional[InterventionStream] = None, predictable: bool = False) -> RunResult:
    geom = cfg.geometry()
    placements = cfg.placements()
    rates = cfg.rates()

    if stream is None:
        if cfg.agents == "machine":
            stream = machine_pulses(placements, cfg.r_human, cfg.duration)
        else:
            stream = generate_interventions(rates, placements, cfg.duration, cfg.seed)
    interv = _intervention_mask(stream, cfg, predictable)

    proc_a = SettingProcess("A", cfg.angles_a, geom, placements, stream, interv,
                            cfg.schedule_period_a, cfg.switch_latency)
    proc_b = SettingProcess("B", cfg.angles_b, geom, placements, stream, interv,
                            cfg.schedule_period_b, cfg.switch_latency)

    emission = generate_coincidences(cfg.r_coinc, cfg.duration, cfg.seed)
    t_a = emission + geom.path_length_a / C
    t_b = emission + geom.path_length_b / C

    set_a = proc_a.actual_index(t_a)
    set_b = proc_b.actual_index(t_b)
    ret_a = (set_a - proc_a.removed_count(t_a, t_b)) % proc_a.k
    ret_b = (set_b - proc_b.removed_count(t_b, t_a)) % proc_b.k
    in_a, tm_a, org_a, x_a, ch_a, hu_a = proc_a.internal(t_a, t_b)
    in_b, tm_b, org_b, x_b, ch_b, hu_b = proc_b.internal(t_b, t_a)

    angles_a = np.asarray(cfg.angles_a)
    angles_b = np.asarray(cfg.angles_b)
    model = get_world(cfg.world).model
    out_a, out_b = model.sample(angles_a[set_a], angles_b[set_b], angles_a[ret_a], angles_b[ret_b],
                                rng.substream(cfg.seed, rng.OUTCOMES))

    n = len(emission)
    order = np.lexsort((np.arange(n), np.maximum(t_a, t_b)))
    records = RecordTable(
        pair_id=np.arange(n), emission_t=emission, t_meas_a=t_a, t_meas_b=t_b,
        setting_a=set_a, setting_b=set_b, retarded_a=ret_a, retarded_b=ret_b,
        outcome_a=out_a, outcome_b=out_b, internal_a=in_a, internal_b=in_b,
        template_a=np.where(in_a, tm_a, -1), template_b=np.where(in_b, tm_b, -1),
    ).take(order)
    triggers = {
        "a": {"t_origin": org_a[order], "x": x_a[order], "change": ch_a[order], "human": hu_a[order]},
        "b": {"t_origin": org_b[order], "x": x_b[order], "change": ch_b[order], "human": hu_b[order]},
    }
    summary = _summary(cfg, records, stream, interv)
    return RunResult(cfg, records, stream, summary, triggers, (proc_a, proc_b))


def _summary(cfg: RunConfig, records: RecordTable, stream: InterventionStream, interv: np.ndarray) -> dict:
    n = len(records)
    both = int(np.count_nonzero(records.internal_a & records.internal_b))
    sep = geo.separation_times(cfg.geometry())
    plan = planned(cfg)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", LinearAlphaWarning)
        a_lin, a_exact = alpha(plan)
    return {
        "config": cfg.to_dict(),
        "counts": {
            "records": n,
            "pulses": len(stream),
            "template_passing": int(np.count_nonzero(stream.passes_template)),
            "interventions": int(np.count_nonzero(interv)),
            "internal_a": int(np.count_nonzero(records.internal_a)),
            "internal_b": int(np.count_nonzero(records.internal_b)),
            "internal_both": both,
        },
        "empirical_alpha": both / n if n else 0.0,
        "planned_alpha": {"linear": a_lin, "exact": a_exact},
        "windows": {"tau_a_sep": sep.tau_a_sep, "tau_b_sep": sep.tau_b_sep,
                    "tau_a": plan.tau_a, "tau_b": plan.tau_b},
        "cells": cell_tallies(records),
        "cells_internal_both": cell_tallies(records, INTERNAL_BOTH),
    }


# -- controls --------------------------------------------------------------

def control_replay(cfg: RunConfig, recorded) -> RunResult:
    """Rerun with a recorded pulse stream in place of live humans.

    A recording is predictable in principle, so no pulse counts as an
    intervention: retarded settings equal actual ones everywhere.
    """
    stream = replay_stream(recorded)
    if len(stream) and (stream.t_origin.min() < 0 or stream.t_origin.max() >= cfg.duration):
        raise ValueError("recorded stream does not fit inside the run duration")
    placed = {(p.end, p.human_id) for p in cfg.placements()}
    seen = {(ENDS[e], int(h)) for e, h in zip(stream.end, stream.human_id)}
    if not seen <= placed:
        raise ValueError(f"recording has humans absent from the config: {sorted(seen - placed)[:5]}")
    return run(cfg, stream=stream, predictable=True)


def control_delay_injection(cfg: RunConfig, extra_delay: float) -> RunResult:
    if extra_delay < 0:
        raise ValueError("extra_delay must be non-negative")
    return run(cfg.replace(equipment_delay_a=cfg.equipment_delay_a + extra_delay,
                           equipment_delay_b=cfg.equipment_delay_b + extra_delay))


# -- Turing-style Bell test ------------------------------------------------

@dataclass(frozen=True)
class TuringVerdict:
    agents: str
    world: str
    verdict: str  # "passes" | "fails" | "cannot pass"
    s_full: float
    s_full_stderr: float
    s_conditioned: Optional[float]
    s_conditioned_stderr: Optional[float]
    separation_sigma: Optional[float]
    internal_both: int

    def to_dict(self) -> dict:
        return self.__dict__.copy()


def turing_bell_test(cfg: RunConfig, agents: str, quad=(0, 1, 0, 1)) -> TuringVerdict:
    """Agents pass if, on doubly-internal coincidences, they pull |S| down to
    the local bound, at least 3 sigma clear of 2*sqrt(2)."""
    res = run(cfg.replace(agents=agents))
    full = chsh(res.records, quad)
    k = res.summary["counts"]["internal_both"]
    try:
        cond = chsh(res.records, quad, INTERNAL_BOTH)
    except InsufficientData:
        return TuringVerdict(agents, cfg.world, "cannot pass", full.s, full.stderr, None, None, None, k)
    sep = (TSIRELSON - abs(cond.s)) / cond.stderr if cond.stderr > 0 else math.inf
    verdict = "passes" if abs(cond.s) <= 2.0 and sep >= 3.0 else "fails"
    return TuringVerdict(agents, cfg.world, verdict, full.s, full.stderr, cond.s, cond.stderr, sep, k)


# -- causality audit -------------------------------------------------------

def causality_audit(res: RunResult) -> dict:
    """Check every internal flag against the light cone, from scratch.

    The trigger pulse's origin event must be spacelike to the far
    measurement and its setting change must precede the local measurement.
    """
    geom = res.config.geometry()
    rec = res.records
    out = {}
    for end, flag, t_local, t_far, x_far in (
        ("a", rec.internal_a, rec.t_meas_a, rec.t_meas_b, geom.station_b_x),
        ("b", rec.internal_b, rec.t_meas_b, rec.t_meas_a, geom.station_a_x),
    ):
        trig = res.triggers[end]
        spacelike = geo.spacelike_many(trig["t_origin"][flag], trig["x"][flag], t_far[flag], x_far)
        in_time = trig["change"][flag] <= t_local[flag]
        out[end] = {"checked": int(flag.sum()), "violations": int(np.count_nonzero(~(spacelike & in_time)))}
    out["violations"] = out["a"]["violations"] + out["b"]["violations"]
    return out
