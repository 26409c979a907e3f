"""Seeded point processes: coincidence emissions and per-human pulse streams."""

from __future__ import annotations

import json
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import rng
from .geometry import HumanPlacement, LineGeometry

ENDS = ("A", "B")


@dataclass(frozen=True)
class InterventionEvent:
    human_id: int
    end: str
    t_origin: float
    template_id: int
    passes_template: bool

    def to_json(self) -> str:
        return json.dumps(
            {
                "human_id": self.human_id,
                "end": self.end,
                "t_origin": self.t_origin,
                "template_id": self.template_id,
                "passes_template": self.passes_template,
            }
        )

    @classmethod
    def from_dict(cls, d: dict) -> InterventionEvent:
        return cls(int(d["human_id"]), str(d["end"]), float(d["t_origin"]), int(d["template_id"]), bool(d["passes_template"]))


@dataclass(frozen=True)
class RateConfig:
    r_human: float = 10.0
    n_a: int = 0
    n_b: int = 0
    r_coinc: float = 0.0
    raw_pulse_multiplier: float = 3.0
    n_templates: int = 4

    def __post_init__(self) -> None:
        if min(self.r_human, self.r_coinc) < 0:
            raise ValueError("rates must be non-negative")
        if self.n_a < 0 or self.n_b < 0:
            raise ValueError("population sizes must be non-negative")
        if self.raw_pulse_multiplier < 1:
            raise ValueError("raw_pulse_multiplier must be >= 1")
        if self.n_templates < 1:
            raise ValueError("need at least one template class")

    @property
    def r_a(self) -> float:
        return self.n_a * self.r_human

    @property
    def r_b(self) -> float:
        return self.n_b * self.r_human


class InterventionStream(Sequence):
    """Immutable, time-sorted column store of intervention pulses.

    Behaves as a sequence of :class:`InterventionEvent`; the engine reads the
    numpy columns directly.
    """

    def __init__(self, human_id, end, t_origin, template_id, passes_template, *, check_sorted: bool = True):
        self.human_id = np.asarray(human_id, dtype=np.int64)
        self.end = np.asarray(end, dtype=np.int8)  # 0 = A, 1 = B
        self.t_origin = np.asarray(t_origin, dtype=np.float64)
        self.template_id = np.asarray(template_id, dtype=np.int64)
        self.passes_template = np.asarray(passes_template, dtype=bool)
        n = len(self.t_origin)
        if not all(len(c) == n for c in (self.human_id, self.end, self.template_id, self.passes_template)):
            raise ValueError("column lengths differ")
        if check_sorted and n > 1 and np.any(np.diff(self.t_origin) < 0):
            raise ValueError("intervention stream is not time-sorted")
        for col in (self.human_id, self.end, self.t_origin, self.template_id, self.passes_template):
            col.flags.writeable = False

    @classmethod
    def empty(cls) -> InterventionStream:
        return cls([], [], [], [], [])

    @classmethod
    def from_events(cls, events: Iterable[InterventionEvent]) -> InterventionStream:
        events = list(events)
        return cls(
            [e.human_id for e in events],
            [ENDS.index(e.end) for e in events],
            [e.t_origin for e in events],
            [e.template_id for e in events],
            [e.passes_template for e in events],
        )

    def __len__(self) -> int:
        return len(self.t_origin)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return self._take(np.arange(len(self))[i])
        return InterventionEvent(
            int(self.human_id[i]),
            ENDS[self.end[i]],
            float(self.t_origin[i]),
            int(self.template_id[i]),
            bool(self.passes_template[i]),
        )

    def __iter__(self) -> Iterator[InterventionEvent]:
        for i in range(len(self)):
            yield self[i]

    def __eq__(self, other) -> bool:
        if not isinstance(other, InterventionStream):
            return NotImplemented
        return all(
            np.array_equal(getattr(self, c), getattr(other, c))
            for c in ("human_id", "end", "t_origin", "template_id", "passes_template")
        )

    def _take(self, idx) -> InterventionStream:
        return InterventionStream(
            self.human_id[idx],
            self.end[idx],
            self.t_origin[idx],
            self.template_id[idx],
            self.passes_template[idx],
            check_sorted=False,
        )

    def select(self, mask: np.ndarray) -> InterventionStream:
        return self._take(np.flatnonzero(mask))

    def for_human(self, end: str, human_id: int) -> InterventionStream:
        return self.select((self.end == ENDS.index(end)) & (self.human_id == human_id))


def _merge(parts: list[tuple[np.ndarray, ...]]) -> InterventionStream:
    if not parts:
        return InterventionStream.empty()
    hid, end, t, tmpl, ok = (np.concatenate(c) for c in zip(*parts))
    order = np.lexsort((hid, end, t))
    return InterventionStream(hid[order], end[order], t[order], tmpl[order], ok[order])


def poisson_times(gen: np.random.Generator, rate: float, duration: float) -> np.ndarray:
    if rate <= 0 or duration <= 0:
        return np.empty(0)
    n = gen.poisson(rate * duration)
    return np.sort(gen.uniform(0.0, duration, n))


def generate_coincidences(r_coinc: float, duration: float, seed: int) -> np.ndarray:
    """Emission times of a homogeneous Poisson process on [0, duration)."""
    if r_coinc < 0 or duration < 0:
        raise ValueError("rate and duration must be non-negative")
    return poisson_times(rng.substream(seed, rng.COINCIDENCES), r_coinc, duration)


def default_placements(cfg: RateConfig, geom: LineGeometry, offset_a: float = 0.0, offset_b: float = 0.0,
                       delay_a: float = 0.0, delay_b: float = 0.0) -> list[HumanPlacement]:
    """Humans stacked on the line `offset` metres behind their station.

    Ids are 0..n_a-1 at A and 0..n_b-1 at B.
    """
    out = [HumanPlacement(i, "A", geom.station_a_x - offset_a, delay_a) for i in range(cfg.n_a)]
    out += [HumanPlacement(i, "B", geom.station_b_x + offset_b, delay_b) for i in range(cfg.n_b)]
    return out


def _check_population(cfg: RateConfig, placements: Sequence[HumanPlacement]) -> None:
    n_a = sum(p.end == "A" for p in placements)
    n_b = len(placements) - n_a
    if (n_a, n_b) != (cfg.n_a, cfg.n_b):
        raise ValueError(f"placements give {n_a}/{n_b} humans, config says {cfg.n_a}/{cfg.n_b}")
    keys = {(p.end, p.human_id) for p in placements}
    if len(keys) != len(placements):
        raise ValueError("duplicate (end, human_id) among placements")


def generate_interventions(cfg: RateConfig, placements: Sequence[HumanPlacement], duration: float,
                           seed: int) -> InterventionStream:
    """Independent Poisson pulse streams per human, merged and time-sorted.

    Template-passing pulses arrive at ``r_human``; raw pulses that fail every
    template arrive at ``r_human * (raw_pulse_multiplier - 1)``.  Each pulse
    carries a template class drawn uniformly from ``n_templates``.
    """
    _check_population(cfg, placements)
    raw_rate = cfg.r_human * (cfg.raw_pulse_multiplier - 1.0)
    parts = []
    for p in placements:
        gen = rng.substream(seed, rng.INTERVENTIONS, p.end, p.human_id)
        passing = poisson_times(gen, cfg.r_human, duration)
        failing = poisson_times(gen, raw_rate, duration)
        t = np.concatenate([passing, failing])
        tmpl = gen.integers(0, cfg.n_templates, len(t))
        ok = np.arange(len(t)) < len(passing)
        parts.append((np.full(len(t), p.human_id), np.full(len(t), ENDS.index(p.end)), t, tmpl, ok))
    return _merge(parts)


def machine_pulses(placements: Sequence[HumanPlacement], rate: float, duration: float) -> InterventionStream:
    """Strictly periodic pulses per agent, phase fixed by the agent id.

    A deterministic agent: nothing here is an intervention, and none of the
    pulses carries EEG structure, so none passes a template.
    """
    parts = []
    if rate > 0:
        for p in placements:
            phase = (p.human_id * 0.6180339887498949) % 1.0
            t = (np.arange(int(np.ceil(rate * duration)) + 1) + phase) / rate
            t = t[t < duration]
            n = len(t)
            parts.append((np.full(n, p.human_id), np.full(n, ENDS.index(p.end)), t,
                          np.zeros(n, dtype=np.int64), np.zeros(n, dtype=bool)))
    return _merge(parts)


def apply_template(events, template_id: int):
    """Keep only template-passing pulses of one template class, order preserved."""
    if isinstance(events, InterventionStream):
        return events.select(events.passes_template & (events.template_id == template_id))
    return [e for e in events if e.passes_template and e.template_id == template_id]


def replay_stream(recorded) -> InterventionStream:
    """Wrap a recorded stream as a drop-in source for a control run."""
    if isinstance(recorded, InterventionStream):
        t = recorded.t_origin
        if len(t) > 1 and np.any(np.diff(t) < 0):
            raise ValueError("recorded stream is not time-sorted")
        return recorded
    return InterventionStream.from_events(recorded)


def write_stream(path: str | Path, stream: Iterable[InterventionEvent]) -> None:
    with open(path, "w") as fh:
        for ev in stream:
            fh.write(ev.to_json() + "\n")


def read_stream(path: str | Path) -> InterventionStream:
    with open(path) as fh:
        events = [InterventionEvent.from_dict(json.loads(line)) for line in fh if line.strip()]
    return InterventionStream.from_events(events)
