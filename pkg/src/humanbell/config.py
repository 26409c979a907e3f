"""Run configuration: dataclass, flat ``key = value`` files, env overrides.

File format, one assignment per line, ``#`` starts a comment::

    preset = canary2010
    world = ldd-world
    n_a = 100
    angles_a = 3pi/4, pi/4
    seed = 7

Any key may be overridden from the environment as ``HUMANBELL_<KEY>``
(upper case), e.g. ``HUMANBELL_N_A=50``.  Config files round-trip through
JSON via :meth:`RunConfig.to_dict` / :meth:`RunConfig.from_dict`.
"""

from __future__ import annotations

import dataclasses
import json
import math
import os
import re
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Mapping, Optional

from . import geometry
from .geometry import HumanPlacement, LineGeometry
from .models import WORLDS
from .sources import RateConfig, default_placements

ENV_PREFIX = "HUMANBELL_"

OPTIMAL_A = (3 * math.pi / 4, math.pi / 4)
OPTIMAL_B = (0.0, math.pi / 2)

_GEOM_KEYS = ("station_a_x", "station_b_x", "source_x", "path_length_a", "path_length_b", "signal_speed_ratio")


@dataclass(frozen=True)
class RunConfig:
    seed: int
    duration: float = 10.0
    preset: Optional[str] = "canary2010"
    station_a_x: Optional[float] = None
    station_b_x: Optional[float] = None
    source_x: Optional[float] = None
    path_length_a: Optional[float] = None
    path_length_b: Optional[float] = None
    signal_speed_ratio: Optional[float] = None
    n_a: int = 0
    n_b: int = 0
    r_human: float = 10.0
    r_coinc: float = 1000.0
    raw_pulse_multiplier: float = 3.0
    n_templates: int = 4
    human_offset_a: float = 0.0
    human_offset_b: float = 0.0
    equipment_delay_a: float = 0.0
    equipment_delay_b: float = 0.0
    world: str = "quantum"
    agents: str = "human"
    angles_a: tuple[float, ...] = OPTIMAL_A
    angles_b: tuple[float, ...] = OPTIMAL_B
    # no-intervention evolution: cyclic step every period seconds, 0 = constant
    schedule_period_a: float = 1e-3
    schedule_period_b: float = 2e-3
    switch_latency: float = 0.0
    output: Optional[str] = None

    def __post_init__(self) -> None:
        if not self.duration > 0:
            raise ValueError("duration must be positive")
        if not self.angles_a or not self.angles_b:
            raise ValueError("angle lists must be non-empty")
        for ang in (*self.angles_a, *self.angles_b):
            if not 0 <= ang < 2 * math.pi:
                raise ValueError(f"angle {ang} outside [0, 2pi)")
        if self.world not in WORLDS:
            raise ValueError(f"unknown world {self.world!r}")
        if self.agents not in ("human", "machine"):
            raise ValueError("agents must be 'human' or 'machine'")
        if min(self.schedule_period_a, self.schedule_period_b, self.switch_latency) < 0:
            raise ValueError("periods and latency must be non-negative")
        if min(self.equipment_delay_a, self.equipment_delay_b, self.human_offset_a, self.human_offset_b) < 0:
            raise ValueError("delays and offsets must be non-negative")
        self.geometry()  # validate early
        self.rates()

    def geometry(self) -> LineGeometry:
        base = geometry.preset(self.preset) if self.preset else None
        vals = {}
        for k in _GEOM_KEYS:
            v = getattr(self, k)
            if v is None:
                if base is None:
                    if k == "signal_speed_ratio":
                        v = 1.0
                    else:
                        raise ValueError(f"no preset and no value for {k}")
                else:
                    v = getattr(base, k)
            vals[k] = float(v)
        return LineGeometry(**vals)

    def rates(self) -> RateConfig:
        return RateConfig(self.r_human, self.n_a, self.n_b, self.r_coinc, self.raw_pulse_multiplier, self.n_templates)

    def placements(self) -> list[HumanPlacement]:
        return default_placements(self.rates(), self.geometry(), self.human_offset_a, self.human_offset_b,
                                  self.equipment_delay_a, self.equipment_delay_b)

    def replace(self, **changes) -> RunConfig:
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict[str, Any]:
        d = dataclasses.asdict(self)
        d["angles_a"] = list(self.angles_a)
        d["angles_b"] = list(self.angles_b)
        return d

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> RunConfig:
        known = {f.name: f for f in fields(cls)}
        unknown = set(d) - set(known)
        if unknown:
            raise ValueError(f"unknown config keys {sorted(unknown)}")
        return cls(**{k: _coerce(known[k], v) for k, v in d.items()})

    def to_text(self) -> str:
        lines = []
        for k, v in self.to_dict().items():
            if v is None:
                continue
            if isinstance(v, list):
                v = ", ".join(repr(float(x)) for x in v)
            lines.append(f"{k} = {v}")
        return "\n".join(lines) + "\n"


_PI_TERM = re.compile(r"^\s*([0-9.eE+-]*)\s*\*?\s*pi\s*(?:/\s*([0-9.eE+-]+))?\s*$")


def parse_angle(text: str) -> float:
    """Float, or a multiple of pi such as ``3pi/4`` or ``pi/2``."""
    m = _PI_TERM.match(text)
    if m:
        coef = m.group(1)
        num = {"": 1.0, "+": 1.0, "-": -1.0}.get(coef)
        num = float(coef) if num is None else num
        den = float(m.group(2)) if m.group(2) else 1.0
        return num * math.pi / den
    return float(text)


def _coerce(f: dataclasses.Field, v: Any) -> Any:
    if v is None:
        return None
    name = f.name
    if name in ("angles_a", "angles_b"):
        if isinstance(v, str):
            v = [s for s in v.split(",") if s.strip()]
        return tuple(parse_angle(x) if isinstance(x, str) else float(x) for x in v)
    if not isinstance(v, str):
        if name in ("seed", "n_a", "n_b", "n_templates"):
            return int(v)
        return v
    v = v.strip()
    if v.lower() in ("none", "null", ""):
        return None
    if name in ("seed", "n_a", "n_b", "n_templates"):
        return int(v)
    if name in ("preset", "world", "agents", "output"):
        return v
    return float(v)


def parse_text(text: str) -> dict[str, str]:
    out = {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {n}: expected 'key = value', got {raw!r}")
        k, v = line.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def env_overrides(environ: Mapping[str, str] | None = None) -> dict[str, str]:
    environ = os.environ if environ is None else environ
    names = {f.name for f in fields(RunConfig)}
    out = {}
    for k, v in environ.items():
        if k.startswith(ENV_PREFIX):
            key = k[len(ENV_PREFIX):].lower()
            if key in names:
                out[key] = v
    return out


def load(path: str | Path | None = None, overrides: Mapping[str, Any] | None = None,
         environ: Mapping[str, str] | None = None) -> RunConfig:
    """File values, then environment, then explicit overrides (e.g. CLI flags)."""
    values: dict[str, Any] = {}
    if path is not None:
        text = Path(path).read_text()
        if str(path).endswith(".json"):
            values.update(json.loads(text))
        else:
            values.update(parse_text(text))
    values.update(env_overrides(environ))
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    if "seed" not in values:
        raise ValueError("a seed is required (no silent entropy)")
    return RunConfig.from_dict(values)
