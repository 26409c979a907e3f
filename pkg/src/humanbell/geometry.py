"""Light-cone bookkeeping on a one-dimensional experiment line.

All stations, the pair source and the humans sit on a single spatial axis
in the earth rest frame.  Times are seconds, positions metres.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

C = 299_792_458.0  # m/s, exact


class CausalOrder(enum.Enum):
    SPACELIKE = "Spacelike"
    LIGHTLIKE_OR_TIMELIKE = "LightlikeOrTimelike"


class DegenerateGeometry(ValueError):
    """A separation window came out empty or negative."""


@dataclass(frozen=True)
class SpacetimeEvent:
    t: float
    x: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.t) and math.isfinite(self.x)):
            raise ValueError(f"non-finite event coordinates ({self.t}, {self.x})")


@dataclass(frozen=True)
class LineGeometry:
    station_a_x: float
    station_b_x: float
    source_x: float
    path_length_a: float
    path_length_b: float
    signal_speed_ratio: float = 1.0

    def __post_init__(self) -> None:
        if not self.station_a_x < self.station_b_x:
            raise ValueError("station A must sit left of station B")
        if not self.station_a_x <= self.source_x <= self.station_b_x:
            raise ValueError("source must lie between the stations")
        # small slack: presets write path lengths as round numbers
        eps = 1e-9 * max(1.0, self.distance)
        if self.path_length_a < abs(self.source_x - self.station_a_x) - eps:
            raise ValueError("path_length_a shorter than the straight-line distance")
        if self.path_length_b < abs(self.station_b_x - self.source_x) - eps:
            raise ValueError("path_length_b shorter than the straight-line distance")
        if self.signal_speed_ratio < 1.0:
            raise ValueError("signal_speed_ratio must be >= 1")

    @property
    def distance(self) -> float:
        return self.station_b_x - self.station_a_x

    def station_x(self, end: str) -> float:
        return self.station_a_x if end == "A" else self.station_b_x

    def other_station_x(self, end: str) -> float:
        return self.station_b_x if end == "A" else self.station_a_x

    @classmethod
    def symmetric(cls, distance: float, signal_speed_ratio: float = 1.0) -> LineGeometry:
        """Source midway, free-space paths of half the separation each."""
        half = distance / 2.0
        return cls(0.0, distance, half, half, half, signal_speed_ratio)


@dataclass(frozen=True)
class SeparationTimes:
    tau_a_sep: float
    tau_b_sep: float

    def for_end(self, end: str) -> float:
        return self.tau_a_sep if end == "A" else self.tau_b_sep


@dataclass(frozen=True)
class HumanPlacement:
    human_id: int
    end: str
    x: float
    fixed_equipment_delay: float = 0.0

    def __post_init__(self) -> None:
        if self.end not in ("A", "B"):
            raise ValueError(f"end must be 'A' or 'B', got {self.end!r}")
        if self.fixed_equipment_delay < 0:
            raise ValueError("fixed_equipment_delay must be >= 0")

    def check(self, geom: LineGeometry) -> None:
        if self.end == "A" and self.x > geom.station_a_x:
            raise ValueError(f"human {self.human_id} at end A is not behind station A")
        if self.end == "B" and self.x < geom.station_b_x:
            raise ValueError(f"human {self.human_id} at end B is not behind station B")


PRESETS: dict[str, LineGeometry] = {
    # fibre link, source between Bellevue and Bernex
    "geneva1997": LineGeometry.symmetric(10_900.0),
    "innsbruck1998": LineGeometry.symmetric(400.0),
    # source at La Palma next to A, 6 km fibre coil to A, 144 km free space to B
    "canary2010": LineGeometry(0.0, 144_000.0, 0.0, 6_000.0, 144_000.0),
}


def preset(name: str) -> LineGeometry:
    try:
        return PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown geometry preset {name!r}; choose from {sorted(PRESETS)}") from None


def causal_order(e1: SpacetimeEvent, e2: SpacetimeEvent) -> CausalOrder:
    # boundary ties are never counted as spacelike
    if abs(e1.x - e2.x) > C * abs(e1.t - e2.t):
        return CausalOrder.SPACELIKE
    return CausalOrder.LIGHTLIKE_OR_TIMELIKE


def spacelike_many(t1, x1, t2, x2):
    """Vectorised form of ``causal_order(...) is SPACELIKE``."""
    return np.abs(np.asarray(x1) - np.asarray(x2)) > C * np.abs(np.asarray(t1) - np.asarray(t2))


def measurement_events(geom: LineGeometry, emission_t: float) -> tuple[SpacetimeEvent, SpacetimeEvent]:
    return (
        SpacetimeEvent(emission_t + geom.path_length_a / C, geom.station_a_x),
        SpacetimeEvent(emission_t + geom.path_length_b / C, geom.station_b_x),
    )


def light_cone_cut(measurement: SpacetimeEvent, x: float) -> SpacetimeEvent:
    """Where the backward light cone of `measurement` crosses the worldline at `x`."""
    return SpacetimeEvent(measurement.t - abs(measurement.x - x) / C, x)


def separation_times(geom: LineGeometry, emission_t: float = 0.0) -> SeparationTimes:
    """tau_sep at each end: from the point p on that station's worldline hit by
    the other measurement's backward light cone, up to the local measurement."""
    meas_a, meas_b = measurement_events(geom, emission_t)
    p_a = light_cone_cut(meas_b, geom.station_a_x)
    p_b = light_cone_cut(meas_a, geom.station_b_x)
    sep = SeparationTimes(meas_a.t - p_a.t, meas_b.t - p_b.t)
    if sep.tau_a_sep <= 0 or sep.tau_b_sep <= 0:
        raise DegenerateGeometry(f"no separation window: {sep}")
    return sep


def signal_delay(geom: LineGeometry, placement: HumanPlacement) -> float:
    """Delay a human's pulse accrues beyond what the light cone already allows.

    On the line behind a station, the backward light cone from the far
    measurement reaches the human earlier by exactly the light travel time
    to the station, so only equipment delay and the slow-radio excess count.
    """
    dist = abs(geom.station_x(placement.end) - placement.x)
    return placement.fixed_equipment_delay + (geom.signal_speed_ratio - 1.0) * dist / C


def internal_window(geom: LineGeometry, placement: HumanPlacement, sep: SeparationTimes) -> float:
    placement.check(geom)
    return max(0.0, sep.for_end(placement.end) - signal_delay(geom, placement))


def switch_travel_time(geom: LineGeometry, placement: HumanPlacement) -> float:
    """Origin-to-switch time for a pulse: equipment plus radio link."""
    dist = abs(geom.station_x(placement.end) - placement.x)
    return placement.fixed_equipment_delay + geom.signal_speed_ratio * dist / C


def frame_separation_report(geom: LineGeometry) -> dict[str, float]:
    """Station separation in the frame where the two measurements are simultaneous.

    Only a report; the simulation runs in the earth frame throughout.
    """
    meas_a, meas_b = measurement_events(geom, 0.0)
    dt = meas_b.t - meas_a.t
    dx = meas_b.x - meas_a.x
    if abs(C * dt) >= abs(dx):
        raise DegenerateGeometry("measurements are not spacelike separated")
    return {
        "earth_frame_distance_m": dx,
        "time_offset_s": dt,
        "simultaneous_frame_distance_m": math.sqrt(dx * dx - (C * dt) ** 2),
        "boost_velocity_over_c": C * dt / dx,
    }
