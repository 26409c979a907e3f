"""World models: rules that turn settings (actual and retarded) into +-1 outcomes.

Two models share one contract, ``sample(a, b, a_r, b_r, gen) -> (x, y)`` over
arrays of angles:

* ``QuantumModel`` - singlet statistics, E(a, b) = -cos(a - b).  Retarded
  settings are ignored.
* ``RetardedLHV`` - a local model with a flat hidden angle and half-circle
  step result functions whose offsets depend on the actual local setting and
  the retarded distant one.  It matches the quantum correlation whenever the
  retarded settings equal the actual ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Setting:
    angle: float
    index: int

    def __post_init__(self) -> None:
        if not 0.0 <= self.angle < TWO_PI:
            raise ValueError(f"setting angle {self.angle} outside [0, 2pi)")


@dataclass(frozen=True)
class SettingContext:
    a: Setting
    b: Setting
    a_r: Setting
    b_r: Setting

    @classmethod
    def matched(cls, a: Setting, b: Setting) -> SettingContext:
        return cls(a, b, a, b)


@dataclass(frozen=True)
class HiddenState:
    lam: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.lam < TWO_PI:
            raise ValueError("hidden angle outside [0, 2pi)")

    @classmethod
    def draw(cls, gen: np.random.Generator) -> HiddenState:
        return cls(float(gen.uniform(0.0, TWO_PI)))


@dataclass(frozen=True)
class OutcomePair:
    x: int
    y: int

    def __post_init__(self) -> None:
        if self.x not in (-1, 1) or self.y not in (-1, 1):
            raise ValueError("outcomes must be +-1")


# -- quantum ---------------------------------------------------------------

def quantum_sample_many(a, b, gen: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """P(x, y) = (1 - x y cos(a - b)) / 4: fair marginals, y = -x w.p. (1 + cos)/2."""
    a, b = np.broadcast_arrays(np.asarray(a, float), np.asarray(b, float))
    x = np.where(gen.random(a.shape) < 0.5, 1, -1).astype(np.int8)
    flip = gen.random(a.shape) < 0.5 * (1.0 + np.cos(a - b))
    y = np.where(flip, -x, x).astype(np.int8)
    return x, y


def quantum_sample(ctx: SettingContext, gen: np.random.Generator) -> OutcomePair:
    x, y = quantum_sample_many(ctx.a.angle, ctx.b.angle, gen)
    return OutcomePair(int(x), int(y))


def quantum_correlation(a, b):
    return -np.cos(np.asarray(a) - np.asarray(b))


# -- retarded-settings local hidden variables ------------------------------

def lhv_thetas(ctx_or_a, b=None, a_r=None, b_r=None):
    """Step offsets (theta_L, theta_R).

    Accepts a SettingContext or raw angles (scalars or arrays) in the order
    a, b, a_r, b_r.
    """
    if isinstance(ctx_or_a, SettingContext):
        ctx = ctx_or_a
        a, b, a_r, b_r = ctx.a.angle, ctx.b.angle, ctx.a_r.angle, ctx.b_r.angle
    else:
        a = ctx_or_a
    theta_l = -0.25 * math.pi * (1.0 + np.cos(np.asarray(a) - np.asarray(b_r)))
    theta_r = 0.25 * math.pi * (1.0 + np.cos(np.asarray(a_r) - np.asarray(b)))
    if np.ndim(theta_l) == 0:
        return float(theta_l), float(theta_r)
    return theta_l, theta_r


def _half_circle(lam, theta):
    # +1 on [theta, theta + pi) mod 2pi
    return np.where(np.mod(lam - theta, TWO_PI) < math.pi, 1, -1).astype(np.int8)


def lhv_outcomes_many(a, b, a_r, b_r, lam) -> tuple[np.ndarray, np.ndarray]:
    theta_l, theta_r = lhv_thetas(a, b, a_r, b_r)
    return _half_circle(lam, theta_l), _half_circle(lam, theta_r)


def lhv_outcomes(ctx: SettingContext, h: HiddenState) -> OutcomePair:
    theta_l, theta_r = lhv_thetas(ctx)
    return OutcomePair(int(_half_circle(h.lam, theta_l)), int(_half_circle(h.lam, theta_r)))


def lhv_correlation(ctx_or_a, b=None, a_r=None, b_r=None):
    """Closed form -(cos(a - b_r) + cos(a_r - b)) / 2."""
    if isinstance(ctx_or_a, SettingContext):
        ctx = ctx_or_a
        a, b, a_r, b_r = ctx.a.angle, ctx.b.angle, ctx.a_r.angle, ctx.b_r.angle
    else:
        a = ctx_or_a
    e = -0.5 * (np.cos(np.asarray(a) - np.asarray(b_r)) + np.cos(np.asarray(a_r) - np.asarray(b)))
    return float(e) if np.ndim(e) == 0 else e


def lhv_correlation_from_thetas(theta_l, theta_r):
    """E = 1 - 2|theta_R - theta_L| / pi, valid while |theta_R - theta_L| <= pi."""
    gap = np.abs(np.asarray(theta_r) - np.asarray(theta_l))
    assert np.all(gap <= math.pi + 1e-12)
    e = 1.0 - 2.0 * gap / math.pi
    return float(e) if np.ndim(e) == 0 else e


# -- world-model contract --------------------------------------------------

class QuantumModel:
    name = "quantum"

    def sample(self, a, b, a_r, b_r, gen: np.random.Generator):
        return quantum_sample_many(a, b, gen)

    def correlation(self, a, b, a_r, b_r):
        return quantum_correlation(a, b)


class RetardedLHV:
    name = "retarded-lhv"

    def sample(self, a, b, a_r, b_r, gen: np.random.Generator):
        # one fresh hidden angle per pair
        lam = gen.uniform(0.0, TWO_PI, np.shape(np.broadcast_arrays(a, b, a_r, b_r)[0]))
        return lhv_outcomes_many(a, b, a_r, b_r, lam)

    def correlation(self, a, b, a_r, b_r):
        return lhv_correlation(a, b, a_r, b_r)


@dataclass(frozen=True)
class World:
    name: str
    model: QuantumModel | RetardedLHV
    # whether template-passing human pulses are unpredictable to the model
    humans_intervene: bool = True


WORLDS: dict[str, World] = {
    "quantum": World("quantum", QuantumModel()),
    "retarded-lhv": World("retarded-lhv", RetardedLHV()),
    "ldd-world": World("ldd-world", RetardedLHV()),
    "superdet-world": World("superdet-world", RetardedLHV(), humans_intervene=False),
}


def world(name: str) -> World:
    try:
        return WORLDS[name]
    except KeyError:
        raise KeyError(f"unknown world model {name!r}; choose from {sorted(WORLDS)}") from None


def machine_retarded_prediction(process, t_local: float, t_other_meas: float) -> Setting:
    """Setting predicted at the far end from the last causally connectable state.

    ``process`` is a :class:`humanbell.engine.SettingProcess`.
    """
    return process.retarded_setting(t_local, t_other_meas)
