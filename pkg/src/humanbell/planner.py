"""Closed-form feasibility numbers for human-switched Bell runs.

alpha is the fraction of coincidences with an internal template-passing pulse
at both ends.  The linear form N_A N_B r^2 tau_A tau_B holds when pulses are
rare inside a window; the exact form is the Poisson probability of at least
one pulse per window at each end.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

from .geometry import C, HumanPlacement, LineGeometry, internal_window, preset, separation_times

HOUR = 3600.0
DAY = 24 * HOUR

SWEEPABLE = ("n_a", "n_b", "r_human", "tau_a", "tau_b", "t_exp_baseline")


class DegeneratePlan(ValueError):
    pass


class LinearAlphaWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class ExperimentPlan:
    n_a: int
    n_b: int
    r_human: float
    tau_a: float
    tau_b: float
    t_exp_baseline: float
    baseline_sigma: float
    r_coinc: Optional[float] = None
    geometry: Optional[LineGeometry] = None
    name: str = "custom"

    def __post_init__(self) -> None:
        if min(self.n_a, self.n_b) < 0 or min(self.r_human, self.tau_a, self.tau_b) < 0:
            raise ValueError("populations, rates and windows must be non-negative")
        if self.geometry is not None:
            sep = separation_times(self.geometry)
            # quoted windows are round numbers; allow float slack only
            if self.tau_a > sep.tau_a_sep * (1 + 1e-9) or self.tau_b > sep.tau_b_sep * (1 + 1e-9):
                raise ValueError(f"windows ({self.tau_a}, {self.tau_b}) exceed separation times {sep}")

    @property
    def r_a(self) -> float:
        return self.n_a * self.r_human

    @property
    def r_b(self) -> float:
        return self.n_b * self.r_human


@dataclass(frozen=True)
class FeasibilityReport:
    plan: ExperimentPlan
    alpha_linear: float
    alpha_exact: float
    r_coinc_human: Optional[float]
    r_coinc_human_exact: Optional[float]
    t_exp_human: float
    t_exp_human_exact: float
    projection: dict[float, float] = field(default_factory=dict)

    def projected_sigma_at(self, t: float) -> float:
        """Significance after running t seconds with human switching."""
        return self.plan.baseline_sigma * math.sqrt(t / self.t_exp_human)


def alpha(plan: ExperimentPlan) -> tuple[float, float]:
    load_a, load_b = plan.r_a * plan.tau_a, plan.r_b * plan.tau_b
    if max(load_a, load_b) > 0.1:
        warnings.warn(
            f"r*tau = ({load_a:.3g}, {load_b:.3g}); windows overlap and the linear alpha is unreliable",
            LinearAlphaWarning,
            stacklevel=2,
        )
    linear = min(1.0, load_a * load_b)
    exact = -math.expm1(-load_a) * -math.expm1(-load_b)
    return linear, exact


def useful_rate(plan: ExperimentPlan) -> tuple[float, float]:
    if plan.r_coinc is None:
        raise ValueError("plan has no coincidence rate")
    lin, ex = alpha(plan)
    return lin * plan.r_coinc, ex * plan.r_coinc


def t_exp_human(plan: ExperimentPlan) -> tuple[float, float]:
    lin, ex = alpha(plan)
    if lin == 0 or ex == 0:
        raise DegeneratePlan("alpha is zero: no doubly-internal coincidences ever occur")
    return plan.t_exp_baseline / lin, plan.t_exp_baseline / ex


def report(plan: ExperimentPlan, horizons: Sequence[float] = (HOUR, 2 * HOUR, DAY)) -> FeasibilityReport:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", LinearAlphaWarning)
        lin, ex = alpha(plan)
    if lin > 0:
        t_lin, t_ex = t_exp_human(plan)
    else:
        t_lin = t_ex = math.inf
    rates = (lin * plan.r_coinc, ex * plan.r_coinc) if plan.r_coinc is not None else (None, None)
    proj = {h: plan.baseline_sigma * math.sqrt(h / t_lin) for h in horizons} if lin > 0 else {}
    return FeasibilityReport(plan, lin, ex, rates[0], rates[1], t_lin, t_ex, proj)


def sweep(plan: ExperimentPlan, parameter: str, values: Sequence[float]) -> list[FeasibilityReport]:
    if parameter not in SWEEPABLE:
        raise ValueError(f"cannot sweep {parameter!r}; choose from {SWEEPABLE}")
    cast = int if parameter in ("n_a", "n_b") else float
    out = [report(replace(plan, **{parameter: cast(v)})) for v in values]
    if parameter == "r_human":
        base = report(plan)
        for v, rep in zip(values, out):
            if rep.alpha_linear < 1.0 and plan.r_human > 0:
                expected = base.alpha_linear * (v / plan.r_human) ** 2
                assert math.isclose(rep.alpha_linear, expected, rel_tol=1e-9), (v, rep.alpha_linear, expected)
    return out


def plan_from_geometry(geom: LineGeometry, placements: Sequence[HumanPlacement], r_human: float,
                       t_exp_baseline: float = 1.0, baseline_sigma: float = 1.0,
                       r_coinc: Optional[float] = None, name: str = "custom") -> ExperimentPlan:
    """Plan whose windows are the mean per-human internal windows of a layout."""
    sep = separation_times(geom)
    taus = {"A": [], "B": []}
    for p in placements:
        taus[p.end].append(internal_window(geom, p, sep))
    mean = lambda xs: sum(xs) / len(xs) if xs else 0.0  # noqa: E731
    return ExperimentPlan(
        n_a=len(taus["A"]), n_b=len(taus["B"]), r_human=r_human,
        tau_a=mean(taus["A"]), tau_b=mean(taus["B"]),
        t_exp_baseline=t_exp_baseline, baseline_sigma=baseline_sigma,
        r_coinc=r_coinc, geometry=geom, name=name,
    )


def _reference_plan(name: str, ctau_a: float, ctau_b: float, t_exp: float, sigma: float,
                r_coinc: Optional[float] = None) -> ExperimentPlan:
    # 100 humans per end at 10 Hz, delays assumed negligible
    return ExperimentPlan(100, 100, 10.0, ctau_a / C, ctau_b / C, t_exp, sigma, r_coinc, preset(name), name)


PLAN_PRESETS: dict[str, ExperimentPlan] = {
    "geneva1997": _reference_plan("geneva1997", 10_900.0, 10_900.0, HOUR, 10.0),
    # ~15000 coincidences in 10 s
    "innsbruck1998": _reference_plan("innsbruck1998", 400.0, 400.0, 10.0, 30.0, r_coinc=1500.0),
    # effective windows c*tau = 6 km and 144 km for the La Palma-Tenerife link
    "canary2010": _reference_plan("canary2010", 6_000.0, 144_000.0, 600.0, 16.0),
}

D_SEP_LABEL = {"geneva1997": "10.9km", "innsbruck1998": "400m", "canary2010": "50km"}


def plan_preset(name: str) -> ExperimentPlan:
    try:
        return PLAN_PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown plan preset {name!r}; choose from {sorted(PLAN_PRESETS)}") from None


def human_duration(seconds: float) -> str:
    if not math.isfinite(seconds):
        return "never"
    for unit, size in (("months", 30 * DAY), ("days", DAY), ("hours", HOUR), ("min", 60.0)):
        if seconds >= 2 * size:
            return f"{seconds / size:.1f} {unit}"
    return f"{seconds:.3g} s"
