import math
import warnings
from dataclasses import replace

import pytest
from hypothesis import given
from hypothesis import strategies as st

from humanbell.geometry import C, HumanPlacement, LineGeometry, preset
from humanbell.planner import (
    DAY,
    HOUR,
    PLAN_PRESETS,
    DegeneratePlan,
    ExperimentPlan,
    LinearAlphaWarning,
    alpha,
    human_duration,
    plan_from_geometry,
    plan_preset,
    report,
    sweep,
    t_exp_human,
    useful_rate,
)


def _quiet_alpha(plan):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", LinearAlphaWarning)
        return alpha(plan)


def _plan(**kw):
    base = dict(n_a=100, n_b=100, r_human=10.0, tau_a=1e-6, tau_b=1e-6, t_exp_baseline=10.0, baseline_sigma=5.0)
    base.update(kw)
    return ExperimentPlan(**base)


def test_geneva_alpha():
    lin, ex = _quiet_alpha(plan_preset("geneva1997"))
    assert lin == pytest.approx(1.3219e-3, rel=1e-3)
    assert ex <= lin


def test_innsbruck_alpha():
    lin, _ = _quiet_alpha(plan_preset("innsbruck1998"))
    assert lin == pytest.approx(1.7803e-6, rel=1e-3)


def test_canary_alpha():
    lin, _ = _quiet_alpha(plan_preset("canary2010"))
    assert lin == pytest.approx(9.613e-3, rel=1e-3)


def test_geneva_t_exp_human():
    t_lin, _ = t_exp_human(plan_preset("geneva1997"))
    assert t_lin / HOUR == pytest.approx(756.5, rel=1e-3)


def test_canary_t_exp_human():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", LinearAlphaWarning)
        t_lin, t_ex = t_exp_human(plan_preset("canary2010"))
    assert t_lin == pytest.approx(6.24e4, rel=1e-2)
    assert t_ex > t_lin


def test_canary_warns_linear_form():
    with pytest.warns(LinearAlphaWarning):
        alpha(plan_preset("canary2010"))


def test_geneva_does_not_warn():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        alpha(plan_preset("geneva1997"))


@given(st.integers(0, 300), st.integers(0, 300), st.floats(0, 50), st.floats(0, 1e-3), st.floats(0, 1e-3))
def test_exact_never_exceeds_linear(n_a, n_b, r, ta, tb):
    lin, ex = _quiet_alpha(_plan(n_a=n_a, n_b=n_b, r_human=r, tau_a=ta, tau_b=tb))
    assert 0.0 <= ex <= min(1.0, lin) * (1 + 1e-12) + 1e-300


@given(st.floats(1e-6, 0.005), st.floats(1e-6, 0.005))
def test_rare_limit_ratio(load_a, load_b):
    p = _plan(n_a=1, n_b=1, r_human=1.0, tau_a=load_a, tau_b=load_b)
    lin, ex = _quiet_alpha(p)
    assert 1.0 <= lin / ex <= 1.01


def test_linear_alpha_capped():
    lin, ex = _quiet_alpha(_plan(tau_a=1.0, tau_b=1.0))
    assert lin == 1.0 and ex == pytest.approx(1.0)


def test_degenerate_plan():
    with pytest.raises(DegeneratePlan):
        t_exp_human(_plan(n_a=0))
    rep = report(_plan(n_b=0))
    assert math.isinf(rep.t_exp_human) and rep.projection == {}


def test_useful_rate():
    assert useful_rate(_plan(n_a=0, r_coinc=100.0)) == (0.0, 0.0)
    p = _plan(n_a=1, n_b=1, r_human=1.0, tau_a=0.1, tau_b=0.1, r_coinc=100.0)
    assert useful_rate(p)[0] == pytest.approx(1.0)
    with pytest.raises(ValueError):
        useful_rate(_plan())


@given(st.floats(1e-7, 1e-4), st.floats(1e-7, 1e-4), st.floats(1.0, 1e4))
def test_coincidence_budget_identity(ta, tb, rc):
    p = _plan(tau_a=ta, tau_b=tb, r_coinc=rc)
    lin, ex = useful_rate(p)
    t_lin, t_ex = t_exp_human(p)
    assert t_lin * lin == pytest.approx(p.t_exp_baseline * rc, rel=1e-9)
    assert t_ex * ex == pytest.approx(p.t_exp_baseline * rc, rel=1e-9)


def test_sweep_r_human_quadratic():
    base = plan_preset("geneva1997")
    reps = sweep(base, "r_human", [10.0, 20.0])
    assert reps[1].alpha_linear / reps[0].alpha_linear == pytest.approx(4.0)


def test_sweep_n_a_linear():
    reps = sweep(plan_preset("geneva1997"), "n_a", [100, 200])
    assert reps[1].alpha_linear / reps[0].alpha_linear == pytest.approx(2.0)
    assert isinstance(reps[1].plan.n_a, int)


def test_sweep_empty_and_unknown():
    assert sweep(plan_preset("geneva1997"), "tau_a", []) == []
    with pytest.raises(ValueError):
        sweep(plan_preset("geneva1997"), "geometry", [1])


@pytest.mark.parametrize("param", ["n_a", "n_b", "r_human", "tau_a", "tau_b"])
def test_t_exp_human_monotone(param):
    base = _plan()
    vals = [getattr(base, param) * k for k in (1, 2, 3)]
    vals = [int(v) for v in vals] if param.startswith("n_") else vals
    t = [r.t_exp_human for r in sweep(base, param, vals)]
    assert t[0] > t[1] > t[2]
    t_ex = [r.t_exp_human_exact for r in sweep(base, param, vals)]
    assert t_ex[0] > t_ex[1] > t_ex[2]


def test_windows_must_fit_geometry():
    g = preset("innsbruck1998")
    with pytest.raises(ValueError):
        _plan(tau_a=500 / C, tau_b=400 / C, geometry=g)
    with pytest.raises(ValueError):
        _plan(n_a=-1)


def test_projection_table():
    rep = report(plan_preset("geneva1997"))
    assert set(rep.projection) == {HOUR, 2 * HOUR, DAY}
    assert rep.projected_sigma_at(rep.t_exp_human) == pytest.approx(10.0)
    assert rep.projection[2 * HOUR] == pytest.approx(rep.projection[HOUR] * math.sqrt(2))


def test_plan_from_geometry_matches_presets():
    g = LineGeometry.symmetric(10_900.0)
    pl = [HumanPlacement(i, "A", 0.0) for i in range(100)] + [HumanPlacement(i, "B", 10_900.0) for i in range(100)]
    p = plan_from_geometry(g, pl, 10.0)
    ref = plan_preset("geneva1997")
    assert p.tau_a == pytest.approx(ref.tau_a) and p.tau_b == pytest.approx(ref.tau_b)
    assert (p.n_a, p.n_b) == (100, 100)


def test_plan_from_geometry_averages_windows():
    g = LineGeometry.symmetric(400.0)
    pl = [HumanPlacement(0, "A", 0.0), HumanPlacement(1, "A", 0.0, 400 / C / 2), HumanPlacement(0, "B", 400.0)]
    p = plan_from_geometry(g, pl, 10.0)
    assert p.tau_a == pytest.approx(0.75 * 400 / C)


def test_presets_and_duration_labels():
    assert set(PLAN_PRESETS) == {"geneva1997", "innsbruck1998", "canary2010"}
    with pytest.raises(KeyError):
        plan_preset("mars")
    assert human_duration(math.inf) == "never"
    assert human_duration(10.0) == "10 s"
    assert human_duration(5 * DAY) == "5.0 days"
    assert human_duration(replace(plan_preset("canary2010")).t_exp_baseline) == "10.0 min"
