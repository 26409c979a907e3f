import math

import numpy as np
import pytest
from helpers import QuantumModel, RetardedLHV, model_table, table
from hypothesis import given, settings
from hypothesis import strategies as st

from humanbell.records import RecordTable
from humanbell.stats import (
    ALL,
    COMPLEMENT,
    EMPTY,
    EXTERNAL,
    INTERNAL_BOTH,
    TSIRELSON,
    Condition,
    InsufficientData,
    cell_tallies,
    chsh,
    estimate_correlation,
    full_ensemble_shift,
    parse_condition,
    retarded_histogram,
    significance_projection,
)


def test_all_anticorrelated_is_degenerate():
    n = 50
    t = table(np.zeros(n), np.zeros(n), np.ones(n), -np.ones(n))
    est = estimate_correlation(t, 0, 0)
    assert est.e_hat == -1.0 and est.stderr == 0.0 and est.n == n


def test_quantum_pi_over_4():
    gen = np.random.default_rng(2)
    n = 100_000
    x, y = QuantumModel().sample(np.full(n, math.pi / 4), np.zeros(n), None, None, gen)
    est = estimate_correlation(table(np.zeros(n), np.zeros(n), x, y), 0, 0)
    assert abs(est.e_hat + math.sqrt(0.5)) <= 3 * est.stderr


def test_missing_flag_gives_empty_marker():
    t = table([0, 1], [0, 1], [1, 1], [1, -1])
    est = estimate_correlation(t, 0, 0, INTERNAL_BOTH)
    assert est.empty and est.n == 0 and math.isnan(est.e_hat)
    assert estimate_correlation(t, 1, 0) == EMPTY


def test_estimate_definition():
    t = table([0] * 5, [0] * 5, [1, 1, 1, -1, -1], [1, 1, -1, -1, 1])
    est = estimate_correlation(t, 0, 0)
    # 3 agree, 2 disagree
    assert est.e_hat == pytest.approx(0.2)
    assert est.stderr == pytest.approx(math.sqrt((1 - 0.04) / 5))


@settings(max_examples=30)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_estimate_permutation_invariant(seed):
    gen = np.random.default_rng(seed)
    t = model_table(QuantumModel(), 200, gen)
    perm = t.take(gen.permutation(len(t)))
    for i in (0, 1):
        for j in (0, 1):
            assert estimate_correlation(t, i, j) == estimate_correlation(perm, i, j)


def test_quantum_optimal_quad():
    t = model_table(QuantumModel(), 400_000, np.random.default_rng(3))
    s = chsh(t)
    assert abs(s.s + TSIRELSON) <= 3 * s.stderr
    assert s.sigma_violation > 50


def test_lhv_matched_optimal_quad():
    t = model_table(RetardedLHV(), 400_000, np.random.default_rng(4))
    s = chsh(t)
    assert abs(s.s + TSIRELSON) <= 3 * s.stderr


@pytest.mark.parametrize("fixed", [(0, 0), (0, 1), (1, 0), (1, 1)])
def test_lhv_fixed_retarded_obeys_bound(fixed):
    t = model_table(RetardedLHV(), 200_000, np.random.default_rng(5 + fixed[0] * 2 + fixed[1]), fixed_retarded=fixed)
    s = chsh(t, condition=Condition(retarded=fixed))
    assert abs(s.s) <= 2 + 3 * s.stderr


def test_chsh_insufficient_data():
    t = table([0, 0, 1], [0, 1, 0], [1, 1, 1], [1, 1, 1])
    with pytest.raises(InsufficientData):
        chsh(t)


def test_chsh_type_invariants():
    t = model_table(QuantumModel(), 20_000, np.random.default_rng(6))
    s = chsh(t)
    assert s.stderr ** 2 == pytest.approx(sum(c.stderr ** 2 for c in s.cells))
    assert s.sigma_violation == pytest.approx((abs(s.s) - 2) / s.stderr)
    signs = (1, 1, 1, -1)
    assert s.s == pytest.approx(sum(sg * c.e_hat for sg, c in zip(signs, s.cells)))
    assert s.combination == ("(1,1)", "(1,0)", "(0,1)", "(0,0)")


def test_chsh_angle_labels():
    t = model_table(QuantumModel(), 1_000, np.random.default_rng(6))
    s = chsh(t, angles=((3 * math.pi / 4, math.pi / 4), (0.0, math.pi / 2)))
    assert s.combination[0] == "(0.7854,1.5708)"


def test_stderr_scales_with_halving():
    t = model_table(QuantumModel(), 200_000, np.random.default_rng(8))
    half = t.take(np.arange(len(t) // 2))
    ratio = chsh(half).stderr / chsh(t).stderr
    assert ratio == pytest.approx(math.sqrt(2), rel=0.02)


def _mixed_run(seed, n=100_000, frac=0.05):
    gen = np.random.default_rng(seed)
    inside = model_table(RetardedLHV(), int(n * frac), gen, fixed_retarded=(0, 1))
    outside = model_table(RetardedLHV(), n - int(n * frac), gen)
    return RecordTable.concat([inside, outside])


def test_mixture_identity_exact():
    t = _mixed_run(9)
    rep = full_ensemble_shift(t, alpha_expected=0.05)
    assert rep.internal_fraction == pytest.approx(0.05)
    assert rep.max_cell_identity_error < 1e-12
    # the CHSH form is weighted per cell, so it holds only approximately
    combined = math.hypot(rep.s_internal.stderr, rep.s_complement.stderr)
    assert abs(rep.s_full.s - rep.mixture_prediction) <= 3 * combined
    assert rep.s_complement == rep.s_external


def test_shift_with_no_internal_records():
    t = model_table(QuantumModel(), 10_000, np.random.default_rng(10))
    rep = full_ensemble_shift(t, alpha_expected=0.0)
    assert rep.internal_fraction == 0.0 and rep.s_internal is None
    assert rep.s_full.s == rep.s_external.s == rep.s_complement.s
    assert rep.shift_coefficient is None


def test_shift_alpha_z():
    t = _mixed_run(11)
    rep = full_ensemble_shift(t, alpha_expected=0.05)
    assert rep.alpha_z == pytest.approx(0.0, abs=1e-9)
    assert rep.alpha_sigma == pytest.approx(math.sqrt(0.05 * 0.95 / len(t)))


def test_significance_projection():
    assert significance_projection(16.0, 16.0, 2.25) == pytest.approx(6.0)
    assert significance_projection(3.0, 1.0, 2.0) == pytest.approx(3.0 * math.sqrt(2))
    assert significance_projection(5.0, 7.0, 7.0) == 5.0
    with pytest.raises(ValueError):
        significance_projection(1.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        significance_projection(-1.0, 1.0, 1.0)


def test_conditions():
    t = table([0, 0, 0, 0], [0, 0, 0, 0], [1, 1, 1, 1], [1, 1, 1, 1],
              internal_a=[1, 1, 0, 0], internal_b=[1, 0, 1, 0])
    assert list(INTERNAL_BOTH.mask(t)) == [True, False, False, False]
    assert list(EXTERNAL.mask(t)) == [False, False, False, True]
    assert list(COMPLEMENT.mask(t)) == [False, True, True, True]
    assert list(Condition("a-only").mask(t)) == [False, True, False, False]
    assert list(Condition("b-only").mask(t)) == [False, False, True, False]
    assert ALL.mask(t).all()
    with pytest.raises(ValueError):
        Condition("sometimes")


def test_template_condition_requires_both_internal():
    t = table([0, 0, 0], [0, 0, 0], [1, 1, 1], [1, 1, 1], internal_a=[1, 1, 0], internal_b=[1, 1, 0],
              template_a=[2, 1, -1], template_b=[2, 2, -1])
    assert list(Condition(template=2).mask(t)) == [True, False, False]


@pytest.mark.parametrize(
    "text,cond",
    [
        (None, ALL), ("all", ALL), ("internal-both", INTERNAL_BOTH), ("external", EXTERNAL),
        ("complement", COMPLEMENT), ("retarded=0,1", Condition(retarded=(0, 1))),
        ("internal-both+template=3", Condition("both", template=3)),
    ],
)
def test_parse_condition(text, cond):
    assert parse_condition(text) == cond
    assert parse_condition(cond.label()) == cond


def test_parse_condition_rejects_junk():
    with pytest.raises(ValueError):
        parse_condition("internal-maybe")
    with pytest.raises(ValueError):
        parse_condition("bogus")


def test_retarded_histogram_and_tallies():
    t = table([0, 0, 1], [1, 1, 0], [1, -1, 1], [1, 1, 1], internal_a=[1, 0, 0], retarded_a=[1, 0, 1])
    assert retarded_histogram(t) == {(1, 1): 1, (0, 1): 1, (1, 0): 1}
    tal = cell_tallies(t)
    assert tal["0,1"] == {"n": 2, "agree": 1, "disagree": 1}
    assert tal["1,0"] == {"n": 1, "agree": 1, "disagree": 0}


def test_accepts_plain_record_lists():
    t = table([0, 1], [0, 1], [1, 1], [-1, 1])
    assert estimate_correlation(list(t), 0, 0) == estimate_correlation(t, 0, 0)
