import numpy as np
import pytest
from conftest import CALIBRATION, synth_groups
from hypothesis import given, settings
from hypothesis import strategies as st

from rtreveal.ecdf import STEP, empirical_cdf
from rtreveal.infer import (CONDITIONS, FORWARD, REVERSED, IMPUTATION_METHODS, PoolSpec, bootstrap_test, bootstrap_tests,
                            concavity_pipeline, condition_curves, n_eff, pool_groups, solve_alpha, step_down_pvalues,
                            sup_violation_statistic, violation_functions)
from rtreveal.model import DEFAULT_BOUNDS, GroupData, Logistic, ObservationTable

B = DEFAULT_BOUNDS


def group(p0, times0, times1, n=None):
    return GroupData(p0, 1 - p0, empirical_cdf(times0, mode=STEP, t_lo=0.1, t_hi=1.1),
                     empirical_cdf(times1, mode=STEP, t_lo=0.1, t_hi=1.1), B, n=n)


# ----------------------------------------------------------------- pooling


def test_solve_alpha_examples():
    assert solve_alpha(20000, 55000, 90000) == pytest.approx(0.5, abs=1e-12)
    assert solve_alpha(39334, 68013, 115459) == pytest.approx(0.623, abs=1e-3)
    assert solve_alpha(23172, 53048, 111167) == pytest.approx(0.660, abs=1e-3)
    with pytest.raises(ValueError):
        solve_alpha(55000, 20000, 90000)


def test_imputation_rows():
    assert [m.id for m in IMPUTATION_METHODS] == list(range(1, 9))
    for m in IMPUTATION_METHODS:
        assert m.alpha == pytest.approx((m.wH - m.wM) / (m.wH - m.wL), abs=1e-15)


def test_pool_spec():
    assert PoolSpec(incomes=(20000, 55000, 90000)).weight == 0.5
    with pytest.raises(ValueError):
        PoolSpec(alpha=1.5)
    with pytest.raises(ValueError):
        PoolSpec()


def test_pool_groups_examples():
    gL = group(0.4, [0.2, 0.5], [0.3, 0.9])
    gH = group(0.6, [0.4, 0.6], [0.2, 0.7])
    t = np.linspace(0.1, 1.1, 101)
    one = pool_groups(gL, gH, 1.0)
    for i in (0, 1):
        assert np.allclose(one.sub(i, t), gL.sub(i, t), atol=1e-15)
    assert np.allclose(pool_groups(gL, gL, 0.5).sub(0, t), gL.sub(0, t), atol=1e-15)
    P = pool_groups(gL, gH, 0.5)
    assert P.p0 == pytest.approx(0.5) and P.p0 + P.p1 == 1.0
    for i in (0, 1):
        assert np.allclose(P.sub(i, t), 0.5 * gL.sub(i, t) + 0.5 * gH.sub(i, t), atol=1e-15)
        s = P.sub(i, t)
        assert np.all(np.diff(s) >= 0) and s[-1] <= P.p(i) + 1e-15


def test_n_eff():
    assert n_eff(100, 100) == 50


# -------------------------------------------------------------- statistics


def test_statistic_zero_under_slack():
    gM = group(0.2, [0.8, 0.9], [0.2, 0.3], n=100)
    gP = group(0.6, [0.3, 0.4], [0.8, 0.9], n=100)
    for c in FORWARD:
        assert sup_violation_statistic(c, gM, gP).value == 0.0
    for c in REVERSED:
        assert sup_violation_statistic(c, gM, gP).value > 0.0


def test_statistic_single_violation():
    t = np.array([0.5])
    gM = group(0.5, [0.5], [0.9])
    gP = group(0.5, [0.9], [0.9])
    delta = 0.5  # M0 - P0 at t = 0.5, M1 = P1 = 0
    s = sup_violation_statistic("htcond", gM, gP, n=400, grid=t)
    assert s.value == pytest.approx(np.sqrt(400) * delta)
    assert s.parts == pytest.approx((20 * delta, 0.0))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-1, 1), min_size=5, max_size=5), st.lists(st.floats(0, 0.5), min_size=5, max_size=5))
def test_statistic_monotone_in_violation(base, bump):
    # raising every violation pointwise cannot lower the statistic
    z = np.zeros(5)
    v1 = violation_functions("avcond", np.array(base), z, z, z)[0]
    v2 = violation_functions("avcond", np.array(base) + np.array(bump), z, z, z)[0]
    s = lambda v: max(float(v.max()), 0.0)  # noqa: E731
    assert s(v2) >= s(v1)


def test_reversed_negates():
    a, b, c, d = (np.array([x]) for x in (0.1, 0.3, 0.2, 0.5))
    for cond in FORWARD:
        fw = violation_functions(cond, a, b, c, d)
        rv = violation_functions(cond + "_rev", a, b, c, d)
        assert all(np.array_equal(-x, y) for x, y in zip(fw, rv))
    with pytest.raises(ValueError):
        violation_functions("nocond", a, b, c, d)


def test_condition_curves_shapes():
    gM = group(0.2, [0.8, 0.9], [0.2, 0.3])
    gP = group(0.6, [0.3, 0.4], [0.8, 0.9])
    t, lhs, rhs = condition_curves("httwtcond", gM, gP)
    assert t.shape == lhs.shape == rhs.shape
    assert np.allclose(lhs, gP.sub(1, t) - gP.sub(0, t))


def test_nested_conditions():
    # htcond holding forces avcond to hold; the statistics need not be ordered otherwise
    rng = np.random.default_rng(0)
    for _ in range(50):
        gM = group(rng.uniform(0.2, 0.8), rng.uniform(0.1, 1.1, 20), rng.uniform(0.1, 1.1, 20), n=40)
        gP = group(rng.uniform(0.2, 0.8), rng.uniform(0.1, 1.1, 20), rng.uniform(0.1, 1.1, 20), n=40)
        ht = sup_violation_statistic("htcond", gM, gP)
        av = sup_violation_statistic("avcond", gM, gP)
        if ht.value == 0.0:
            assert av.value == 0.0
        assert av.value <= 2.0 * ht.value + 1e-12


# ---------------------------------------------------------------- bootstrap


def test_step_down():
    boot = np.array([[0.0, 0.0], [1.0, 0.5], [3.0, 0.2], [0.1, 4.0]])
    p = step_down_pvalues([2.0, 0.3], boot)
    # largest first against max over both: #{max >= 2} = 2; then H2 alone: #{>= 0.3} = 2
    assert p == pytest.approx((3 / 5, 3 / 5))
    assert min(step_down_pvalues([10.0, 10.0], boot)) == pytest.approx(1 / 5)


def test_calibration(calibration_groups):
    res = bootstrap_tests(CONDITIONS, calibration_groups, PoolSpec(alpha=0.6), B=200, seed=1)
    for c in FORWARD:
        assert res[c].p_value >= 0.9
    for c in REVERSED:
        assert res[c].p_value <= 0.01 and res[c].below_resolution


def test_workers_and_order_invariance(calibration_groups):
    pool = PoolSpec(alpha=0.6)
    small = {k: v.take(np.arange(600)) for k, v in calibration_groups.items()}
    a = bootstrap_test("htcond", small, pool, B=150, seed=3)
    b = bootstrap_test("htcond", small, pool, B=150, seed=3, workers=4)
    assert a == b
    perm = np.random.default_rng(5).permutation(600)
    shuffled = {k: v.take(perm) for k, v in small.items()}
    c = bootstrap_test("htcond", shuffled, pool, B=150, seed=3)
    assert c == a


def test_shared_resamples_across_alphas(calibration_groups):
    small = {k: v.take(np.arange(500)) for k, v in calibration_groups.items()}
    multi = bootstrap_tests(["avcond"], small, [0.5, 0.6], B=120, seed=2)
    single = bootstrap_tests(["avcond"], small, PoolSpec(alpha=0.6), B=120, seed=2)
    assert multi[(0.6, "avcond")].p_value == single["avcond"].p_value


def test_refusals(calibration_groups):
    pool = PoolSpec(alpha=0.5)
    tiny = {k: v.take(np.arange(9)) for k, v in calibration_groups.items()}
    with pytest.raises(ValueError, match="10"):
        bootstrap_test("avcond", tiny, pool, B=100)
    with pytest.raises(ValueError, match="B"):
        bootstrap_test("avcond", calibration_groups, pool, B=99)
    with pytest.raises(ValueError, match="missing groups: L, H"):
        bootstrap_test("avcond", {"M": calibration_groups["M"]}, pool, B=100)
    raw = {k: ObservationTable(v.group, v.response, v.time, np.full(len(v.time), np.nan)) for k, v in calibration_groups.items()}
    with pytest.raises(ValueError, match="baseline"):
        bootstrap_test("avcond", raw, pool, B=100)


def test_gross_violation():
    # M far to the left of both extremes violates every forward condition
    groups = synth_groups({"L": Logistic(1.5, 1), "M": Logistic(-2.0, 1), "H": Logistic(2.0, 1)}, 1500, 7)
    res = bootstrap_tests(FORWARD, groups, PoolSpec(alpha=0.5), B=200, seed=4)
    for c in FORWARD:
        assert res[c].p_value <= 0.01


def test_pipeline_alpha_column(calibration_groups):
    small = {k: v.take(np.arange(800)) for k, v in calibration_groups.items()}
    table = concavity_pipeline(small, B=100, seed=0)
    assert len(table.rows) == 8
    for row, m in zip(table.rows, IMPUTATION_METHODS):
        assert row.alpha == pytest.approx(m.alpha, abs=1e-12)
        assert set(row.p_values) == set(CONDITIONS)
    assert len(table.lines()) >= 9
    merged = ObservationTable.concat(list(small.values()))
    assert concavity_pipeline(merged, B=100, seed=0).rows == table.rows


def test_pipeline_reported_alphas():
    ok = [m.id for m in IMPUTATION_METHODS if abs(m.alpha - m.reported_alpha) <= 1e-3]
    assert ok == [1, 4, 5, 6, 7, 8]
