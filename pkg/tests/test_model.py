import numpy as np
import pytest
from scipy import stats

from rtreveal.ecdf import INTERP, STEP, StepCDF, empirical_cdf, mix
from rtreveal.model import (DEFAULT_BOUNDS, AsymmetryMapped, BoundaryTabulated, Composed, DomainError,
                            GroupData, HyperbolicSymmetric, LinearCapped, Logistic, Mixture, NoiseSpec, Normal,
                            ObservationTable, RawObservation, TabulatedLatent, TimeBounds, Transformed, Uniform,
                            eval_chronometric, induce_data, invert_chronometric, normalize, simulate_raw)
from rtreveal.transforms import Linear, SignedPower, Sinh, TimeMap

B = DEFAULT_BOUNDS


def fig1_c0(x):
    return 0.1 + 1.0 / (1.0 - 2.0 * x)


def test_time_bounds_validation():
    with pytest.raises(ValueError):
        TimeBounds(1.0, 0.5)
    with pytest.raises(ValueError):
        TimeBounds(-0.1, 1.0)
    assert TimeBounds(0.1, 1.1).span == pytest.approx(1.0)


def test_chronometric_values():
    c = HyperbolicSymmetric(B)
    assert eval_chronometric(c, 0.0) == pytest.approx(1.1)
    assert eval_chronometric(LinearCapped(B), 5.0) == pytest.approx(0.1)
    assert eval_chronometric(LinearCapped(B), -0.5) == pytest.approx(0.6)


def test_fig1_asymmetric_branch():
    # c0(x) = 0.1 + 1 / (1 - 2x) is the hyperbolic form with k = 2
    m = TimeMap.identity(0.1, 1.1)
    base = Composed(HyperbolicSymmetric(B), Linear(2.0))
    c = AsymmetryMapped(base, m)
    assert eval_chronometric(c, -7.5) == pytest.approx(0.1625)
    assert eval_chronometric(c, -7.5) == pytest.approx(fig1_c0(-7.5))


def test_inverse_values():
    c = HyperbolicSymmetric(B)
    assert invert_chronometric(c, 0, 0.1) == -np.inf
    assert invert_chronometric(c, 1, 0.1) == np.inf
    assert invert_chronometric(c, 0, 0.6) == pytest.approx(-1.0)
    assert invert_chronometric(c, 0, 1.1) == pytest.approx(0.0)
    assert invert_chronometric(LinearCapped(B), 1, 0.1) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        invert_chronometric(c, 0, 1.5)
    with pytest.raises(DomainError):
        invert_chronometric(c, 1, 0.05)


@pytest.mark.parametrize("c", [
    HyperbolicSymmetric(B),
    LinearCapped(B),
    Composed(HyperbolicSymmetric(B), SignedPower(3.0)),
    Composed(LinearCapped(B), Sinh(1.0, 0.5)),
    AsymmetryMapped(HyperbolicSymmetric(B), TimeMap.from_function(lambda t: 0.1 + (t - 0.1) ** 2, 0.1, 1.1)),
    BoundaryTabulated(B, np.array([-1.0, -0.5, 0.0]), np.array([0.1, 0.4, 1.1]),
                      np.array([0.0, 0.5, 1.0]), np.array([1.1, 0.6, 0.1])),
])
def test_eval_inverse_roundtrip(c):
    ts = np.linspace(0.1, 1.1, 301)[1:]
    for branch in (0, 1):
        x = invert_chronometric(c, branch, ts)
        assert np.max(np.abs(eval_chronometric(c, x) - ts)) < 1e-10


def test_branches_monotone():
    c = HyperbolicSymmetric(B)
    xn = np.linspace(-20, 0, 400)
    xp = np.linspace(0, 20, 400)[1:]
    assert np.all(np.diff(c(xn)) > 0)
    assert np.all(np.diff(c(xp)) < 0)


def test_composed_requires_zero_fixed():
    from rtreveal.transforms import Affine
    with pytest.raises(ValueError):
        Composed(HyperbolicSymmetric(B), Affine(1.0, 0.5))


def test_latent_families():
    assert Logistic(0, 1).cdf(0.0) == pytest.approx(0.5)
    assert Normal(1, 2).ppf(0.5) == pytest.approx(1.0)
    assert Uniform(-1, 1).cdf(0.5) == pytest.approx(0.75)
    mx = Mixture((Normal(-2, 1), Normal(2, 1)), (0.5, 0.5))
    assert mx.cdf(0.0) == pytest.approx(0.5)
    assert mx.cdf(mx.ppf(0.3)) == pytest.approx(0.3, abs=1e-10)
    tab = TabulatedLatent((-1.0, 0.0, 1.0), (0.0, 0.4, 1.0))
    assert tab.cdf(-0.5) == pytest.approx(0.2)
    assert tab.cdf(5.0) == 1.0 and tab.cdf(-5.0) == 0.0
    tr = Transformed(Logistic(0, 1), Linear(2.0))
    assert tr.cdf(0.5) == pytest.approx(Logistic(0, 1).cdf(1.0))
    with pytest.raises(ValueError):
        Mixture((Normal(0, 1),), (0.5,))


def test_induce_data_logistic():
    g = induce_data(Logistic(0, 1), HyperbolicSymmetric(B))
    assert g.p0 == 0.5
    assert float(g.F0.cdf(0.6)) == pytest.approx(1.0 / (1.0 + np.e) / 0.5, abs=1e-12)
    assert float(g.F0.cdf(0.6)) == pytest.approx(0.5379, abs=1e-4)
    assert float(g.F0.cdf(1.1)) == 1.0 and float(g.F1.cdf(1.1)) == 1.0
    t = np.linspace(0.1, 1.1, 200)
    assert np.all(np.diff(g.F0.cdf(t)) >= 0)


def test_induce_data_uniform_linear():
    g = induce_data(Uniform(-1, 1), LinearCapped(B))
    assert float(g.F0.cdf(0.6)) == pytest.approx(0.5)


def test_induce_degenerate_branch():
    g = induce_data(Uniform(0.5, 1.0), HyperbolicSymmetric(B))
    assert g.degenerate == (True, False)
    assert float(g.F0.cdf(0.3)) == 1.0


def test_group_data_invariants():
    with pytest.raises(ValueError):
        GroupData(0.5, 0.6, empirical_cdf([0.5]), empirical_cdf([0.5]), B)


def test_simulate_share_and_range():
    tab = simulate_raw(Logistic(0, 1), HyperbolicSymmetric(B), None, 100_000, seed=1)
    assert abs(tab.response.mean() - 0.5) < 0.005
    assert tab.time.min() >= 0.1 and tab.time.max() <= 1.1
    assert not tab.has_baseline


def test_simulate_deterministic_across_workers():
    a = simulate_raw(Logistic(0, 1), HyperbolicSymmetric(B), NoiseSpec.lognormal(0.3, 0.2), 150_000, 5)
    b = simulate_raw(Logistic(0, 1), HyperbolicSymmetric(B), NoiseSpec.lognormal(0.3, 0.2), 150_000, 5, workers=4)
    assert np.array_equal(a.time, b.time) and np.array_equal(a.baseline, b.baseline)
    assert np.array_equal(a.response, b.response)


def test_simulate_noise_law():
    # with eta = phi = 1, t / c(x) is the noise eps itself; x is captured through the eta hook
    G, c = Logistic(0, 1), HyperbolicSymmetric(B)
    seen = []

    def eta(rng, x):
        seen.append(x.copy())
        return np.ones_like(x)

    noise = NoiseSpec(eps=NoiseSpec.lognormal(0.0, 0.25).eps, eta_sampler=eta)
    tab = simulate_raw(G, c, noise, 100_000, seed=11)
    ratio = tab.time / c(np.concatenate(seen))
    assert stats.kstest(ratio, stats.lognorm(0.25).cdf).statistic < 0.01


def test_noiseless_simulation_matches_induced():
    G, c = Logistic(0.2, 0.8), HyperbolicSymmetric(B)
    tab = simulate_raw(G, c, None, 200_000, seed=3)
    emp = GroupData.from_observations(tab, bounds=B, mode=STEP)
    ana = induce_data(G, c)
    t = np.linspace(0.1, 1.1, 400)
    for i in (0, 1):
        assert np.max(np.abs(emp.sub(i, t) - ana.sub(i, t))) <= 0.01


def test_normalize_and_missing_baseline():
    recs = [RawObservation("a", 0, 1.0, 2.0), RawObservation("a", 1, 0.5, 1.0), RawObservation("a", 1, 0.3, None)]
    with pytest.raises(ValueError, match="rows 2"):
        normalize(recs)
    g = normalize(recs[:2])
    assert g.p0 == 0.5 and g.label == "a"
    assert g.bounds.t_lo == 0.0


def test_raw_observation_validation():
    with pytest.raises(ValueError):
        RawObservation("a", 2, 1.0)
    with pytest.raises(ValueError):
        RawObservation("a", 0, -1.0)
    with pytest.raises(ValueError):
        RawObservation("a", 0, 1.0, 0.0)


def test_observation_table_groups():
    tab = ObservationTable.from_records([RawObservation("a", 0, 1.0), RawObservation("b", 1, 2.0),
                                         RawObservation("a", 1, 3.0)])
    parts = tab.by_group()
    assert list(parts) == ["a", "b"] and len(parts["a"]) == 2
    assert [r.time for r in tab] == [1.0, 2.0, 3.0]


def test_step_cdf_modes():
    F = empirical_cdf([0.2, 0.4, 0.4, 0.8], t_lo=0.0, t_hi=1.0)
    assert float(F.cdf(0.4)) == 0.75 and float(F.left_limit(0.4)) == 0.25
    assert float(F.quantile(0.5)) == 0.4
    Fi = F.with_mode(INTERP)
    assert float(Fi.cdf(0.1)) == pytest.approx(0.125)
    assert float(Fi.quantile(Fi.cdf(0.3))) == pytest.approx(0.3)
    with pytest.raises(ValueError):
        empirical_cdf([])


def test_mix_stays_step():
    a = empirical_cdf([0.2, 0.4])
    b = empirical_cdf([0.3])
    m = mix([a, b], [0.5, 0.5])
    assert isinstance(m, StepCDF)
    assert float(m.cdf(0.3)) == pytest.approx(0.75)
