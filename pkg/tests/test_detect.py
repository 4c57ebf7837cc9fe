import numpy as np
import pytest

from rtreveal.construct import build_boundary_cstar, build_H
from rtreveal.detect import (DETECTED, INDETERMINATE, VIOLATION, detect_full_support, detect_mean_sign,
                             detect_unimodality, median_sign)
from rtreveal.ecdf import INTERP, empirical_cdf
from rtreveal.model import (DEFAULT_BOUNDS, Composed, GroupData, HyperbolicSymmetric, LinearCapped, Logistic,
                            Mixture, Normal, Uniform, induce_data)
from rtreveal.transforms import Linear, PiecewiseLinear, SignedPower, Sinh, TimeMap

B = DEFAULT_BOUNDS
HYP = HyperbolicSymmetric(B)


def same_F_group(p0, seed=0):
    rng = np.random.default_rng(seed)
    F = empirical_cdf(rng.uniform(0.1, 1.1, 200), mode=INTERP, t_lo=0.1, t_hi=1.1)
    return GroupData(p0, 1 - p0, F, F, B)


def random_group(rng):
    G = Logistic(rng.normal(0, 1), rng.uniform(0.5, 2))
    if rng.random() < 0.5:
        G = Mixture((G, Normal(rng.normal(0, 2), rng.uniform(0.3, 1.5))), (0.6, 0.4))
    return induce_data(G, Composed(HYP, Sinh(rng.uniform(0.5, 2), rng.uniform(0.3, 2))))


def test_full_support_families():
    g = induce_data(Logistic(0, 1), HYP)
    assert detect_full_support(g, "asymptotic").verdict == DETECTED
    assert detect_full_support(g, "capped").verdict == VIOLATION
    assert detect_full_support(g, "union").verdict == INDETERMINATE


def test_full_support_bounded_latent():
    g = induce_data(Uniform(-1, 2), HYP)
    r = detect_full_support(g, "asymptotic")
    assert r.verdict == VIOLATION and r.witnesses
    assert detect_full_support(g, "union").verdict == VIOLATION


def test_mean_sign_positive():
    r = detect_mean_sign(same_F_group(0.3))
    assert r.verdict == DETECTED and r.direction == "positive"


def test_mean_sign_equality_weak_only():
    r = detect_mean_sign(same_F_group(0.5))
    assert r.verdict == DETECTED and r.direction == "both"
    assert r.strict_verdict == INDETERMINATE


def test_mean_sign_failure_is_indeterminate():
    g = induce_data(Mixture((Normal(-3, 0.3), Normal(1, 2)), (0.3, 0.7)), HYP)
    r = detect_mean_sign(g)
    if r.verdict != DETECTED:
        assert r.verdict == INDETERMINATE


def test_asymmetric_identity_matches_symmetric():
    rng = np.random.default_rng(42)
    m = TimeMap.identity(0.1, 1.1)
    for _ in range(100):
        g = random_group(rng)
        a = detect_mean_sign(g, "symmetric")
        b = detect_mean_sign(g, "asymmetric", m=m)
        assert (a.verdict, a.direction) == (b.verdict, b.direction)


def test_asymmetric_needs_map():
    with pytest.raises(ValueError):
        detect_mean_sign(same_F_group(0.4), "asymmetric")


def test_mean_sign_linear_mode():
    g = induce_data(Logistic(0.4, 1), LinearCapped(B))
    r = detect_mean_sign(g, "linear", cstar=LinearCapped(B))
    assert r.verdict == DETECTED and r.direction == "positive"


def test_mean_sign_degenerate():
    g = induce_data(Uniform(0.2, 1.0), HYP)
    r = detect_mean_sign(g)
    assert r.verdict == DETECTED and r.direction == "positive"


def test_median_sign():
    assert median_sign(same_F_group(0.3)) == 1
    assert median_sign(same_F_group(0.5)) == 0
    assert median_sign(same_F_group(0.8)) == -1


def test_median_sign_matches_H_median():
    rng = np.random.default_rng(7)
    for _ in range(100):
        g = random_group(rng)
        psi = PiecewiseLinear(rng.uniform(0.3, 3), rng.uniform(0.3, 3))
        H = build_H(g, Composed(HYP, psi))
        med = H.median()
        s = median_sign(g)
        if s != 0 and abs(med) > 1e-9:
            assert np.sign(med) == s


def test_unimodality_boundary_itself():
    g = induce_data(Logistic(0, 1), HYP)
    r = detect_unimodality(g, build_boundary_cstar(g))
    assert r.verdict == DETECTED and r.strict_verdict == INDETERMINATE


def test_unimodality_violation_with_linear():
    # square-root distortion makes the boundary representative convex per branch
    g = induce_data(Uniform(-1, 1), Composed(LinearCapped(B), SignedPower(0.5)))
    r = detect_unimodality(g, LinearCapped(B))
    assert r.verdict == VIOLATION and r.witnesses


def test_unimodality_mixed_curvature():
    g = induce_data(Mixture((Normal(-2, 0.5), Normal(2, 0.5)), (0.5, 0.5)), HYP)
    assert detect_unimodality(g, HYP).verdict == INDETERMINATE


def test_invariance_full_support():
    rng = np.random.default_rng(3)
    for _ in range(50):
        full = rng.random() < 0.5
        G = Logistic(rng.normal(), rng.uniform(0.5, 2)) if full else Uniform(-rng.uniform(0.5, 3), rng.uniform(0.5, 3))
        psi = Sinh(rng.uniform(0.3, 3), rng.uniform(0.2, 2)) if rng.random() < 0.5 else SignedPower(rng.uniform(0.5, 3))
        g = induce_data(G, Composed(HYP, psi))
        assert detect_full_support(g, "asymptotic").detected == full


def test_invariance_mean_sign_symmetric():
    rng = np.random.default_rng(4)
    x = np.linspace(0, 40, 4001)
    for _ in range(50):
        G = Logistic(rng.normal(0, 1), rng.uniform(0.5, 2))
        if rng.random() < 0.5:
            G = Mixture((G, Normal(rng.normal(0, 1.5), rng.uniform(0.3, 1.5))), (0.5, 0.5))
        psi = SignedPower(rng.uniform(0.5, 3)) if rng.random() < 0.5 else Linear(rng.uniform(0.3, 3))
        g = induce_data(G, Composed(HYP, psi))
        r = detect_mean_sign(g)
        positive = bool(np.all(G.cdf(-x) <= G.sf(x) + 1e-12))
        assert (r.verdict == DETECTED and r.direction in ("positive", "both")) == positive


def test_symmetric_detection_implies_nonnegative_H_mean():
    rng = np.random.default_rng(5)
    battery = [Composed(LinearCapped(B), SignedPower(p)) for p in (0.5, 1.0, 2.0)] + \
              [Composed(HYP, Linear(k)) for k in (0.5, 1.0, 3.0)] + [Composed(HYP, Sinh(1.0, 0.5))]
    for _ in range(20):
        g = induce_data(Logistic(rng.uniform(-0.5, 1.5), rng.uniform(0.5, 1.5)), HYP)
        r = detect_mean_sign(g)
        if r.verdict == DETECTED and r.direction == "positive":
            for c in battery:
                assert build_H(g, c).mean() >= -1e-9
