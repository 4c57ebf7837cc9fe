import numpy as np
import pytest

from rtreveal.construct import build_H
from rtreveal.model import (DEFAULT_BOUNDS, HyperbolicSymmetric, Logistic, Normal, Transformed, Uniform,
                            induce_data)
from rtreveal.rationalize import (NOT_RATIONALIZABLE, RATIONALIZABLE, UNDECIDED, TransformClass,
                                  check_rationalizable, compute_L, reinduce)
from rtreveal.transforms import Linear, SignedPower

B = DEFAULT_BOUNDS
HYP = HyperbolicSymmetric(B)
ALL = TransformClass.of("all_increasing")
LIN = TransformClass.of("linear")
SYM = TransformClass.of("symmetric")


def H_of(G):
    return build_H(induce_data(G, HYP), HYP)


def sup_gap(H1, H2):
    x = np.linspace(-12, 12, 2001)
    return float(np.max(np.abs(H1.cdf(x) - H2.cdf(x))))


def test_support_mismatch():
    r = check_rationalizable(Logistic(0, 1), H_of(Uniform(-1, 1)), ALL, ALL)
    assert r.status == NOT_RATIONALIZABLE and "support" in r.reason


def test_bounded_gstar_unbounded_H():
    r = check_rationalizable(Uniform(-1, 1), H_of(Logistic(0, 1)), ALL, ALL)
    assert r.status == NOT_RATIONALIZABLE


def test_linear_witness():
    gstar = Logistic(0, 1)
    H = H_of(Transformed(gstar, Linear(2.0)))
    r = check_rationalizable(gstar, H, LIN, LIN)
    assert r.status == RATIONALIZABLE and r.b == pytest.approx(2.0, abs=1e-6)
    H2 = H_of(reinduce(gstar, r))
    assert sup_gap(H, H2) <= 1e-8


def test_cubic_linear_vs_all():
    gstar = Normal(0, 1)
    H = H_of(Transformed(gstar, SignedPower(3.0)))
    assert check_rationalizable(gstar, H, LIN, LIN).status == NOT_RATIONALIZABLE
    r = check_rationalizable(gstar, H, ALL, ALL)
    assert r.status == RATIONALIZABLE
    assert sup_gap(H, H_of(reinduce(gstar, r))) <= 1e-8


def test_symmetric_class():
    gstar = Logistic(0, 1)
    assert check_rationalizable(gstar, H_of(Transformed(gstar, SignedPower(3.0))), SYM, SYM).status == RATIONALIZABLE
    # a location shift is increasing but not odd
    assert check_rationalizable(gstar, H_of(Logistic(0.7, 1)), SYM, SYM).status == NOT_RATIONALIZABLE
    assert check_rationalizable(gstar, H_of(Logistic(0.7, 1)), ALL, ALL).status == RATIONALIZABLE


def test_class_composition_is_loosest():
    assert LIN.compose(SYM).shape == "symmetric"
    assert LIN.compose(ALL).shape == "all_increasing"
    assert TransformClass.of("linear+identical_across_j").identical


def test_undecided_outside_fragment():
    r = check_rationalizable(Logistic(0, 1), H_of(Logistic(0.2, 1)), TransformClass.of("convex"), ALL)
    assert r.status == UNDECIDED and r.L is not None


def test_identical_across_groups():
    gstar = Logistic(0, 1)
    tag = TransformClass.of("linear+identical_across_j")
    same = [H_of(Transformed(gstar, Linear(2.0))), H_of(Transformed(Logistic(0, 1), Linear(2.0)))]
    assert check_rationalizable(gstar, same, tag, tag).status == RATIONALIZABLE
    diff = [H_of(Transformed(gstar, Linear(2.0))), H_of(Transformed(gstar, Linear(0.5)))]
    assert check_rationalizable(gstar, diff, tag, tag).status == NOT_RATIONALIZABLE
    free = TransformClass.of("linear")
    assert check_rationalizable(gstar, diff, free, free).status == RATIONALIZABLE


def test_compute_L_values():
    gstar = Logistic(0, 1)
    L = compute_L(gstar, H_of(Transformed(gstar, Linear(2.0))))
    fin = np.isfinite(L.values)
    assert np.max(np.abs(L.values[fin] - 2 * L.x[fin])) < 1e-8
    assert L.is_nondecreasing() and not L.atoms and not L.flat_intervals


def test_soundness_random():
    rng = np.random.default_rng(9)
    gstar = Logistic(0, 1)
    for _ in range(10):
        G = Transformed(Logistic(0, 1), SignedPower(rng.uniform(0.5, 2.5)))
        if rng.random() < 0.5:
            G = Normal(rng.normal(0, 0.5), rng.uniform(0.5, 2))
        H = H_of(G)
        r = check_rationalizable(gstar, H, ALL, ALL)
        assert r.status == RATIONALIZABLE
        assert sup_gap(H, H_of(reinduce(gstar, r))) <= 1e-8
