import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tflocal.weights import (ProductWeight, WeightFunction, WeightSpec, check_weight_conditions,
                             eval_omega, eval_weight, m_weight, v_weight)

BUILTINS = [WeightFunction("log1p"), WeightFunction("power", 0.5), WeightFunction("power", 0.2),
            WeightFunction("logpower", 1.0), WeightFunction("logpower", 2.0),
            WeightFunction("logpower", 3.5)]


def test_eval_omega_examples():
    assert eval_omega(WeightFunction("log1p"), 3) == pytest.approx(math.log(4), abs=1e-12)
    assert eval_omega(WeightFunction("power", 0.5), 4) == pytest.approx(2.0, abs=1e-14)
    for w in BUILTINS:
        assert eval_omega(w, 0.0) == 0.0


def test_eval_omega_domain_errors():
    with pytest.raises(ValueError):
        eval_omega(WeightFunction("log1p"), -1.0)
    with pytest.raises(ValueError):
        WeightFunction("power", 1.0)
    with pytest.raises(ValueError):
        WeightFunction("power", 0.0)
    with pytest.raises(ValueError):
        WeightFunction("logpower", 0.5)
    with pytest.raises(ValueError):
        WeightFunction("cosh")
    with pytest.raises(ValueError):
        WeightFunction("log1p", 2.0)


def test_eval_weight_examples():
    z = np.array([3.0, 0.0])
    assert eval_weight(m_weight(WeightFunction("log1p"), 2), z) == pytest.approx(16.0, rel=1e-14)
    z = np.array([0.6, 0.8]) * 4  # |z| = 4
    assert eval_weight(m_weight(WeightFunction("power", 0.5), 1), z) == pytest.approx(math.exp(2), rel=1e-14)
    rng = np.random.default_rng(0)
    for w in BUILTINS:
        assert np.all(eval_weight(m_weight(w, 0), rng.normal(size=(20, 2)) * 50) == 1.0)


def test_components_and_absolute():
    w = WeightFunction("log1p")
    z = np.array([3.0, 1.0])
    assert eval_weight(WeightSpec(w, 1, "first"), z) == pytest.approx(4.0)
    assert eval_weight(WeightSpec(w, 1, "second"), z) == pytest.approx(2.0)
    assert eval_weight(v_weight(w, -2), z) == pytest.approx((1 + math.hypot(3, 1)) ** 2)
    with pytest.raises(ValueError):
        eval_weight(m_weight(w, 1), np.zeros(3))


def test_product_weight_multiplies():
    w = WeightFunction("log1p")
    pw = ProductWeight((WeightSpec(w, 1, "first"), WeightSpec(w, 2, "second")))
    assert pw.on_norms(3.0, 1.0) == pytest.approx(4.0 * 4.0)


def test_conditions_for_builtins():
    for w in BUILTINS:
        rep = check_weight_conditions(w, sample_count=512, t_max=1e3)
        assert rep.subadditivity_violations == 0, w
        assert rep.monotonicity_violations == 0, w
        assert rep.gamma_violations == 0, w
        assert rep.convexity_violations == 0, w
        assert rep.beta_holds
    assert check_weight_conditions(WeightFunction("log1p")).gamma_constants == (0.0, 1.0)


def test_corrupted_evaluator_is_flagged():
    rep = check_weight_conditions(lambda t: t**2, sample_count=64)
    assert rep.subadditivity_violations > 0
    assert rep.gamma_constants is None
    assert not rep.beta_holds  # t^2/t^2 does not decay


def test_check_argument_errors():
    with pytest.raises(ValueError):
        check_weight_conditions(WeightFunction("log1p"), sample_count=5)
    with pytest.raises(ValueError):
        check_weight_conditions(WeightFunction("log1p"), t_max=1.0)


def test_logpower_is_continuous_at_knee():
    w = WeightFunction("logpower", 2.0)
    k = w._knee
    assert k > 0
    assert w(k * (1 - 1e-9)) == pytest.approx(w(k * (1 + 1e-9)), rel=1e-7)
    # beyond the knee it is the plain power of the logarithm
    assert w(50.0) == pytest.approx(math.log(51.0) ** 2)


def test_config_round_trip():
    for w in BUILTINS:
        assert WeightFunction.from_config(w.to_config()) == w
    assert WeightFunction.from_config("log1p") == WeightFunction("log1p")


points = st.lists(st.floats(-40, 40, allow_nan=False), min_size=2, max_size=2)


@settings(max_examples=200, deadline=None)
@given(z1=points, z2=points, lam=st.sampled_from([-2, -1, 0, 1, 2]),
       w=st.sampled_from(BUILTINS))
def test_submultiplicativity(z1, z2, lam, w):
    z1, z2 = np.array(z1), np.array(z2)
    lhs = eval_weight(m_weight(w, lam), z1 + z2)
    rhs = eval_weight(m_weight(w, lam), z1) * eval_weight(v_weight(w, lam), z2)
    assert lhs <= rhs * (1 + 1e-12)


@settings(max_examples=200, deadline=None)
@given(z=points, lam=st.floats(0, 3), w=st.sampled_from(BUILTINS))
def test_splitting_into_components(z, lam, w):
    z = np.array(z)
    full = eval_weight(m_weight(w, lam), z)
    split = eval_weight(WeightSpec(w, lam, "first"), z) * eval_weight(WeightSpec(w, lam, "second"), z)
    assert full <= split * (1 + 1e-12)


@settings(max_examples=300, deadline=None)
@given(t1=st.floats(0, 1e4), t2=st.floats(0, 1e4), w=st.sampled_from(BUILTINS))
def test_subadditive_and_monotone(t1, t2, w):
    a, b, ab = w(t1), w(t2), w(t1 + t2)
    assert ab <= a + b + 1e-12 * (1 + a + b)
    lo, hi = sorted((t1, t2))
    assert w(lo) <= w(hi)


@settings(max_examples=100, deadline=None)
@given(z=points, lam=st.floats(-3, 3), w=st.sampled_from(BUILTINS))
def test_v_weight_at_least_one(z, lam, w):
    assert eval_weight(v_weight(w, lam), np.array(z)) >= 1.0
