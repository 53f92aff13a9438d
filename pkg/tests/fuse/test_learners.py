import numpy as np
import pytest

from hetfuse.dataset import dataset_from_arrays
from hetfuse.exceptions import MethodUnavailableError
from hetfuse.fuse import (
    EffectModel,
    estimate_effects,
    fit_rhc,
    fit_t_learner,
    pseudo_effects,
)
from hetfuse.models import ModelSpec, RidgeModel, RidgeParams
from hetfuse.seeding import make_rng

OLS = ModelSpec(kind="ridge", ridge=RidgeParams(lam=0.0))


def _ridge(coef: float, intercept: float) -> RidgeModel:
    return RidgeModel(coef=np.array([coef]), intercept=intercept, p=1)


def _sample(n: int, s: int, outcome, seed: int):
    rng = make_rng(seed)
    X = rng.normal(size=(n, 2))
    t = rng.binomial(1, 0.5, size=n)
    return dataset_from_arrays(X, t, np.full(n, s), outcome(X, t, rng))


def test_linear_oracle():
    ds = _sample(100, 1, lambda X, t, rng: t * 3.0 * X[:, 0] + X[:, 1], seed=0)
    em = fit_t_learner(ds.treated, ds.control, OLS, seed=0)
    X_new = make_rng(1).normal(size=(20, 2))
    np.testing.assert_allclose(estimate_effects(em, X_new), 3.0 * X_new[:, 0], atol=1e-6)
    assert em.sign == 1


def test_null_effect():
    ds = _sample(4000, 1, lambda X, t, rng: X[:, 0] + rng.normal(size=len(t)), seed=2)
    em = fit_t_learner(ds.treated, ds.control, ModelSpec(), seed=0)
    assert np.abs(estimate_effects(em, ds.X)).mean() < 0.15


def test_empty_arm_is_named():
    ds = _sample(10, 1, lambda X, t, rng: X[:, 0], seed=3)
    with pytest.raises(MethodUnavailableError, match="control arm empty"):
        fit_t_learner(ds.treated, ds.control.take([]), OLS, seed=0)
    with pytest.raises(MethodUnavailableError, match="treated arm empty"):
        fit_t_learner(ds.treated.take([]), ds.control, OLS, seed=0)


def test_effects_from_arm_models():
    em = EffectModel(f1=_ridge(2.0, 0.0), f0=_ridge(1.0, 1.0))
    assert estimate_effects(em, np.array([[3.0]])).tolist() == [2.0]
    same = EffectModel(f1=_ridge(2.0, 0.0), f0=_ridge(2.0, 0.0))
    assert estimate_effects(same, np.array([[3.0], [-1.0]])).tolist() == [0.0, 0.0]
    flipped = EffectModel(f1=_ridge(2.0, 0.0), f0=_ridge(1.0, 1.0), sign=-1)
    assert estimate_effects(flipped, np.array([[3.0]])).tolist() == [-2.0]


def test_pseudo_effects_at_half_propensity():
    t = np.array([1, 0, 1, 0])
    y = np.array([1.5, 2.0, -1.0, 0.0])
    np.testing.assert_allclose(pseudo_effects(t, y, 0.5), 2.0 * (2 * t - 1) * y)


def _linear_effect(X, t, rng, bias: float = 0.0):
    return t * (2.0 * X[:, 0] + bias) + X[:, 1] + 0.1 * rng.normal(size=len(t))


def test_rhc_correction_vanishes_for_unbiased_os():
    os = _sample(4000, 0, _linear_effect, seed=4)
    rct = _sample(20000, 1, _linear_effect, seed=5)
    em = fit_rhc(os, rct, OLS, rct_propensity=0.5, seed=0)
    theta = em.f1.parts[1]
    assert abs(theta.intercept) < 0.2
    assert np.all(np.abs(theta.coef) < 0.2)


def test_rhc_removes_constant_bias():
    os = _sample(4000, 0, lambda X, t, rng: _linear_effect(X, t, rng, bias=3.0), seed=6)
    rct = _sample(20000, 1, _linear_effect, seed=7)
    em = fit_rhc(os, rct, OLS, rct_propensity=0.5, seed=0)
    assert em.f1.parts[1].intercept == pytest.approx(-3.0, abs=0.2)
    X_new = np.array([[0.0, 0.0], [1.0, -1.0]])
    np.testing.assert_allclose(estimate_effects(em, X_new), [0.0, 2.0], atol=0.3)


def test_rhc_needs_both_os_arms():
    os = _sample(50, 0, _linear_effect, seed=8)
    rct = _sample(50, 1, _linear_effect, seed=9)
    with pytest.raises(MethodUnavailableError, match="both OS arms"):
        fit_rhc(os.treated, rct, OLS, rct_propensity=0.5, seed=0)
