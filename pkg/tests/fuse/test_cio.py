import numpy as np
import pytest

from hetfuse.dataset import dataset_from_arrays, invert_treatments, merge, partition
from hetfuse.exceptions import ConfigError, DataError, MethodUnavailableError
from hetfuse.fuse import (
    ConfoundingModel,
    correct_outcomes,
    estimate_effects,
    fit_cio,
    fit_method,
    fit_stage1,
    fit_stage2,
    fit_t_learner,
    fusion_loss,
    group_weights,
)
from hetfuse.models import ForestParams, ModelSpec, RidgeModel, RidgeParams, predict
from hetfuse.seeding import make_rng

OLS = ModelSpec(kind="ridge", ridge=RidgeParams(lam=0.0))
BIAS = 2.5


def _g(X: np.ndarray) -> np.ndarray:
    return 1.0 + 2.0 * X[:, 0] - X[:, 1]


def _constant(value: float, p: int = 2) -> RidgeModel:
    return RidgeModel(coef=np.zeros(p), intercept=value, p=p)


def _biased_pair(n_os: int = 200, n_rct: int = 80, seed: int = 0):
    """RCT with y = g(x) in both arms; OS treated shifted by a constant bias."""
    rng = make_rng(seed)
    X_os = rng.normal(size=(n_os, 2))
    t_os = rng.binomial(1, 0.5, size=n_os)
    os = dataset_from_arrays(X_os, t_os, np.zeros(n_os), _g(X_os) + BIAS * t_os)
    X_rct = rng.normal(size=(n_rct, 2))
    t_rct = np.arange(n_rct) % 2
    rct = dataset_from_arrays(X_rct, t_rct, np.ones(n_rct), _g(X_rct))
    return os, rct


def test_group_weights():
    labels = np.array([0, 0, 1, 1, 1, 1])
    assert group_weights(labels).tolist() == [0.5, 0.5, 0.25, 0.25, 0.25, 0.25]
    assert group_weights(labels, "pooled").tolist() == [1.0] * 6


def test_fusion_loss_sums_group_means():
    zero = _constant(0.0, p=1)
    small = (np.zeros((2, 1)), np.array([1.0, 3.0]))
    large = (np.zeros((4, 1)), np.array([1.0, 1.0, 0.0, 0.0]))
    assert fusion_loss(zero, [small, large]) == 5.5
    assert fusion_loss(zero, [small, large], "pooled") == 2.0
    residuals = np.concatenate([small[1], large[1]])
    weights = group_weights(np.array([0, 0, 1, 1, 1, 1]))
    assert float(np.sum(weights * residuals**2)) == 5.5


def test_stage2_objective_weights_each_source_equally():
    # Constant covariates: each arm model predicts its weighted mean outcome.
    os = dataset_from_arrays(np.zeros((3, 1)), [1, 1, 0], [0, 0, 0], [1.0, 3.0, 0.0])
    rct = dataset_from_arrays(
        np.zeros((5, 1)), [1, 1, 1, 1, 0], [1] * 5, [1.0, 1.0, 0.0, 0.0, 4.0]
    )
    cm = ConfoundingModel(p1=_constant(0.0, p=1), p0=_constant(0.0, p=1))
    em = fit_stage2(os, rct, OLS, seed=0, warm=cm)
    assert predict(em.f1, np.zeros((1, 1)))[0] == pytest.approx((2.0 + 0.5) / 2, abs=1e-12)
    assert predict(em.f0, np.zeros((1, 1)))[0] == pytest.approx((0.0 + 4.0) / 2, abs=1e-12)
    pooled = fit_stage2(os, rct, OLS, seed=0, warm=cm, weighting="pooled")
    assert predict(pooled.f1, np.zeros((1, 1)))[0] == pytest.approx(1.0, abs=1e-12)


def test_stage1_recovers_additive_bias():
    os, rct = _biased_pair()
    cm = fit_stage1(partition(os).os_treated, rct, OLS, seed=0)
    X_new = make_rng(3).normal(size=(25, 2))
    np.testing.assert_allclose(cm.bias(X_new), BIAS, atol=1e-8)


def test_stage1_needs_os_treated():
    os, rct = _biased_pair()
    with pytest.raises(MethodUnavailableError, match="OS treated"):
        fit_stage1(partition(os).os_treated.take([]), rct, OLS, seed=0)
    with pytest.raises(DataError, match="RCT units only"):
        fit_stage1(partition(os).os_treated, os, OLS, seed=0)


def test_correct_outcomes_touches_os_treated_only():
    os = dataset_from_arrays(np.zeros((2, 1)), [1, 0], [0, 0], [10.0, 10.0])
    cm = ConfoundingModel(p1=_constant(3.0, p=1), p0=_constant(0.0, p=1))
    corrected = correct_outcomes(os, cm)
    assert corrected.y.tolist() == [7.0, 10.0]
    assert corrected.units[1] == os.units[1]


def test_zero_correction_is_a_fixed_point():
    os, _ = _biased_pair()
    cm = ConfoundingModel(p1=_constant(1.0), p0=_constant(1.0))
    assert correct_outcomes(os, cm) == os


def test_cio_removes_additive_bias():
    os, rct = _biased_pair()
    X_new = make_rng(4).normal(size=(25, 2))
    em = fit_cio(os, rct, OLS, seed=0)
    np.testing.assert_allclose(estimate_effects(em, X_new), 0.0, atol=1e-8)
    naive = fit_t_learner(os.treated, os.control, OLS, seed=0)
    np.testing.assert_allclose(estimate_effects(naive, X_new), BIAS, atol=1e-8)


def test_cio_without_os_controls():
    os, rct = _biased_pair()
    em = fit_cio(os.treated, rct, OLS, seed=0)
    assert em.sign == 1
    X_new = make_rng(5).normal(size=(10, 2))
    np.testing.assert_allclose(estimate_effects(em, X_new), 0.0, atol=1e-8)


def test_zero_correction_matches_group_mean_t_learner():
    os, rct = _biased_pair(seed=6)
    cm = ConfoundingModel(p1=_constant(0.0), p0=_constant(0.0))
    em = fit_stage2(correct_outcomes(os, cm), rct, ModelSpec(), seed=1, warm=cm)
    fused = merge(os, rct)
    reference = fit_t_learner(
        fused.treated, fused.control, ModelSpec(), seed=1, weighting="group_mean"
    )
    X_new = make_rng(7).normal(size=(10, 2))
    np.testing.assert_allclose(
        estimate_effects(em, X_new), estimate_effects(reference, X_new), atol=1e-10
    )


def test_inversion_sign_convention():
    rng = make_rng(8)
    X_os = rng.normal(size=(150, 2))
    os = dataset_from_arrays(X_os, np.zeros(150), np.zeros(150), _g(X_os) - 1.0)
    X_rct = rng.normal(size=(60, 2))
    t_rct = np.arange(60) % 2
    rct = dataset_from_arrays(X_rct, t_rct, np.ones(60), _g(X_rct) + X_rct[:, 0] * t_rct)

    em = fit_cio(os, rct, ModelSpec(), seed=3)
    assert em.sign == -1
    manual = fit_cio(invert_treatments(os), invert_treatments(rct), ModelSpec(), seed=3)
    assert manual.sign == 1
    X_new = rng.normal(size=(10, 2))
    np.testing.assert_allclose(
        estimate_effects(em, X_new), -estimate_effects(manual, X_new), atol=1e-10
    )

    with pytest.raises(MethodUnavailableError, match="inversion is off"):
        fit_cio(os, rct, ModelSpec(), seed=3, invert_if_treated_missing=False)


def test_cio_input_contract():
    os, rct = _biased_pair()
    with pytest.raises(MethodUnavailableError, match="OS data is empty"):
        fit_cio(os.take([]), rct, OLS, seed=0)
    with pytest.raises(DataError, match="both arms"):
        fit_cio(os, rct.treated, OLS, seed=0)


def test_method_dispatch():
    os, rct = _biased_pair()
    em = fit_method("cio_io_inv", os, rct, OLS, seed=0)
    assert em.method == "cio_io_inv"
    assert em.sign == -1
    assert fit_method("si", os, rct, OLS, seed=0).method == "si"
    with pytest.raises(MethodUnavailableError, match="control arm empty"):
        fit_method("sf_os", os.treated, rct, OLS, seed=0)
    with pytest.raises(ConfigError, match="unknown method"):
        fit_method("s_learner", os, rct, OLS, seed=0)  # type: ignore[arg-type]


def test_cio_stages_share_the_run_seed():
    forest = ModelSpec(kind="forest", forest=ForestParams(n_trees=5, max_depth=3))
    os, rct = _biased_pair(n_os=120, n_rct=60, seed=4)
    cm = fit_stage1(partition(os).os_treated, rct, forest, seed=3)
    staged = fit_stage2(correct_outcomes(os, cm), rct, forest, seed=3, warm=cm)
    combined = fit_cio(os, rct, forest, seed=3)
    X_new = make_rng(5).normal(size=(30, 2))
    np.testing.assert_array_equal(
        estimate_effects(combined, X_new), estimate_effects(staged, X_new)
    )
