import numpy as np
import pytest

from hetfuse.exceptions import ModelError
from hetfuse.models import ModelSpec, RidgeModel, RidgeParams, fit, predict
from hetfuse.seeding import make_rng


def _ridge(lam: float) -> ModelSpec:
    return ModelSpec(kind="ridge", ridge=RidgeParams(lam=lam))


def test_exact_linear_data():
    X = np.array([[1.0], [2.0], [3.0]])
    model = fit(_ridge(0.0), X, np.array([2.0, 4.0, 6.0]), seed=0)
    assert isinstance(model, RidgeModel)
    assert model.coef[0] == pytest.approx(2.0, abs=1e-10)
    assert model.intercept == pytest.approx(0.0, abs=1e-10)


def test_heavy_penalty_shrinks_to_mean():
    X = np.array([[1.0], [2.0], [3.0]])
    model = fit(_ridge(1e9), X, np.array([2.0, 4.0, 6.0]), seed=0)
    assert abs(model.coef[0]) < 1e-6
    assert model.intercept == pytest.approx(4.0, abs=1e-6)


def test_first_order_optimality():
    rng = make_rng(7)
    X = rng.normal(size=(60, 4))
    y = X @ np.array([1.0, -2.0, 0.5, 0.0]) + rng.normal(size=60)
    lam = 3.0
    model = fit(_ridge(lam), X, y, seed=0)
    resid = y - predict(model, X)
    grad_w = -2.0 * X.T @ resid + 2.0 * lam * model.coef
    grad_b = -2.0 * resid.sum()
    np.testing.assert_allclose(grad_w, 0.0, atol=1e-8)
    assert abs(grad_b) < 1e-8


def test_zero_weight_rows_are_ignored():
    X = np.array([[1.0], [2.0], [3.0]])
    y = np.array([2.0, 4.0, 100.0])
    model = fit(_ridge(0.0), X, y, seed=0, sample_weight=np.array([1.0, 1.0, 0.0]))
    assert model.coef[0] == pytest.approx(2.0, abs=1e-9)
    assert model.intercept == pytest.approx(0.0, abs=1e-9)


def test_constant_column_gets_zero_coefficient():
    X = np.column_stack([np.ones(5), np.arange(5.0)])
    model = fit(_ridge(0.0), X, 3.0 * np.arange(5.0), seed=0)
    assert model.coef[0] == pytest.approx(0.0, abs=1e-12)
    assert model.coef[1] == pytest.approx(3.0, abs=1e-10)


def test_lambda_alias_in_config():
    spec = ModelSpec.model_validate({"kind": "ridge", "ridge": {"lambda": 0.25}})
    assert spec.ridge.lam == 0.25


def test_affine_prediction():
    model = RidgeModel(coef=np.array([2.0]), intercept=1.0, p=1)
    assert predict(model, np.array([[3.0]])).tolist() == [7.0]


def test_empty_prediction():
    model = RidgeModel(coef=np.array([2.0]), intercept=1.0, p=1)
    assert predict(model, np.zeros((0, 1))).shape == (0,)


def test_prediction_rejects_wrong_dimension():
    model = RidgeModel(coef=np.array([2.0]), intercept=1.0, p=1)
    with pytest.raises(ModelError, match="expects 1 columns"):
        predict(model, np.zeros((2, 3)))


def test_fit_rejects_empty_and_non_finite():
    with pytest.raises(ModelError, match="zero samples"):
        fit(_ridge(1.0), np.zeros((0, 2)), np.zeros(0), seed=0)
    X = np.array([[1.0], [np.nan]])
    with pytest.raises(ModelError, match=r"non-finite value in X at \(1, 0\)"):
        fit(_ridge(1.0), X, np.zeros(2), seed=0)
    with pytest.raises(ModelError, match="non-finite value in y at 0"):
        fit(_ridge(1.0), np.ones((2, 1)), np.array([np.inf, 0.0]), seed=0)


def test_heads_are_rejected_for_ridge():
    with pytest.raises(ModelError, match="shared-representation"):
        fit(_ridge(1.0), np.ones((2, 1)), np.zeros(2), seed=0, heads=np.zeros(2))
