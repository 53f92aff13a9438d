"""
Base regression engines: closed-form ridge, regression forest and a (two-head) tanh
network behind one ``fit`` / ``predict`` / ``warm_start_of`` contract.
"""

import copy

import numpy as np

from hetfuse.exceptions import ModelError
from hetfuse.logging import get_logger
from hetfuse.models.base import FittedModel, check_training_data, check_warm_start
from hetfuse.models.forest import ForestModel, RegressionTree, fit_forest
from hetfuse.models.net import NetModel, copy_net, fit_net
from hetfuse.models.ridge import RidgeModel, fit_ridge
from hetfuse.models.spec import ForestParams, ModelSpec, NetParams, RidgeParams

logger = get_logger(__name__)


def fit(
    spec: ModelSpec,
    X: np.ndarray,
    y: np.ndarray,
    seed: int,
    warm_start: FittedModel | None = None,
    sample_weight: np.ndarray | None = None,
    heads: np.ndarray | None = None,
) -> FittedModel:
    """
    Train one base regressor.

    Args:
        spec: Model family and hyperparameters
        X: Covariates, ``n x p``
        y: Targets, length ``n``
        seed: Fully determines any randomness (forest bagging, net initialization)
        warm_start: Same-kind model of dimension ``p``. Only the net uses its
            parameters; ridge and forest refit from scratch.
        sample_weight: Optional nonnegative per-sample weights (normalized to mean one)
        heads: Per-sample head index, only for a shared-representation net

    Returns:
        FittedModel: immutable, predict-only model

    Raises:
        ModelError: on empty or non-finite data, or an incompatible warm start
    """
    X, y, weights = check_training_data(X, y, sample_weight)
    p = X.shape[1]
    check_warm_start(warm_start, spec.kind, p)
    if heads is not None and not spec.uses_heads:
        raise ModelError("per-sample heads need a shared-representation net")

    if spec.kind == "ridge":
        return fit_ridge(spec.ridge, X, y, weights)
    if spec.kind == "forest":
        if spec.forest.mtry is not None and spec.forest.mtry > p:
            raise ModelError(f"forest mtry={spec.forest.mtry} exceeds p={p}")
        return fit_forest(spec.forest, X, y, weights, seed)
    assert warm_start is None or isinstance(warm_start, NetModel)
    return fit_net(spec.net, X, y, weights, seed, warm_start, heads)


def predict(model: FittedModel, X: np.ndarray) -> np.ndarray:
    """Deterministic predictions for a ``k x p`` matrix; ``k = 0`` gives an empty vector."""
    return model.predict(X)


def warm_start_of(model: FittedModel) -> FittedModel:
    """
    Initialization handle for a later fit.

    A net is deep-copied so the caller may keep training from its parameters. Ridge
    and forest have no reusable initialization; the copy only marks intent and a fit
    that receives it behaves exactly like a fresh fit.
    """
    if isinstance(model, NetModel):
        return copy_net(model)
    return copy.copy(model)


__all__ = [
    "FittedModel",
    "ForestModel",
    "ForestParams",
    "ModelSpec",
    "NetModel",
    "NetParams",
    "RegressionTree",
    "RidgeModel",
    "RidgeParams",
    "fit",
    "predict",
    "warm_start_of",
]
