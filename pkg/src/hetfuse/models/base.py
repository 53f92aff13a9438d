"""Shared fit/predict contract and input validation for the base regressors."""

from abc import ABC, abstractmethod

import numpy as np

from hetfuse.exceptions import ModelError


class FittedModel(ABC):
    """A trained, predict-only regressor over ``p`` covariates."""

    kind: str
    p: int

    @abstractmethod
    def _predict(self, X: np.ndarray) -> np.ndarray: ...

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = as_matrix(X, "X")
        if X.shape[1] != self.p:
            raise ModelError(
                f"{self.kind} model expects {self.p} columns, got {X.shape[1]}"
            )
        if X.shape[0] == 0:
            return np.zeros(0)
        return self._predict(X)


def as_matrix(X: np.ndarray, name: str) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    if X.ndim != 2:
        raise ModelError(f"{name} must be a 2-D matrix, got shape {X.shape}")
    return X


def check_training_data(
    X: np.ndarray, y: np.ndarray, sample_weight: np.ndarray | None
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Validate a training set and return ``(X, y, weights)``.

    Weights are normalized to mean one so unit weights reproduce the unweighted
    objective exactly.

    Raises:
        ModelError: on an empty or misaligned set, or a non-finite entry.
    """
    X = as_matrix(X, "X")
    y = np.asarray(y, dtype=float).reshape(-1)
    n = X.shape[0]
    if n == 0:
        raise ModelError("cannot fit on zero samples")
    if len(y) != n:
        raise ModelError(f"X has {n} rows but y has {len(y)} entries")
    bad = np.argwhere(~np.isfinite(X))
    if len(bad):
        i, j = bad[0]
        raise ModelError(f"non-finite value in X at ({i}, {j})")
    bad_y = np.flatnonzero(~np.isfinite(y))
    if len(bad_y):
        raise ModelError(f"non-finite value in y at {bad_y[0]}")
    if sample_weight is None:
        weights = np.ones(n)
    else:
        weights = np.asarray(sample_weight, dtype=float).reshape(-1)
        if len(weights) != n:
            raise ModelError(f"got {len(weights)} sample weights for {n} samples")
        if np.any(~np.isfinite(weights)) or np.any(weights < 0) or weights.sum() <= 0:
            raise ModelError("sample weights must be finite, nonnegative, not all zero")
        weights = weights * (n / weights.sum())
    return X, y, weights


def check_warm_start(warm_start: FittedModel | None, kind: str, p: int) -> None:
    if warm_start is None:
        return
    if warm_start.kind != kind:
        raise ModelError(f"warm start of kind '{warm_start.kind}' for a {kind} fit")
    if warm_start.p != p:
        raise ModelError(f"warm start has p={warm_start.p}, data has p={p}")
