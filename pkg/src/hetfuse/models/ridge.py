"""Closed-form ridge regression with an unpenalized intercept."""

from dataclasses import dataclass

import numpy as np

from hetfuse.models.base import FittedModel
from hetfuse.models.spec import RidgeParams


@dataclass(frozen=True, eq=False)
class RidgeModel(FittedModel):
    coef: np.ndarray
    intercept: float
    p: int
    kind: str = "ridge"

    def _predict(self, X: np.ndarray) -> np.ndarray:
        return X @ self.coef + self.intercept


def fit_ridge(
    params: RidgeParams, X: np.ndarray, y: np.ndarray, weights: np.ndarray
) -> RidgeModel:
    """
    Exact minimizer of ``sum_i w_i (y_i - x_i.w - b)^2 + lam * ||w||^2``.

    Covariates are centered and scaled for the solve and the coefficients are mapped
    back to the raw scale, so the penalty applies to raw-scale coefficients. The
    centered problem is solved as an augmented least-squares system, which also gives
    the minimum-norm answer when ``lam = 0`` and the design is rank deficient.
    Constant columns (and single-sample fits) get a zero coefficient, leaving the
    weighted mean of ``y`` as the prediction.
    """
    n, p = X.shape
    total = weights.sum()
    x_mean = weights @ X / total
    y_mean = float(weights @ y / total)
    Xc = X - x_mean
    scale = np.sqrt(weights @ (Xc**2) / total)
    scale[scale == 0.0] = 1.0
    Z = Xc / scale

    root_w = np.sqrt(weights)
    design = np.vstack([Z * root_w[:, None], np.diag(np.sqrt(params.lam) / scale)])
    target = np.concatenate([(y - y_mean) * root_w, np.zeros(p)])
    beta, *_ = np.linalg.lstsq(design, target, rcond=None)

    coef = beta / scale
    coef.setflags(write=False)
    return RidgeModel(coef=coef, intercept=y_mean - float(x_mean @ coef), p=p)
