"""Effect and confounding model containers, and the fusion loss weighting."""

from collections.abc import Sequence
from dataclasses import dataclass
from typing import Literal

import numpy as np

from hetfuse.exceptions import ModelError
from hetfuse.models import FittedModel, ModelSpec, predict

Weighting = Literal["group_mean", "pooled"]


@dataclass(frozen=True)
class EffectModel:
    """
    Two arm regressors whose difference is the effect estimate.

    ``sign`` is -1 when the pair was fitted on inverted treatments, so that
    :func:`estimate_effects` always refers to the caller's treatment labels.
    """

    f1: FittedModel
    f0: FittedModel
    sign: int = 1
    method: str = ""
    spec: ModelSpec | None = None

    def __post_init__(self) -> None:
        if self.f1.p != self.f0.p:
            raise ModelError(f"arm models disagree on p: {self.f1.p} vs {self.f0.p}")
        if self.sign not in (1, -1):
            raise ModelError(f"sign must be +1 or -1, got {self.sign}")

    @property
    def p(self) -> int:
        return self.f1.p


@dataclass(frozen=True)
class ConfoundingModel:
    """``tau_c(x) = p1(x) - p0(x)``: OS treated outcome model minus the RCT one."""

    p1: FittedModel
    p0: FittedModel

    def __post_init__(self) -> None:
        if self.p1.p != self.p0.p:
            raise ModelError(f"stage-1 models disagree on p: {self.p1.p} vs {self.p0.p}")

    @property
    def p(self) -> int:
        return self.p1.p

    def bias(self, X: np.ndarray) -> np.ndarray:
        return predict(self.p1, X) - predict(self.p0, X)


def estimate_effects(em: EffectModel, X: np.ndarray) -> np.ndarray:
    """``sign * (f1(X) - f0(X))``."""
    return em.sign * (predict(em.f1, X) - predict(em.f0, X))


def group_weights(labels: np.ndarray, weighting: Weighting = "group_mean") -> np.ndarray:
    """
    Per-sample weights that turn a weighted sum of squares into the fusion objective.

    With ``group_mean`` every sample of group ``g`` gets ``1 / n_g``, so
    ``sum(w * r^2)`` is the sum over groups of each group's mean squared residual.
    ``pooled`` gives unit weights.
    """
    labels = np.asarray(labels)
    if weighting == "pooled":
        return np.ones(len(labels))
    _, inverse, counts = np.unique(labels, return_inverse=True, return_counts=True)
    return 1.0 / counts[inverse]


def fusion_loss(
    model: FittedModel,
    groups: Sequence[tuple[np.ndarray, np.ndarray]],
    weighting: Weighting = "group_mean",
) -> float:
    """
    Value of a stage objective for ``model`` over ``(X, y)`` groups.

    ``group_mean`` sums the per-group mean squared errors and skips empty groups;
    ``pooled`` takes one mean over all samples.
    """
    residuals = [
        np.asarray(y, dtype=float) - predict(model, X) for X, y in groups if len(y)
    ]
    if not residuals:
        raise ModelError("objective over zero samples")
    if weighting == "pooled":
        return float(np.mean(np.concatenate(residuals) ** 2))
    return float(sum(np.mean(r**2) for r in residuals))
