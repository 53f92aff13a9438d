"""T-learner baselines and the RHC-style linear bias correction."""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from hetfuse.dataset import Dataset
from hetfuse.exceptions import DataError, MethodUnavailableError
from hetfuse.fuse.effect import EffectModel, Weighting, estimate_effects, group_weights
from hetfuse.logging import get_logger
from hetfuse.models import FittedModel, ModelSpec, NetModel, RidgeModel, RidgeParams, fit
from hetfuse.seeding import derive_seed

logger = get_logger(__name__)

# Unpenalized least squares for the RHC correction.
_OLS = ModelSpec(kind="ridge", ridge=RidgeParams(lam=0.0))


class ArmData(NamedTuple):
    X: np.ndarray
    y: np.ndarray
    weights: np.ndarray


def arm_data(ds: Dataset, weighting: Weighting, y: np.ndarray | None = None) -> ArmData:
    """Training arrays of one arm; group-mean weights are taken per source."""
    return ArmData(ds.X, ds.y if y is None else y, group_weights(ds.s, weighting))


def fit_arms(
    spec: ModelSpec,
    treated: ArmData,
    control: ArmData,
    seed: int,
    warm_f1: FittedModel | None = None,
    warm_f0: FittedModel | None = None,
) -> tuple[FittedModel, FittedModel]:
    """
    Fit the treated and control outcome regressors.

    A shared-representation net is trained once on both arms (treated through head 1,
    control through head 0) starting from ``warm_f1``; every other model fits each
    arm separately.
    """
    if spec.uses_heads:
        n1, n0 = len(treated.y), len(control.y)
        net = fit(
            spec,
            np.vstack([treated.X, control.X]),
            np.concatenate([treated.y, control.y]),
            derive_seed(seed, "arms"),
            warm_start=warm_f1,
            sample_weight=np.concatenate([treated.weights, control.weights]),
            heads=np.concatenate([np.ones(n1, dtype=int), np.zeros(n0, dtype=int)]),
        )
        assert isinstance(net, NetModel)
        return net.select_head(1), net.select_head(0)
    f1 = fit(spec, treated.X, treated.y, derive_seed(seed, "f1"), warm_f1, treated.weights)
    f0 = fit(spec, control.X, control.y, derive_seed(seed, "f0"), warm_f0, control.weights)
    return f1, f0


def fit_t_learner(
    treated: Dataset,
    control: Dataset,
    spec: ModelSpec,
    seed: int,
    weighting: Weighting = "pooled",
    method: str = "t_learner",
) -> EffectModel:
    """
    Fit ``f1`` on the treated arm and ``f0`` on the control arm.

    ``weighting="group_mean"`` weights each arm as a sum of per-source means, which
    makes the learner the zero-correction special case of the two-stage fit.

    Raises:
        MethodUnavailableError: naming the empty arm.
    """
    if len(treated) == 0:
        raise MethodUnavailableError("treated arm empty")
    if len(control) == 0:
        raise MethodUnavailableError("control arm empty")
    if treated.p != control.p:
        raise DataError(f"arms differ in dimension: {treated.p} vs {control.p}")
    f1, f0 = fit_arms(
        spec, arm_data(treated, weighting), arm_data(control, weighting), seed
    )
    return EffectModel(f1=f1, f0=f0, sign=1, method=method, spec=spec)


@dataclass(frozen=True, eq=False)
class SumModel(FittedModel):
    """Predicts the sum of its parts."""

    parts: tuple[FittedModel, ...]
    p: int
    kind: str = "sum"

    def _predict(self, X: np.ndarray) -> np.ndarray:
        return np.sum([part.predict(X) for part in self.parts], axis=0)


def pseudo_effects(t: np.ndarray, y: np.ndarray, propensity: float) -> np.ndarray:
    """Horvitz-Thompson transformed outcomes ``(t - e) / (e (1 - e)) * y``."""
    e = propensity
    return (np.asarray(t, dtype=float) - e) / (e * (1.0 - e)) * np.asarray(y, dtype=float)


def rhc_correction(
    tau_os: EffectModel, rct: Dataset, propensity: float
) -> RidgeModel:
    """Least-squares linear fit (with intercept) of RCT pseudo-effects minus ``tau_os``."""
    target = pseudo_effects(rct.t, rct.y, propensity) - estimate_effects(tau_os, rct.X)
    theta = fit(_OLS, rct.X, target, seed=0)
    assert isinstance(theta, RidgeModel)
    return theta


def fit_rhc(
    os: Dataset,
    rct: Dataset,
    spec: ModelSpec,
    rct_propensity: float,
    seed: int,
) -> EffectModel:
    """
    RHC-style estimator: an OS T-learner plus a linear correction learned on the RCT.

    The returned treated model is ``f1_os + theta``, so the estimate is
    ``tau_os(x) + theta . [1, x]``.

    Raises:
        MethodUnavailableError: when the OS sample misses an arm.
        DataError: on an empty RCT or a propensity outside (0, 1).
    """
    if not os.has_both_arms():
        raise MethodUnavailableError("RHC needs both OS arms")
    if not 0.0 < rct_propensity < 1.0:
        raise DataError(f"rct_propensity must lie in (0, 1), got {rct_propensity}")
    if len(rct) == 0:
        raise DataError("RHC needs RCT data")
    tau_os = fit_t_learner(os.treated, os.control, spec, derive_seed(seed, "os"))
    theta = rhc_correction(tau_os, rct, rct_propensity)
    logger.debug("RHC correction intercept %.4f", theta.intercept)
    f1 = SumModel(parts=(tau_os.f1, theta), p=tau_os.p)
    return EffectModel(f1=f1, f0=tau_os.f0, sign=1, method="rhc", spec=spec)
