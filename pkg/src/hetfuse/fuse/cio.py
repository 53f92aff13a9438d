"""
Two-stage confounding-corrected fusion.

Stage 1 contrasts the pseudo-experimental group (OS treated, ``d = 1``) with the
pseudo-control group (all RCT units, ``d = 0``) to learn the confounding function
``tau_c = p1 - p0``. The OS treated outcomes are then corrected by ``tau_c`` and
stage 2 fits the arm regressors on the corrected OS data fused with the RCT.
"""

from dataclasses import replace

import numpy as np

from hetfuse.dataset import Dataset, invert_treatments, merge, partition, replace_outcomes
from hetfuse.exceptions import DataError, MethodUnavailableError
from hetfuse.fuse.effect import ConfoundingModel, EffectModel, Weighting, group_weights
from hetfuse.fuse.learners import ArmData, fit_arms
from hetfuse.logging import get_logger
from hetfuse.models import FittedModel, ModelSpec, fit, warm_start_of
from hetfuse.seeding import derive_seed

logger = get_logger(__name__)


def fit_stage1(
    os_treated: Dataset,
    rct_all: Dataset,
    spec: ModelSpec,
    seed: int,
    weighting: Weighting = "group_mean",
) -> ConfoundingModel:
    """
    Learn ``p1`` on the OS treated units and ``p0`` on every RCT unit.

    Under ``group_mean`` the ``p0`` objective is the sum of the RCT treated and RCT
    control mean squared errors rather than one pooled mean.

    Raises:
        MethodUnavailableError: when there are no OS treated units.
        DataError: when a unit sits in the wrong pseudo group or the RCT is empty.
    """
    if len(os_treated) == 0:
        raise MethodUnavailableError("pseudo-experimental group (OS treated) is empty")
    if len(rct_all) == 0:
        raise DataError("pseudo-control group (RCT) is empty")
    if np.any(os_treated.d != 1):
        raise DataError("pseudo-experimental group must hold OS treated units only")
    if np.any(rct_all.s != 1):
        raise DataError("pseudo-control group must hold RCT units only")

    weights = group_weights(os_treated.d, weighting)
    experimental = ArmData(os_treated.X, os_treated.y, weights)
    pseudo_control = ArmData(rct_all.X, rct_all.y, group_weights(rct_all.t, weighting))
    p1, p0 = fit_arms(spec, experimental, pseudo_control, derive_seed(seed, "stage1"))
    return ConfoundingModel(p1=p1, p0=p0)


def correct_outcomes(os: Dataset, cm: ConfoundingModel) -> Dataset:
    """Subtract ``tau_c(x)`` from every OS treated outcome; other units are untouched."""
    if len(os) and cm.p != os.p:
        raise DataError(f"confounding model has p={cm.p}, data has p={os.p}")
    if len(os) == 0:
        return os
    y = np.where(os.d == 1, os.y - cm.bias(os.X), os.y)
    return replace_outcomes(os, y)


def _pretrained_control(
    spec: ModelSpec, control: Dataset, seed: int, warm: ConfoundingModel
) -> FittedModel | None:
    """
    Net-only warm start for the control side: train for the stage-1 epoch count on
    the pooled control data. A shared-representation net continues from the
    stage-1 network through its control head.
    """
    if spec.kind != "net":
        return None
    if spec.uses_heads:
        return fit(
            spec,
            control.X,
            control.y,
            seed,
            warm_start=warm_start_of(warm.p1),
            heads=np.zeros(len(control), dtype=int),
        )
    return fit(spec, control.X, control.y, seed)


def fit_stage2(
    os_corrected: Dataset,
    rct: Dataset,
    spec: ModelSpec,
    seed: int,
    warm: ConfoundingModel,
    weighting: Weighting = "group_mean",
) -> EffectModel:
    """
    Fit ``f1`` on corrected OS treated + RCT treated and ``f0`` on OS controls + RCT
    controls.

    ``f1`` starts from ``p1``. Under ``group_mean`` each objective is a sum of
    per-source mean squared errors; an empty OS arm simply contributes no term.

    Raises:
        MethodUnavailableError: when no treated or no control unit exists in either
            source.
    """
    treated = merge(os_corrected.treated, rct.treated)
    control = merge(os_corrected.control, rct.control)
    if len(treated) == 0:
        raise MethodUnavailableError("no treated units in OS or RCT")
    if len(control) == 0:
        raise MethodUnavailableError("no control units in OS or RCT")

    pretrained = _pretrained_control(spec, control, derive_seed(seed, "f0_pretrain"), warm)
    if spec.uses_heads:
        warm_f1, warm_f0 = pretrained, None
    else:
        warm_f1, warm_f0 = warm_start_of(warm.p1), pretrained
    f1, f0 = fit_arms(
        spec,
        ArmData(treated.X, treated.y, group_weights(treated.s, weighting)),
        ArmData(control.X, control.y, group_weights(control.s, weighting)),
        derive_seed(seed, "stage2"),
        warm_f1=warm_f1,
        warm_f0=warm_f0,
    )
    return EffectModel(f1=f1, f0=f0, sign=1, method="cio", spec=spec)


def fit_cio(
    os: Dataset,
    rct: Dataset,
    spec: ModelSpec,
    seed: int,
    invert_if_treated_missing: bool = True,
    weighting: Weighting = "group_mean",
) -> EffectModel:
    """
    Run stage 1, the outcome correction and stage 2.

    When the OS data has controls but no treated units and inversion is enabled, both
    sources are inverted first and the result carries ``sign = -1`` so its estimates
    refer to the original labels.

    Raises:
        MethodUnavailableError: on empty OS data, or OS without treated units when
            inversion is off.
        DataError: when the RCT misses an arm.
    """
    if len(os) == 0:
        raise MethodUnavailableError("OS data is empty; use sf_rct")
    if not rct.has_both_arms():
        raise DataError("RCT data must contain both arms")

    sign = 1
    if not np.any(os.t == 1):
        if not invert_if_treated_missing:
            raise MethodUnavailableError("OS has no treated units and inversion is off")
        logger.debug("OS has no treated units; fitting on inverted treatments")
        os, rct = invert_treatments(os), invert_treatments(rct)
        sign = -1

    os_treated = partition(os).os_treated
    cm = fit_stage1(os_treated, rct, spec, seed, weighting)
    em = fit_stage2(correct_outcomes(os, cm), rct, spec, seed, cm, weighting)
    return replace(em, sign=sign)
