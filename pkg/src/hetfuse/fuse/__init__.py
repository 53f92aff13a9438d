"""
Estimators: T-learner baselines, the RHC-style correction and the two-stage
confounding-corrected fusion (with inversion for a missing OS treated arm).
"""

from hetfuse.fuse.cio import correct_outcomes, fit_cio, fit_stage1, fit_stage2
from hetfuse.fuse.effect import (
    ConfoundingModel,
    EffectModel,
    Weighting,
    estimate_effects,
    fusion_loss,
    group_weights,
)
from hetfuse.fuse.learners import fit_rhc, fit_t_learner, pseudo_effects, rhc_correction
from hetfuse.fuse.methods import METHOD_ORDER, MethodTag, fit_method

__all__ = [
    "METHOD_ORDER",
    "ConfoundingModel",
    "EffectModel",
    "MethodTag",
    "Weighting",
    "correct_outcomes",
    "estimate_effects",
    "fit_cio",
    "fit_method",
    "fit_rhc",
    "fit_stage1",
    "fit_stage2",
    "fit_t_learner",
    "fusion_loss",
    "group_weights",
    "pseudo_effects",
    "rhc_correction",
]
