"""Method tags used by the experiment harness and their estimator calls."""

from dataclasses import replace
from typing import Literal

from hetfuse.dataset import Dataset, merge
from hetfuse.exceptions import ConfigError
from hetfuse.fuse.cio import fit_cio
from hetfuse.fuse.effect import EffectModel, Weighting
from hetfuse.fuse.learners import fit_rhc, fit_t_learner
from hetfuse.models import ModelSpec

MethodTag = Literal["sf_os", "sf_rct", "si", "rhc", "cio", "cio_io", "cio_io_inv"]

METHOD_ORDER: tuple[str, ...] = (
    "sf_os",
    "sf_rct",
    "si",
    "rhc",
    "cio",
    "cio_io",
    "cio_io_inv",
)


def fit_method(
    method: MethodTag,
    os: Dataset,
    rct: Dataset,
    spec: ModelSpec,
    seed: int,
    rct_propensity: float = 0.5,
    weighting: Weighting = "group_mean",
) -> EffectModel:
    """
    Fit one named estimator on a training split.

    - ``sf_os`` / ``sf_rct``: T-learner on one source.
    - ``si``: T-learner on both sources pooled.
    - ``rhc``: OS T-learner with a linear RCT correction.
    - ``cio``: two-stage fit on whatever OS arms exist.
    - ``cio_io``: OS controls removed first.
    - ``cio_io_inv``: OS treated removed first; fitted on inverted labels.

    Raises:
        MethodUnavailableError: when the split cannot support the method.
    """
    if method == "sf_os":
        em = fit_t_learner(os.treated, os.control, spec, seed)
    elif method == "sf_rct":
        em = fit_t_learner(rct.treated, rct.control, spec, seed)
    elif method == "si":
        fused = merge(os, rct)
        em = fit_t_learner(fused.treated, fused.control, spec, seed)
    elif method == "rhc":
        em = fit_rhc(os, rct, spec, rct_propensity, seed)
    elif method == "cio":
        em = fit_cio(os, rct, spec, seed, weighting=weighting)
    elif method == "cio_io":
        em = fit_cio(os.treated, rct, spec, seed, False, weighting)
    elif method == "cio_io_inv":
        em = fit_cio(os.control, rct, spec, seed, True, weighting)
    else:
        raise ConfigError(f"unknown method '{method}'")
    return replace(em, method=method)
