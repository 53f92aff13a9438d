"""Fully synthetic benchmark with a tunable hidden confounder in the OS arm."""

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.special import expit

from hetfuse.dataset import Dataset, dataset_from_arrays
from hetfuse.logging import get_logger
from hetfuse.seeding import child_rng
from hetfuse.synth.fusion import FusionSplit
from hetfuse.synth.recipes import (
    U_LOADING,
    simulation_baseline,
    simulation_tau,
)

logger = get_logger(__name__)

RCT_PROPENSITY = 0.5


class SimulationConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    p: int = Field(default=5, ge=1, description="Covariate dimension")
    n_rct: int = Field(default=200, ge=1)
    n_os: int = Field(default=3000, ge=1)
    n_test: int = Field(default=1000, ge=1)
    beta: float = Field(default=1.0, ge=0.0, description="Confounding strength")
    seed: int = 0


def _draw_training(cfg: SimulationConfig, n: int, s: int) -> Dataset:
    rng = child_rng(cfg.seed, "simulation", "rct" if s == 1 else "os")
    X = rng.standard_normal((n, cfg.p))
    if s == 1:
        t = rng.binomial(1, RCT_PROPENSITY, size=n)
    else:
        t = rng.binomial(1, expit(X.sum(axis=1)))
    y = t * simulation_tau(X) + simulation_baseline(X) + rng.standard_normal(n)
    if s == 0:
        # U only reaches OS outcomes; its mean depends on the realized treatment.
        u = rng.normal(cfg.beta * X.sum(axis=1) * (2 * t - 1), 1.0)
        y = y + U_LOADING * u
    return dataset_from_arrays(X, t, np.full(n, s), y)


def _draw_test(cfg: SimulationConfig) -> Dataset:
    rng = child_rng(cfg.seed, "simulation", "test")
    X = rng.standard_normal((cfg.n_test, cfg.p))
    t = rng.binomial(1, RCT_PROPENSITY, size=cfg.n_test)
    y0 = simulation_baseline(X)
    y1 = y0 + simulation_tau(X)
    y = np.where(t == 1, y1, y0)
    return dataset_from_arrays(X, t, np.ones(cfg.n_test, dtype=int), y, y0, y1)


def gen_simulation(cfg: SimulationConfig) -> FusionSplit:
    """
    Draw the OS, RCT and test splits.

    Covariates are i.i.d. standard normal. RCT treatment is Bernoulli(0.5); OS
    treatment is Bernoulli(sigmoid(sum(x))) and OS outcomes carry ``5 U``. Test
    units store noise-free potential outcomes, so their ``tau_true`` is exactly
    ``tau(x)``. Each split draws from its own stream derived from ``cfg.seed``.
    """
    split = FusionSplit(
        os=_draw_training(cfg, cfg.n_os, s=0),
        rct=_draw_training(cfg, cfg.n_rct, s=1),
        test=_draw_test(cfg),
    )
    logger.debug(
        "simulation split (seed=%d, beta=%g): os=%d rct=%d test=%d",
        cfg.seed,
        cfg.beta,
        len(split.os),
        len(split.rct),
        len(split.test),
    )
    return split
