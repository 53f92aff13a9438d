"""
Experiment harness: one run, repeated runs and one-axis sweeps.

Every run derives its randomness from ``(base_seed, run_index)`` alone, so a run gives
the same rows whether it executes alone, in a thread pool, or inside a sweep. Runs
share their seeds across sweep points.
"""

import asyncio
import math
from collections.abc import Sequence
from typing import Literal, get_args

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from hetfuse.bench.metrics import Summary, pehe, summarize
from hetfuse.config import settings
from hetfuse.dataset import Dataset
from hetfuse.exceptions import ConfigError, DataError, MethodUnavailableError
from hetfuse.fuse import METHOD_ORDER, MethodTag, Weighting, estimate_effects, fit_method
from hetfuse.logging import get_logger
from hetfuse.models import ModelSpec
from hetfuse.seeding import child_rng, derive_seed
from hetfuse.synth.sources import DatasetRecipe, SimulationRecipe, build_split

logger = get_logger(__name__)

Axis = Literal["p_r", "beta", "os_control_count"]

MAX_SUBSAMPLE_ATTEMPTS = 100
MODEL_ORDER = ("ridge", "forest", "net")


class Experiment(BaseModel):
    """What to run: a dataset recipe, the estimator grid and the experiment axes."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    dataset: DatasetRecipe = Field(default_factory=SimulationRecipe)
    methods: tuple[MethodTag, ...] = Field(
        default=("sf_os", "sf_rct", "si", "rhc", "cio", "cio_io"), min_length=1
    )
    base_models: tuple[ModelSpec, ...] = Field(
        default_factory=lambda: (ModelSpec(),), min_length=1
    )
    p_r: float = Field(default=0.2, gt=0.0, le=1.0, description="RCT training fraction")
    beta: float = Field(default=1.0, ge=0.0, description="Simulated confounding strength")
    os_control_count: int | None = Field(
        default=None, ge=0, description="Keep exactly this many OS controls"
    )
    base_seed: int = 0
    rct_propensity: float = Field(default=0.5, gt=0.0, lt=1.0)
    weighting: Weighting = "group_mean"

    @field_validator("methods")
    @classmethod
    def _unique_methods(cls, methods: tuple[str, ...]) -> tuple[str, ...]:
        if len(set(methods)) != len(methods):
            raise ValueError("methods must not repeat")
        return methods

    @field_validator("base_models")
    @classmethod
    def _unique_models(cls, specs: tuple[ModelSpec, ...]) -> tuple[ModelSpec, ...]:
        kinds = [spec.kind for spec in specs]
        if len(set(kinds)) != len(kinds):
            raise ValueError("each base model kind may appear once")
        return specs

    @property
    def dataset_tag(self) -> str:
        return self.dataset.recipe


class ResultRow(BaseModel):
    """One sqrt(PEHE) measurement with its full provenance."""

    model_config = ConfigDict(frozen=True)

    dataset: str
    method: str
    base_model: str
    p_r: float
    beta: float
    os_control_count: int | None
    run_index: int
    seed: int
    sqrt_pehe: float = Field(ge=0.0, allow_inf_nan=False)


class SummaryRow(BaseModel):
    """Mean and std of sqrt(PEHE) over the runs of one grid cell."""

    model_config = ConfigDict(frozen=True)

    dataset: str
    method: str
    base_model: str
    p_r: float
    beta: float
    os_control_count: int | None
    n_runs: int
    mean: float
    std: float

    @property
    def summary(self) -> Summary:
        return Summary(mean=self.mean, std=self.std, n_runs=self.n_runs)


class SweepTable(BaseModel):
    """Detail rows and per-cell summaries, both in canonical order."""

    rows: list[ResultRow] = Field(default_factory=list)
    summaries: list[SummaryRow] = Field(default_factory=list)

    def values(self, method: str, base_model: str = "ridge", **axes: object) -> list[float]:
        """sqrt(PEHE) per run for one method / model, optionally at given axis values."""
        return [
            row.sqrt_pehe
            for row in self.rows
            if row.method == method
            and row.base_model == base_model
            and all(getattr(row, name) == value for name, value in axes.items())
        ]

    def summary(self, method: str, base_model: str = "ridge", **axes: object) -> Summary:
        for row in self.summaries:
            if (
                row.method == method
                and row.base_model == base_model
                and all(getattr(row, name) == value for name, value in axes.items())
            ):
                return row.summary
        raise KeyError(f"no summary for {method}/{base_model} at {axes}")


def run_seed(base_seed: int, run_index: int) -> int:
    return derive_seed(base_seed, "run", run_index)


def subsample_rct(rct: Dataset, p_r: float, seed: int) -> Dataset:
    """
    Keep ``round(p_r * n)`` RCT units (at least two), redrawing until both arms are
    present.

    Raises:
        DataError: when no two-armed subsample is found within the retry budget.
    """
    if not rct.has_both_arms():
        raise DataError("RCT split does not contain both arms")
    n = len(rct)
    if p_r >= 1.0:
        return rct
    size = min(n, max(2, round(p_r * n)))
    for attempt in range(MAX_SUBSAMPLE_ATTEMPTS):
        rng = child_rng(seed, "rct_subsample", attempt)
        subset = rct.take(np.sort(rng.choice(n, size=size, replace=False)))
        if subset.has_both_arms():
            if attempt:
                logger.info("RCT subsample needed %d retries for both arms", attempt)
            return subset
    raise DataError(
        f"no two-armed RCT subsample of {size} units after {MAX_SUBSAMPLE_ATTEMPTS} draws"
    )


def subsample_os_controls(os: Dataset, count: int | None, seed: int) -> Dataset:
    """Keep exactly ``count`` OS controls (all if fewer exist); treated units stay."""
    if count is None:
        return os
    controls = np.flatnonzero(os.t == 0)
    if count >= len(controls):
        return os
    rng = child_rng(seed, "os_controls")
    keep = np.ones(len(os), dtype=bool)
    keep[controls] = False
    keep[rng.choice(controls, size=count, replace=False)] = True
    return os.where(keep)


def run_experiment(exp: Experiment, run_index: int) -> list[ResultRow]:
    """
    Build the split for one run, fit every (method, base model) pair and score it on
    the test split. Pairs the split cannot support produce no row.
    """
    seed = run_seed(exp.base_seed, run_index)
    split = build_split(exp.dataset, exp.beta, derive_seed(seed, "split"))
    if not split.test.has_truth:
        raise DataError("test split carries no ground-truth effects")
    if exp.os_control_count is not None and not np.any(split.os.t == 0):
        raise DataError("os_control_count needs a split with OS controls")

    rct = subsample_rct(split.rct, exp.p_r, derive_seed(seed, "rct"))
    os = subsample_os_controls(split.os, exp.os_control_count, derive_seed(seed, "os"))
    tau_true = split.test.tau_true

    rows = []
    for spec in exp.base_models:
        for method in exp.methods:
            fit_seed = derive_seed(seed, "fit", method, spec.tag)
            try:
                em = fit_method(
                    method, os, rct, spec, fit_seed, exp.rct_propensity, exp.weighting
                )
            except MethodUnavailableError as e:
                logger.debug("run %d: %s/%s skipped: %s", run_index, method, spec.tag, e)
                continue
            rows.append(
                ResultRow(
                    dataset=exp.dataset_tag,
                    method=method,
                    base_model=spec.tag,
                    p_r=exp.p_r,
                    beta=exp.beta,
                    os_control_count=exp.os_control_count,
                    run_index=run_index,
                    seed=seed,
                    sqrt_pehe=pehe(tau_true, estimate_effects(em, split.test.X)),
                )
            )
    return rows


def _cell(row: ResultRow) -> tuple:
    return (
        METHOD_ORDER.index(row.method),
        MODEL_ORDER.index(row.base_model),
        row.p_r,
        row.beta,
        -1 if row.os_control_count is None else row.os_control_count,
    )


def summarize_rows(rows: Sequence[ResultRow]) -> list[SummaryRow]:
    """One summary per (method, base model, axis point), in canonical order."""
    cells: dict[tuple, list[ResultRow]] = {}
    for row in sorted(rows, key=lambda r: (_cell(r), r.run_index)):
        cells.setdefault(_cell(row), []).append(row)
    summaries = []
    for members in cells.values():
        first = members[0]
        stats = summarize([r.sqrt_pehe for r in members])
        summaries.append(
            SummaryRow(
                dataset=first.dataset,
                method=first.method,
                base_model=first.base_model,
                p_r=first.p_r,
                beta=first.beta,
                os_control_count=first.os_control_count,
                n_runs=stats.n_runs,
                mean=stats.mean,
                std=stats.std,
            )
        )
    return summaries


async def _run_concurrently(
    exp: Experiment, n_runs: int, max_workers: int
) -> list[list[ResultRow]]:
    semaphore = asyncio.Semaphore(max_workers)

    async def run_one(run_index: int) -> list[ResultRow]:
        async with semaphore:
            return await asyncio.to_thread(run_experiment, exp, run_index)

    return await asyncio.gather(*(run_one(i) for i in range(n_runs)))


def repeat(
    exp: Experiment,
    n_runs: int,
    parallel: bool = True,
    max_workers: int | None = None,
) -> SweepTable:
    """
    Run indices ``0 .. n_runs - 1`` and summarize each grid cell.

    With ``parallel`` the runs go through a thread pool bounded by ``max_workers``
    (default from settings); the assembled table is identical either way.
    """
    if n_runs < 1:
        raise ConfigError(f"n_runs must be at least 1, got {n_runs}")
    if parallel and n_runs > 1:
        workers = max_workers or settings.max_workers
        per_run = asyncio.run(_run_concurrently(exp, n_runs, workers))
    else:
        per_run = [run_experiment(exp, i) for i in range(n_runs)]
    rows = sorted(
        (row for run in per_run for row in run), key=lambda r: (_cell(r), r.run_index)
    )
    return SweepTable(rows=rows, summaries=summarize_rows(rows))


def validate_axis(exp: Experiment, axis: str, values: Sequence[float]) -> list[float | int]:
    """
    Check sweep values against the axis domain.

    Raises:
        ConfigError: on an unknown axis, an empty or out-of-domain value list, or a
            beta sweep over a non-simulation recipe.
    """
    if axis not in get_args(Axis):
        raise ConfigError(f"unknown axis '{axis}'")
    if not values:
        raise ConfigError("sweep needs at least one axis value")
    if axis == "beta" and not isinstance(exp.dataset, SimulationRecipe):
        raise ConfigError("beta axis requires simulation recipe")
    checked: list[float | int] = []
    for value in values:
        if not math.isfinite(value):
            raise ConfigError(f"{axis} value {value} is not finite")
        if axis == "p_r" and not 0.0 < value <= 1.0:
            raise ConfigError(f"p_r value {value} outside (0, 1]")
        if axis == "beta" and value < 0.0:
            raise ConfigError(f"beta value {value} is negative")
        if axis == "os_control_count":
            if value < 0 or value != int(value):
                raise ConfigError(f"os_control_count value {value} is not a count")
            value = int(value)
        checked.append(value)
    return checked


def sweep(
    exp: Experiment,
    axis: str,
    values: Sequence[float],
    n_runs: int,
    parallel: bool = True,
    max_workers: int | None = None,
) -> SweepTable:
    """:func:`repeat` at every value of one axis, concatenated in axis-value order."""
    table = SweepTable()
    for value in validate_axis(exp, axis, values):
        logger.info("Sweep %s = %s", axis, value)
        point = exp.model_copy(update={axis: value})
        result = repeat(point, n_runs, parallel, max_workers)
        table.rows.extend(result.rows)
        table.summaries.extend(result.summaries)
    return table
