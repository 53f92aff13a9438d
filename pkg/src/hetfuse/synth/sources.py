"""
Dataset recipes: configuration documents naming where a benchmark's covariates come
from, and :func:`build_split` turning one of them into a seeded :class:`FusionSplit`.
"""

from functools import lru_cache
from pathlib import Path
from typing import Annotated, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from hetfuse.dataset import Dataset, dataset_from_arrays
from hetfuse.exceptions import DataError
from hetfuse.logging import get_logger
from hetfuse.seeding import child_rng
from hetfuse.synth.fusion import FusionSplit, construct_nsw_fusion, construct_star_fusion
from hetfuse.synth.ingest import ColumnRole, CovariateTable, ingest_covariates_csv
from hetfuse.synth.recipes import (
    NSW,
    STAR,
    CovariateScaling,
    OutcomeRecipe,
    scale_covariates,
)
from hetfuse.synth.simulation import SimulationConfig, gen_simulation
from hetfuse.synth.surrogate import (
    NSW_CONTROL,
    NSW_PSID,
    NSW_TREATED,
    STAR_STUDENTS,
    nsw_surrogate,
    star_surrogate,
)

logger = get_logger(__name__)


class _Recipe(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class SimulationRecipe(_Recipe):
    recipe: Literal["simulation"] = "simulation"
    p: int = Field(default=5, ge=1)
    n_rct: int = Field(default=200, ge=1)
    n_os: int = Field(default=3000, ge=1)
    n_test: int = Field(default=1000, ge=1)


class _StarRecipe(_Recipe):
    trial_fraction: float = Field(default=0.5, ge=0.0, le=1.0)
    scaling: CovariateScaling = Field(
        default="zscore", description="Covariate rescaling before simulating outcomes"
    )


class StarCsvRecipe(_StarRecipe):
    recipe: Literal["star_csv"] = "star_csv"
    path: Path
    columns: dict[str, ColumnRole]


class StarSurrogateRecipe(_StarRecipe):
    recipe: Literal["star_surrogate"] = "star_surrogate"
    n_students: int = Field(default=STAR_STUDENTS, ge=2)
    covariate_seed: int = Field(
        default=0, description="Fixes the surrogate covariates across runs"
    )


class _NswRecipe(_Recipe):
    n_rct_draw: int = Field(default=100, ge=2)
    scaling: CovariateScaling = "zscore"


class NswCsvRecipe(_NswRecipe):
    recipe: Literal["nsw_csv"] = "nsw_csv"
    randomized_path: Path
    psid_path: Path
    columns: dict[str, ColumnRole]
    psid_columns: dict[str, ColumnRole] | None = Field(
        default=None,
        description="PSID schema; defaults to `columns` without its treatment column",
    )

    def psid_schema(self) -> dict[str, ColumnRole]:
        if self.psid_columns is not None:
            return self.psid_columns
        return {name: role for name, role in self.columns.items() if role != "treatment"}


class NswSurrogateRecipe(_NswRecipe):
    recipe: Literal["nsw_surrogate"] = "nsw_surrogate"
    n_treated: int = Field(default=NSW_TREATED, ge=1)
    n_control: int = Field(default=NSW_CONTROL, ge=1)
    n_psid: int = Field(default=NSW_PSID, ge=2)
    covariate_seed: int = 0


DatasetRecipe = Annotated[
    SimulationRecipe
    | StarCsvRecipe
    | StarSurrogateRecipe
    | NswCsvRecipe
    | NswSurrogateRecipe,
    Field(discriminator="recipe"),
]


@lru_cache(maxsize=8)
def _ingest_cached(path: str, columns: tuple[tuple[str, str], ...]) -> CovariateTable:
    return ingest_covariates_csv(path, dict(columns))  # type: ignore[arg-type]


def _ingest(path: Path, columns: dict[str, ColumnRole]) -> CovariateTable:
    return _ingest_cached(str(path), tuple(columns.items()))


def attach_outcomes(
    X: np.ndarray,
    t: np.ndarray,
    recipe: OutcomeRecipe,
    rng: np.random.Generator,
    u: np.ndarray | None = None,
) -> Dataset:
    """Simulate both potential outcomes per row and observe the ``t`` arm."""
    outcomes = recipe.potential_outcomes(X, rng)
    y = np.where(np.asarray(t) == 1, outcomes.y1, outcomes.y0)
    s = np.ones(len(y), dtype=int)
    return dataset_from_arrays(X, t, s, y, outcomes.y0, outcomes.y1, u)


def _star_units(recipe: StarCsvRecipe | StarSurrogateRecipe, seed: int) -> Dataset:
    if isinstance(recipe, StarCsvRecipe):
        table = _ingest(recipe.path, recipe.columns)
    else:
        table = star_surrogate(recipe.n_students, recipe.covariate_seed)
    if table.t is None or table.u is None:
        raise DataError("STAR-style recipe needs 'treatment' and 'u_flag' columns")
    X = scale_covariates(table.X, recipe.scaling)
    return attach_outcomes(X, table.t, STAR, child_rng(seed, "star", "outcomes"), table.u)


def _nsw_pools(
    recipe: NswCsvRecipe | NswSurrogateRecipe, seed: int
) -> tuple[Dataset, Dataset]:
    if isinstance(recipe, NswCsvRecipe):
        randomized = _ingest(recipe.randomized_path, recipe.columns)
        psid = _ingest(recipe.psid_path, recipe.psid_schema())
    else:
        randomized, psid = nsw_surrogate(
            recipe.n_treated, recipe.n_control, recipe.n_psid, recipe.covariate_seed
        )
    if randomized.t is None:
        raise DataError("NSW-style randomized file needs a 'treatment' column")
    if randomized.p != psid.p:
        raise DataError(f"NSW files differ in covariates: {randomized.p} vs {psid.p}")
    psid_t = psid.t if psid.t is not None else np.zeros(len(psid), dtype=int)

    X = scale_covariates(np.vstack([randomized.X, psid.X]), recipe.scaling)
    t = np.concatenate([randomized.t, psid_t])
    units = attach_outcomes(X, t, NSW, child_rng(seed, "nsw", "outcomes"))
    n = len(randomized)
    return units.take(range(n)), units.take(range(n, len(units)))


def build_split(recipe: DatasetRecipe, beta: float, seed: int) -> FusionSplit:
    """
    Generate or load the OS / RCT / test split for one run.

    ``beta`` only affects the simulation recipe. Every random draw (simulated
    outcomes and split selection) is derived from ``seed``.
    """
    if isinstance(recipe, SimulationRecipe):
        cfg = SimulationConfig(
            p=recipe.p,
            n_rct=recipe.n_rct,
            n_os=recipe.n_os,
            n_test=recipe.n_test,
            beta=beta,
            seed=seed,
        )
        return gen_simulation(cfg)
    if isinstance(recipe, StarCsvRecipe | StarSurrogateRecipe):
        return construct_star_fusion(_star_units(recipe, seed), recipe.trial_fraction, seed)
    randomized, psid = _nsw_pools(recipe, seed)
    return construct_nsw_fusion(randomized, psid, recipe.n_rct_draw, seed)
