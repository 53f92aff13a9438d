"""
Data generation: the synthetic benchmark, STAR- and NSW-style outcome simulators,
biased fusion-split constructors and CSV ingestion of real covariates.
"""

from hetfuse.synth.fusion import FusionSplit, construct_nsw_fusion, construct_star_fusion
from hetfuse.synth.ingest import ColumnRole, CovariateTable, ingest_covariates_csv
from hetfuse.synth.recipes import (
    RECIPES,
    OutcomeRecipe,
    PotentialOutcomes,
    nsw_outcomes,
    residual_regression,
    simulation_confounding,
    simulation_mean,
    simulation_tau,
    star_outcomes,
)
from hetfuse.synth.simulation import SimulationConfig, gen_simulation
from hetfuse.synth.sources import DatasetRecipe, build_split

__all__ = [
    "RECIPES",
    "ColumnRole",
    "CovariateTable",
    "DatasetRecipe",
    "FusionSplit",
    "OutcomeRecipe",
    "PotentialOutcomes",
    "SimulationConfig",
    "build_split",
    "construct_nsw_fusion",
    "construct_star_fusion",
    "gen_simulation",
    "ingest_covariates_csv",
    "nsw_outcomes",
    "residual_regression",
    "simulation_confounding",
    "simulation_mean",
    "simulation_tau",
    "star_outcomes",
]
