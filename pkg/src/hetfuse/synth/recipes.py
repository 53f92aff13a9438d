"""
Closed-form outcome laws for the three benchmark families.

Each recipe pairs an effect function ``tau(x)`` with a baseline ``mu0(x)`` and a noise
law, and draws both potential outcomes per row with independent noise per arm:
``Y(t) = t * tau(x) + mu0(x) + eps(t)``.

- simulation: ``tau = 1 + sum(x) + sum(x^2)``, ``mu0 = 1 + 2 sum(x^3) + sum(x)``,
  ``eps ~ N(0, 1)``. Observational units add ``5 U`` with
  ``U ~ N(beta * sum(x) * (2t - 1), 1)``, see :func:`simulation_mean`.
- star: ``tau = sum(x) + sqrt(|sum(x)|)``, ``mu0 = 2 sum(x) + x.x``, ``eps ~ N(0, 1)``.
- nsw: ``tau = x.x``, ``mu0 = 2 sum(exp(x))``, ``eps ~ U(-1, 1)``.
"""

from collections.abc import Callable
from dataclasses import dataclass
from typing import Literal, NamedTuple

import numpy as np

from hetfuse.exceptions import DataError

RecipeKind = Literal["simulation", "star", "nsw"]

# Coefficient of U in the simulated observational outcome.
U_LOADING = 5.0


class PotentialOutcomes(NamedTuple):
    y0: np.ndarray
    y1: np.ndarray
    tau: np.ndarray


class ResidualFit(NamedTuple):
    """OLS coefficients of a residual on ``(1, x[, t])`` and their standard errors."""

    coef: np.ndarray
    stderr: np.ndarray

    @property
    def z_scores(self) -> np.ndarray:
        return self.coef / self.stderr


def check_covariates(X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise DataError(f"covariates must be a 2-D matrix, got shape {X.shape}")
    bad = np.argwhere(~np.isfinite(X))
    if len(bad):
        i, j = bad[0]
        raise DataError(f"non-finite covariate at ({i}, {j})")
    return X


def simulation_tau(X: np.ndarray) -> np.ndarray:
    return 1.0 + X.sum(axis=1) + (X**2).sum(axis=1)


def simulation_baseline(X: np.ndarray) -> np.ndarray:
    return 1.0 + 2.0 * (X**3).sum(axis=1) + X.sum(axis=1)


def simulation_confounding(X: np.ndarray, beta: float) -> np.ndarray:
    """
    Analytic confounding function of the simulation: the OS arm gap beyond ``tau``.

    ``E[U | x, t] = beta * sum(x) * (2t - 1)``, so the arms differ by
    ``2 * 5 * beta * sum(x)``.
    """
    return 2.0 * U_LOADING * beta * np.asarray(X, dtype=float).sum(axis=1)


def simulation_mean(
    X: np.ndarray, t: np.ndarray, s: np.ndarray, beta: float
) -> np.ndarray:
    """``E[Y | x, t, s]`` of the simulation, with ``U`` marginalized out."""
    X = np.asarray(X, dtype=float)
    t = np.asarray(t, dtype=float)
    s = np.asarray(s, dtype=float)
    confounded = U_LOADING * (1.0 - s) * beta * X.sum(axis=1) * (2.0 * t - 1.0)
    return t * simulation_tau(X) + simulation_baseline(X) + confounded


def star_tau(X: np.ndarray) -> np.ndarray:
    total = X.sum(axis=1)
    return total + np.sqrt(np.abs(total))


def star_baseline(X: np.ndarray) -> np.ndarray:
    return 2.0 * X.sum(axis=1) + (X**2).sum(axis=1)


def nsw_tau(X: np.ndarray) -> np.ndarray:
    return (X**2).sum(axis=1)


def nsw_baseline(X: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        return 2.0 * np.exp(X).sum(axis=1)


def _normal_noise(rng: np.random.Generator, shape: tuple[int, ...]) -> np.ndarray:
    return rng.standard_normal(shape)


def _uniform_noise(rng: np.random.Generator, shape: tuple[int, ...]) -> np.ndarray:
    return rng.uniform(-1.0, 1.0, size=shape)


@dataclass(frozen=True)
class OutcomeRecipe:
    kind: RecipeKind
    tau: Callable[[np.ndarray], np.ndarray]
    baseline: Callable[[np.ndarray], np.ndarray]
    noise: Callable[[np.random.Generator, tuple[int, ...]], np.ndarray]

    def potential_outcomes(
        self, X: np.ndarray, rng: np.random.Generator
    ) -> PotentialOutcomes:
        """
        Draw ``(y0, y1)`` with independent noise per arm.

        The returned ``tau`` is the noise-free effect ``tau(x)``; the drawn outcomes
        differ from it only by the two noise terms.

        Raises:
            DataError: on non-finite covariates, or outcomes that overflow.
        """
        X = check_covariates(X)
        tau = self.tau(X)
        base = self.baseline(X)
        noise = self.noise(rng, (X.shape[0], 2))
        y0 = base + noise[:, 0]
        y1 = base + tau + noise[:, 1]
        if not (np.all(np.isfinite(y0)) and np.all(np.isfinite(y1))):
            raise DataError(
                f"{self.kind} outcomes are not finite; standardize the covariates"
            )
        return PotentialOutcomes(y0, y1, tau)


SIMULATION = OutcomeRecipe("simulation", simulation_tau, simulation_baseline, _normal_noise)
STAR = OutcomeRecipe("star", star_tau, star_baseline, _normal_noise)
NSW = OutcomeRecipe("nsw", nsw_tau, nsw_baseline, _uniform_noise)

RECIPES: dict[str, OutcomeRecipe] = {r.kind: r for r in (SIMULATION, STAR, NSW)}


def star_outcomes(X: np.ndarray, rng: np.random.Generator) -> PotentialOutcomes:
    return STAR.potential_outcomes(X, rng)


def nsw_outcomes(X: np.ndarray, rng: np.random.Generator) -> PotentialOutcomes:
    return NSW.potential_outcomes(X, rng)


def standardize_covariates(X: np.ndarray) -> np.ndarray:
    """Z-score every column (population std); constant columns are only centered."""
    X = check_covariates(X)
    if X.shape[0] == 0:
        return X.copy()
    scale = X.std(axis=0)
    scale[scale == 0.0] = 1.0
    return (X - X.mean(axis=0)) / scale


def min_max_covariates(X: np.ndarray) -> np.ndarray:
    """Rescale every column onto [0, 1]; constant columns become 0."""
    X = check_covariates(X)
    if X.shape[0] == 0:
        return X.copy()
    low = X.min(axis=0)
    span = X.max(axis=0) - low
    span[span == 0.0] = 1.0
    return (X - low) / span


CovariateScaling = Literal["zscore", "minmax", "none"]


def scale_covariates(X: np.ndarray, scaling: CovariateScaling) -> np.ndarray:
    if scaling == "zscore":
        return standardize_covariates(X)
    if scaling == "minmax":
        return min_max_covariates(X)
    return check_covariates(X)


def residual_regression(
    X: np.ndarray, resid: np.ndarray, t: np.ndarray | None = None
) -> ResidualFit:
    """
    Ordinary least squares of ``resid`` on an intercept, the covariates and
    (optionally) the treatment flag, with homoskedastic standard errors.
    """
    X = check_covariates(X)
    columns = [np.ones(X.shape[0]), *X.T]
    if t is not None:
        columns.append(np.asarray(t, dtype=float))
    design = np.column_stack(columns)
    n, k = design.shape
    if n <= k:
        raise DataError(f"need more than {k} rows for a residual regression, got {n}")
    coef, *_ = np.linalg.lstsq(design, resid, rcond=None)
    rss = float(np.sum((resid - design @ coef) ** 2))
    sigma2 = rss / (n - k)
    cov = sigma2 * np.linalg.pinv(design.T @ design)
    return ResidualFit(coef=coef, stderr=np.sqrt(np.diag(cov)))
