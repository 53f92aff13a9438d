import numpy as np
import pytest

from hetfuse.exceptions import DataError
from hetfuse.seeding import make_rng
from hetfuse.synth.recipes import (
    NSW,
    STAR,
    min_max_covariates,
    nsw_baseline,
    nsw_outcomes,
    nsw_tau,
    residual_regression,
    scale_covariates,
    simulation_confounding,
    simulation_tau,
    standardize_covariates,
    star_baseline,
    star_outcomes,
    star_tau,
)


def _row_with_sum(total: float, p: int = 4) -> np.ndarray:
    return np.full((1, p), total / p)


def test_simulation_effect_at_origin():
    assert simulation_tau(np.zeros((1, 5))).tolist() == [1.0]


def test_simulation_confounding_function():
    assert simulation_confounding(_row_with_sum(2.0), beta=0.5) == pytest.approx(10.0)
    X = make_rng(0).normal(size=(20, 5))
    assert np.all(simulation_confounding(X, beta=0.0) == 0.0)


def test_star_effect_examples():
    zero = np.zeros((1, 7))
    assert star_tau(zero).tolist() == [0.0]
    assert star_baseline(zero).tolist() == [0.0]
    assert star_tau(_row_with_sum(4.0)) == pytest.approx(6.0)
    assert star_tau(_row_with_sum(-1.0)) == pytest.approx(0.0)


def test_nsw_effect_examples():
    assert nsw_tau(np.zeros((1, 6))).tolist() == [0.0]
    assert nsw_baseline(np.zeros((1, 6))).tolist() == [12.0]
    assert nsw_tau(np.ones((1, 6))).tolist() == [6.0]


def test_nsw_noise_is_bounded():
    X = make_rng(1).normal(size=(500, 6))
    draw = NSW.potential_outcomes(X, make_rng(2))
    base = nsw_baseline(X)
    assert np.all(np.abs(draw.y0 - base) <= 1.0)
    assert np.all(np.abs(draw.y1 - base - nsw_tau(X)) <= 1.0)
    assert np.array_equal(draw.tau, nsw_tau(X))


def test_arms_draw_independent_noise():
    X = np.zeros((200, 3))
    draw = STAR.potential_outcomes(X, make_rng(3))
    assert not np.allclose(draw.y1 - draw.y0, draw.tau)


def test_non_finite_covariates_are_rejected():
    X = np.zeros((3, 2))
    X[0, 1] = np.nan
    with pytest.raises(DataError, match=r"non-finite covariate at \(0, 1\)"):
        STAR.potential_outcomes(X, make_rng(0))


def test_overflowing_outcomes_are_rejected():
    with pytest.raises(DataError, match="standardize"):
        NSW.potential_outcomes(np.full((2, 6), 1000.0), make_rng(0))


def test_standardize_covariates():
    X = np.column_stack([np.arange(10.0), np.full(10, 3.0)])
    Z = standardize_covariates(X)
    np.testing.assert_allclose(Z.mean(axis=0), 0.0, atol=1e-12)
    assert Z[:, 0].std() == pytest.approx(1.0)
    assert np.all(Z[:, 1] == 0.0)


def test_min_max_covariates():
    X = np.column_stack([np.array([2.0, 6.0, 4.0]), np.full(3, -1.0)])
    np.testing.assert_allclose(min_max_covariates(X), [[0.0, 0.0], [1.0, 0.0], [0.5, 0.0]])


@pytest.mark.parametrize("scaling", ["zscore", "minmax", "none"])
def test_scale_covariates_dispatch(scaling):
    X = np.column_stack([np.arange(5.0), np.arange(5.0) ** 2])
    expected = {
        "zscore": standardize_covariates(X),
        "minmax": min_max_covariates(X),
        "none": X,
    }[scaling]
    np.testing.assert_allclose(scale_covariates(X, scaling), expected)


def test_residual_regression_recovers_coefficients():
    rng = make_rng(4)
    X = rng.normal(size=(400, 2))
    t = rng.binomial(1, 0.5, size=400)
    resid = 1.0 + 2.0 * X[:, 0] - 3.0 * t + 0.01 * rng.normal(size=400)
    fitted = residual_regression(X, resid, t)
    np.testing.assert_allclose(fitted.coef, [1.0, 2.0, 0.0, -3.0], atol=0.01)
    assert np.all(fitted.stderr > 0)


def test_residual_regression_needs_more_rows_than_columns():
    with pytest.raises(DataError, match="need more than 3 rows"):
        residual_regression(np.zeros((3, 2)), np.zeros(3))


@pytest.mark.parametrize(
    ("draw", "tau", "baseline", "p"),
    [(star_outcomes, star_tau, star_baseline, 7), (nsw_outcomes, nsw_tau, nsw_baseline, 6)],
    ids=["star", "nsw"],
)
def test_outcome_recipes_centre_on_their_laws(draw, tau, baseline, p):
    X = make_rng(4).normal(size=(20_000, p)) * 0.3
    outcomes = draw(X, make_rng(5))
    np.testing.assert_array_equal(outcomes.tau, tau(X))
    assert abs(np.mean(outcomes.y0 - baseline(X))) < 0.05
    assert abs(np.mean(outcomes.y1 - baseline(X) - tau(X))) < 0.05
    np.testing.assert_array_equal(draw(X, make_rng(5)).y1, outcomes.y1)
