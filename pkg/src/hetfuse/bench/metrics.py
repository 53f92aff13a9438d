"""Evaluation metrics: sqrt(PEHE), run summaries and Welch's two-sample t-test."""

import math
from collections.abc import Sequence

import numpy as np
from numpy.typing import ArrayLike
from pydantic import BaseModel, ConfigDict
from scipy import stats

from hetfuse.exceptions import DataError


class Summary(BaseModel):
    """Mean and population standard deviation of a metric over runs."""

    model_config = ConfigDict(frozen=True)

    mean: float
    std: float
    n_runs: int


def pehe(tau_true: ArrayLike, tau_hat: ArrayLike) -> float:
    """
    Square root of the mean squared error between true and estimated effects,
    averaged over the ``N`` given units.

    Raises:
        DataError: on empty or unequal-length inputs, or non-finite values.
    """
    tau_true = np.asarray(tau_true, dtype=float)
    tau_hat = np.asarray(tau_hat, dtype=float)
    if tau_true.shape != tau_hat.shape or tau_true.ndim != 1:
        raise DataError(
            f"effect vectors differ in shape: {tau_true.shape} vs {tau_hat.shape}"
        )
    if len(tau_true) == 0:
        raise DataError("PEHE over zero units")
    if not (np.all(np.isfinite(tau_true)) and np.all(np.isfinite(tau_hat))):
        raise DataError("PEHE needs finite effects")
    return float(np.sqrt(np.mean((tau_true - tau_hat) ** 2)))


def summarize(values: Sequence[float]) -> Summary:
    """
    Mean and population std. Values are sorted first, so the result does not depend
    on the order in which runs finished.
    """
    if len(values) == 0:
        raise DataError("cannot summarize zero runs")
    ordered = np.sort(np.asarray(values, dtype=float))
    std = 0.0 if len(ordered) == 1 else float(np.std(ordered))
    return Summary(mean=float(np.mean(ordered)), std=std, n_runs=len(ordered))


def welch_t(a: Sequence[float], b: Sequence[float]) -> float:
    """
    Two-sided p-value of Welch's unequal-variance t-test.

    Two zero-variance samples are compared directly: equal means give 1, different
    means give 0.
    """
    a_arr = np.asarray(a, dtype=float)
    b_arr = np.asarray(b, dtype=float)
    if len(a_arr) < 2 or len(b_arr) < 2:
        raise DataError("Welch's t-test needs at least two values per sample")
    if np.ptp(a_arr) == 0.0 and np.ptp(b_arr) == 0.0:
        return 1.0 if a_arr[0] == b_arr[0] else 0.0
    result = stats.ttest_ind(a_arr, b_arr, equal_var=False)
    p_value = float(result.pvalue)
    return 1.0 if math.isnan(p_value) else min(max(p_value, 0.0), 1.0)
