"""
Biased OS / RCT / test split constructors for the semi-synthetic benchmarks.

Both constructors take units that already carry simulated potential outcomes. The
STAR-style split injects bias by keeping only the lower half of the treated outcomes
in the OS data; the NSW-style split keeps the upper half of the observational
controls and then flips every treatment label, leaving an OS sample without controls.
"""

import math
from dataclasses import dataclass

import numpy as np

from hetfuse.dataset import Dataset, invert_treatments, merge, u_flags, with_source
from hetfuse.exceptions import DataError
from hetfuse.logging import get_logger
from hetfuse.seeding import child_rng

logger = get_logger(__name__)

MAX_DRAW_ATTEMPTS = 100


@dataclass(frozen=True)
class FusionSplit:
    """Training OS and RCT data plus a test split whose units carry ``tau_true``."""

    os: Dataset
    rct: Dataset
    test: Dataset

    def as_dict(self) -> dict[str, Dataset]:
        return {"os": self.os, "rct": self.rct, "test": self.test}


def _lower_half(indices: np.ndarray, y: np.ndarray) -> np.ndarray:
    """``floor(k/2)`` indices with the smallest outcomes; ties keep input order."""
    order = np.argsort(y[indices], kind="stable")
    return indices[order[: len(indices) // 2]]


def _upper_half(indices: np.ndarray, y: np.ndarray) -> np.ndarray:
    order = np.argsort(-y[indices], kind="stable")
    return indices[order[: len(indices) // 2]]


def construct_star_fusion(
    units: Dataset, trial_fraction: float, seed: int
) -> FusionSplit:
    """
    Build a STAR-style split.

    - RCT: ``floor(trial_fraction * n_u1)`` units drawn at random from the ``u = 1``
      stratum, keeping their original treatment.
    - OS: in each stratum, every non-trial control plus the non-trial treated units
      whose outcomes fall in the bottom half of all treated units of that stratum,
      trial units included.
    - Test: every unit outside the RCT.

    Raises:
        DataError: when a unit has no u-flag or ``trial_fraction`` is outside [0, 1].
    """
    if not 0.0 <= trial_fraction <= 1.0:
        raise DataError(f"trial_fraction must lie in [0, 1], got {trial_fraction}")
    u = u_flags(units)
    t, y = units.t, units.y

    stratum = np.flatnonzero(u == 1)
    n_trial = math.floor(trial_fraction * len(stratum))
    rng = child_rng(seed, "star", "trial")
    trial = np.sort(rng.choice(stratum, size=n_trial, replace=False))
    in_trial = np.zeros(len(units), dtype=bool)
    in_trial[trial] = True

    os_parts = []
    for flag in (1, 0):
        eligible = (u == flag) & ~in_trial
        os_parts.append(np.flatnonzero(eligible & (t == 0)))
        bottom = _lower_half(np.flatnonzero((u == flag) & (t == 1)), y)
        os_parts.append(bottom[~in_trial[bottom]])
    os_idx = np.sort(np.concatenate(os_parts))

    split = FusionSplit(
        os=with_source(units.take(os_idx), 0),
        rct=with_source(units.take(trial), 1),
        test=with_source(units.where(~in_trial), 1),
    )
    logger.info(
        "STAR-style split: rct=%d os=%d test=%d",
        len(split.rct),
        len(split.os),
        len(split.test),
    )
    return split


def _draw_trial(randomized: Dataset, n_rct_draw: int, seed: int) -> np.ndarray:
    for attempt in range(MAX_DRAW_ATTEMPTS):
        rng = child_rng(seed, "nsw", "rct", attempt)
        idx = np.sort(rng.choice(len(randomized), size=n_rct_draw, replace=False))
        if randomized.take(idx).has_both_arms():
            if attempt:
                logger.info("RCT draw needed %d retries to contain both arms", attempt)
            return idx
    raise DataError(
        f"no two-armed RCT draw of {n_rct_draw} units after {MAX_DRAW_ATTEMPTS} attempts"
    )


def construct_nsw_fusion(
    randomized: Dataset, psid_controls: Dataset, n_rct_draw: int, seed: int
) -> FusionSplit:
    """
    Build an NSW-style split with an OS sample that lacks one arm.

    - RCT: ``n_rct_draw`` randomized units; a single-armed draw is retried under the
      next derived seed.
    - OS: the upper half of the observational controls by simulated outcome.
    - Test: the remaining randomized units followed by the remaining controls.

    All three splits are then passed through :func:`invert_treatments`, so the OS
    controls become treated units and the ground truth is stated for the flipped
    labels.

    Raises:
        DataError: on a one-armed randomized pool, treated observational units, or a
            draw larger than the pool.
    """
    if not randomized.has_both_arms():
        raise DataError("randomized pool must contain both arms")
    if np.any(psid_controls.t != 0):
        raise DataError("observational pool must contain controls only")
    if randomized.p != psid_controls.p:
        raise DataError(f"pools differ in dimension: {randomized.p} vs {psid_controls.p}")
    if n_rct_draw > len(randomized):
        raise DataError(
            f"n_rct_draw={n_rct_draw} exceeds the randomized pool of {len(randomized)}"
        )

    trial = _draw_trial(randomized, n_rct_draw, seed)
    in_trial = np.zeros(len(randomized), dtype=bool)
    in_trial[trial] = True

    os_idx = np.sort(_upper_half(np.arange(len(psid_controls)), psid_controls.y))
    in_os = np.zeros(len(psid_controls), dtype=bool)
    in_os[os_idx] = True

    test = merge(randomized.where(~in_trial), psid_controls.where(~in_os))
    split = FusionSplit(
        os=invert_treatments(with_source(psid_controls.take(os_idx), 0)),
        rct=invert_treatments(with_source(randomized.take(trial), 1)),
        test=invert_treatments(with_source(test, 1)),
    )
    logger.info(
        "NSW-style split: rct=%d os=%d test=%d (labels inverted)",
        len(split.rct),
        len(split.os),
        len(split.test),
    )
    return split
