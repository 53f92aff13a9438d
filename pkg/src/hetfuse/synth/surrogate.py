"""
Offline covariate surrogates for the STAR- and NSW-style benchmarks.

The real extracts cannot be shipped, so these generators produce tables with the same
column layout and group sizes. They are stand-ins for exercising the pipeline and
are labeled ``*_surrogate`` wherever results are reported.
"""

import numpy as np

from hetfuse.seeding import child_rng
from hetfuse.synth.ingest import CovariateTable

STAR_COLUMNS = (
    "gender",
    "race",
    "birth_month",
    "birthday",
    "birth_year",
    "free_lunch",
    "teacher_id",
)
STAR_STUDENTS = 4139
STAR_TREATED = 1774

NSW_COLUMNS = ("age", "education", "black", "hispanic", "married", "nodegree")
NSW_TREATED = 297
NSW_CONTROL = 425
NSW_PSID = 2490


def star_surrogate(n_students: int = STAR_STUDENTS, seed: int = 0) -> CovariateTable:
    """
    Seven STAR-like columns, a small-class treatment flag and a rural/inner-city flag.

    Treatment is Bernoulli(1774 / 4139). The u-flag is more likely for non-white
    students and for students on free lunch.
    """
    rng = child_rng(seed, "star_surrogate")
    n = n_students
    race = rng.binomial(1, 0.33, size=n)
    free_lunch = rng.binomial(1, 0.5, size=n)
    X = np.column_stack(
        [
            rng.binomial(1, 0.5, size=n),
            race,
            rng.integers(1, 13, size=n),
            rng.integers(1, 29, size=n),
            rng.integers(1979, 1982, size=n),
            free_lunch,
            rng.integers(1, 81, size=n),
        ]
    ).astype(float)
    t = rng.binomial(1, STAR_TREATED / STAR_STUDENTS, size=n)
    u = rng.binomial(1, 0.45 + 0.3 * race + 0.2 * free_lunch)
    return CovariateTable(X=X, covariate_names=STAR_COLUMNS, t=t, u=u)


def _nsw_block(
    rng: np.random.Generator,
    n: int,
    age: tuple[int, int],
    education: tuple[int, int],
    black: float,
    hispanic: float,
    married: float,
) -> np.ndarray:
    years = rng.integers(*education, size=n)
    is_black = rng.binomial(1, black, size=n)
    # Ethnicity dummies are exclusive.
    is_hispanic = (1 - is_black) * rng.binomial(1, hispanic / (1.0 - black), size=n)
    return np.column_stack(
        [
            rng.integers(*age, size=n),
            years,
            is_black,
            is_hispanic,
            rng.binomial(1, married, size=n),
            (years < 12).astype(int),
        ]
    ).astype(float)


def nsw_surrogate(
    n_treated: int = NSW_TREATED,
    n_control: int = NSW_CONTROL,
    n_psid: int = NSW_PSID,
    seed: int = 0,
) -> tuple[CovariateTable, CovariateTable]:
    """
    NSW-like randomized pool (both arms) and a PSID-like control pool.

    The observational controls are older, more educated and more often married than
    the randomized participants, mirroring the selection gap of the real data.
    """
    rng = child_rng(seed, "nsw_surrogate")
    n_randomized = n_treated + n_control
    randomized = _nsw_block(rng, n_randomized, (17, 56), (3, 17), 0.80, 0.10, 0.16)
    t = np.concatenate([np.ones(n_treated, dtype=int), np.zeros(n_control, dtype=int)])
    psid = _nsw_block(rng, n_psid, (18, 56), (8, 18), 0.25, 0.03, 0.87)
    return (
        CovariateTable(X=randomized, covariate_names=NSW_COLUMNS, t=t),
        CovariateTable(
            X=psid, covariate_names=NSW_COLUMNS, t=np.zeros(n_psid, dtype=int)
        ),
    )
