"""
Core data model: units, immutable datasets, group partitioning, merging and
treatment inversion.

A dataset mixes two sources. ``s = 1`` marks randomized-trial (RCT) units and
``s = 0`` observational (OS) units. The dummy treatment ``d = t * (1 - s)`` singles
out OS treated units, which form the pseudo-experimental group used to learn the
confounding function.
"""

import math
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass, replace
from functools import cached_property
from typing import NamedTuple

import numpy as np

from hetfuse.exceptions import DataError
from hetfuse.logging import get_logger

logger = get_logger(__name__)


class Row(NamedTuple):
    """Raw input row accepted by :func:`build_dataset`."""

    x: Sequence[float]
    t: int
    s: int
    y: float
    y0_true: float | None = None
    y1_true: float | None = None
    u: int | None = None


@dataclass(frozen=True)
class Unit:
    """One subject: covariates, treatment, source, outcome and optional ground truth."""

    x: tuple[float, ...]
    t: int
    s: int
    y: float
    y0_true: float | None = None
    y1_true: float | None = None
    tau_true: float | None = None
    # Stratum flag used by the STAR-style fusion split (rural / inner-city = 1).
    u: int | None = None

    def __post_init__(self) -> None:
        _check_unit(self)

    @property
    def d(self) -> int:
        """Pseudo label D = T(1 - S): 1 only for OS treated units."""
        return self.t * (1 - self.s)

    @property
    def has_truth(self) -> bool:
        return self.y0_true is not None and self.y1_true is not None


def _check_binary(value: object, name: str, where: str) -> int:
    try:
        as_float = float(value)  # type: ignore[arg-type]
    except (TypeError, ValueError):
        raise DataError(f"non-binary {name}{where}: {value!r}") from None
    if as_float not in (0.0, 1.0):
        raise DataError(f"non-binary {name}{where}: {value!r}")
    return int(as_float)


def _check_unit(unit: Unit, row: int | None = None) -> None:
    where = f" at row {row}" if row is not None else ""
    if unit.t not in (0, 1):
        raise DataError(f"non-binary treatment{where}")
    if unit.s not in (0, 1):
        raise DataError(f"non-binary source{where}")
    if unit.u is not None and unit.u not in (0, 1):
        raise DataError(f"non-binary u-flag{where}")
    if unit.has_truth:
        expected_tau = unit.y1_true - unit.y0_true  # type: ignore[operator]
        if unit.tau_true != expected_tau:
            raise DataError(f"tau_true != y1_true - y0_true{where}")
        observed = unit.y1_true if unit.t == 1 else unit.y0_true
        if unit.y != observed:
            raise DataError(f"observed outcome is not the t-arm potential outcome{where}")
    elif unit.tau_true is not None:
        raise DataError(f"tau_true given without both potential outcomes{where}")


def make_unit(
    x: Sequence[float],
    t: int,
    s: int,
    y: float,
    y0_true: float | None = None,
    y1_true: float | None = None,
    u: int | None = None,
    row: int | None = None,
) -> Unit:
    """Coerce raw values into a validated :class:`Unit`.

    ``tau_true`` is derived from the potential outcomes when both are present.
    """
    where = f" at row {row}" if row is not None else ""
    t_int = _check_binary(t, "treatment", where)
    s_int = _check_binary(s, "source", where)
    u_int = None if u is None else _check_binary(u, "u-flag", where)
    y0 = None if y0_true is None else float(y0_true)
    y1 = None if y1_true is None else float(y1_true)
    tau = y1 - y0 if (y0 is not None and y1 is not None) else None
    return Unit(
        x=tuple(float(v) for v in x),
        t=t_int,
        s=s_int,
        y=float(y),
        y0_true=y0,
        y1_true=y1,
        tau_true=tau,
        u=u_int,
    )


class GroupSizes(NamedTuple):
    """Group counts: OS (m, m_t, m_c) and RCT (n, n_t, n_c)."""

    m: int
    m_t: int
    m_c: int
    n: int
    n_t: int
    n_c: int


@dataclass(frozen=True)
class Dataset:
    """Immutable ordered collection of units sharing covariate dimension ``p``.

    Columnar views (``X``, ``t``, ...) are computed lazily and returned read-only.
    """

    units: tuple[Unit, ...]
    p: int

    def __post_init__(self) -> None:
        if self.p < 0:
            raise DataError(f"covariate dimension must be nonnegative, got {self.p}")
        for i, unit in enumerate(self.units):
            if len(unit.x) != self.p:
                raise DataError(
                    f"dimension mismatch at row {i}: expected {self.p}, got {len(unit.x)}"
                )

    def __len__(self) -> int:
        return len(self.units)

    def __iter__(self) -> Iterator[Unit]:
        return iter(self.units)

    @staticmethod
    def _readonly(values: np.ndarray) -> np.ndarray:
        values.setflags(write=False)
        return values

    @cached_property
    def X(self) -> np.ndarray:
        if not self.units:
            return self._readonly(np.zeros((0, self.p)))
        return self._readonly(np.array([u.x for u in self.units], dtype=float))

    @cached_property
    def t(self) -> np.ndarray:
        return self._readonly(np.array([u.t for u in self.units], dtype=int))

    @cached_property
    def s(self) -> np.ndarray:
        return self._readonly(np.array([u.s for u in self.units], dtype=int))

    @cached_property
    def y(self) -> np.ndarray:
        return self._readonly(np.array([u.y for u in self.units], dtype=float))

    @cached_property
    def d(self) -> np.ndarray:
        """Pseudo labels D = T(1 - S) for every unit."""
        return self._readonly(self.t * (1 - self.s))

    @cached_property
    def tau_true(self) -> np.ndarray:
        """Ground-truth effects; NaN where a unit carries none."""
        return self._readonly(
            np.array(
                [math.nan if u.tau_true is None else u.tau_true for u in self.units],
                dtype=float,
            )
        )

    @property
    def has_truth(self) -> bool:
        return bool(self.units) and all(u.has_truth for u in self.units)

    def group_sizes(self) -> GroupSizes:
        t, s = self.t, self.s
        m_t = int(np.sum((t == 1) & (s == 0)))
        m_c = int(np.sum((t == 0) & (s == 0)))
        n_t = int(np.sum((t == 1) & (s == 1)))
        n_c = int(np.sum((t == 0) & (s == 1)))
        return GroupSizes(m_t + m_c, m_t, m_c, n_t + n_c, n_t, n_c)

    def take(self, indices: Iterable[int]) -> "Dataset":
        """New dataset holding the units at ``indices``, in that order."""
        return Dataset(tuple(self.units[int(i)] for i in indices), self.p)

    def where(self, mask: np.ndarray) -> "Dataset":
        """New dataset of the units selected by a boolean mask, order preserved."""
        return self.take(np.flatnonzero(np.asarray(mask, dtype=bool)))

    @property
    def treated(self) -> "Dataset":
        return self.where(self.t == 1)

    @property
    def control(self) -> "Dataset":
        return self.where(self.t == 0)

    def has_both_arms(self) -> bool:
        return bool(np.any(self.t == 1)) and bool(np.any(self.t == 0))


@dataclass(frozen=True)
class Partition:
    """The four disjoint (source, treatment) cells of a dataset."""

    os_treated: Dataset
    os_control: Dataset
    rct_treated: Dataset
    rct_control: Dataset

    def as_dict(self) -> dict[str, Dataset]:
        return {
            "os_treated": self.os_treated,
            "os_control": self.os_control,
            "rct_treated": self.rct_treated,
            "rct_control": self.rct_control,
        }


def build_dataset(rows: Iterable[Sequence], p: int | None = None) -> Dataset:
    """
    Build an immutable dataset from raw rows.

    Each row is ``(x, t, s, y[, y0_true, y1_true[, u]])``. When ``p`` is not given it is
    taken from the first row (an empty input then yields ``p = 0``).

    Raises:
        DataError: on a dimension mismatch or a non-binary flag, naming the row index.
    """
    units: list[Unit] = []
    for i, raw in enumerate(rows):
        row = raw if isinstance(raw, Row) else Row(*raw)
        if p is None:
            p = len(row.x)
        if len(row.x) != p:
            raise DataError(
                f"dimension mismatch at row {i}: expected {p}, got {len(row.x)}"
            )
        units.append(make_unit(*row, row=i))
    return Dataset(tuple(units), 0 if p is None else p)


def dataset_from_arrays(
    X: np.ndarray,
    t: np.ndarray,
    s: np.ndarray,
    y: np.ndarray,
    y0_true: np.ndarray | None = None,
    y1_true: np.ndarray | None = None,
    u: np.ndarray | None = None,
) -> Dataset:
    """Columnar constructor used by the generators and CSV ingestion."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise DataError(f"covariates must be a 2-D matrix, got shape {X.shape}")
    n, p = X.shape
    columns = {"t": t, "s": s, "y": y, "y0_true": y0_true, "y1_true": y1_true, "u": u}
    for name, values in columns.items():
        if values is not None and len(values) != n:
            raise DataError(f"column '{name}' has {len(values)} rows, expected {n}")
    rows = (
        Row(
            X[i],
            t[i],
            s[i],
            y[i],
            None if y0_true is None else y0_true[i],
            None if y1_true is None else y1_true[i],
            None if u is None else u[i],
        )
        for i in range(n)
    )
    return build_dataset(rows, p=p)


def partition(ds: Dataset) -> Partition:
    """Split ``ds`` into its OS/RCT x treated/control cells (empty cells allowed)."""
    t, s = ds.t, ds.s
    return Partition(
        os_treated=ds.where((t == 1) & (s == 0)),
        os_control=ds.where((t == 0) & (s == 0)),
        rct_treated=ds.where((t == 1) & (s == 1)),
        rct_control=ds.where((t == 0) & (s == 1)),
    )


def _invert_unit(unit: Unit) -> Unit:
    if unit.has_truth:
        return replace(
            unit,
            t=1 - unit.t,
            y0_true=unit.y1_true,
            y1_true=unit.y0_true,
            tau_true=unit.y0_true - unit.y1_true,  # type: ignore[operator]
        )
    return replace(unit, t=1 - unit.t)


def invert_treatments(ds: Dataset) -> Dataset:
    """
    Flip every treatment flag.

    Potential outcomes are swapped and ``tau_true`` negated so unit invariants keep
    holding; ``x``, ``s`` and ``y`` are unchanged. Applying it twice is the identity.
    """
    return Dataset(tuple(_invert_unit(u) for u in ds.units), ds.p)


def merge(a: Dataset, b: Dataset) -> Dataset:
    """Concatenate two datasets, ``a``'s units first."""
    if a.p != b.p:
        raise DataError(f"cannot merge datasets of dimension {a.p} and {b.p}")
    return Dataset(a.units + b.units, a.p)


def replace_outcomes(ds: Dataset, y: np.ndarray) -> Dataset:
    """
    New dataset with observed outcomes replaced where they differ.

    A unit whose outcome changes no longer observes one of its potential outcomes, so
    its ground-truth fields are dropped.
    """
    y = np.asarray(y, dtype=float)
    if len(y) != len(ds):
        raise DataError(f"got {len(y)} outcomes for {len(ds)} units")
    units = tuple(
        unit
        if unit.y == float(new_y)
        else replace(unit, y=float(new_y), y0_true=None, y1_true=None, tau_true=None)
        for unit, new_y in zip(ds.units, y, strict=True)
    )
    return Dataset(units, ds.p)


def with_source(ds: Dataset, s: int) -> Dataset:
    """Same units relabeled as coming from source ``s`` (1 = RCT, 0 = OS)."""
    s = _check_binary(s, "source", "")
    return Dataset(tuple(replace(unit, s=s) for unit in ds.units), ds.p)


def truth_columns(ds: Dataset) -> tuple[np.ndarray, np.ndarray]:
    """``(y0_true, y1_true)`` as float arrays, NaN where a unit carries no truth."""
    y0 = [math.nan if u.y0_true is None else u.y0_true for u in ds.units]
    y1 = [math.nan if u.y1_true is None else u.y1_true for u in ds.units]
    return np.array(y0, dtype=float), np.array(y1, dtype=float)


def u_flags(ds: Dataset) -> np.ndarray:
    """Stratum flags of every unit.

    Raises:
        DataError: naming the first unit without a flag.
    """
    for i, unit in enumerate(ds.units):
        if unit.u is None:
            raise DataError(f"missing u-flag at row {i}")
    return np.array([u.u for u in ds.units], dtype=int)
