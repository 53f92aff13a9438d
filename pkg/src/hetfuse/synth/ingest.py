"""
CSV ingestion of real covariates (e.g. STAR or NSW extracts).

The file is UTF-8, comma-separated, with a header row. A schema maps column names to
roles; rows missing any declared field are dropped and the count is reported.
"""

from collections.abc import Mapping
from dataclasses import dataclass
from pathlib import Path
from typing import Literal, get_args

import numpy as np
import pandas as pd

from hetfuse.exceptions import DataError
from hetfuse.logging import get_logger

logger = get_logger(__name__)

ColumnRole = Literal["covariate", "treatment", "source", "u_flag", "outcome", "ignore"]

_SINGLE_ROLES = ("treatment", "source", "u_flag", "outcome")
_BINARY_ROLES = ("treatment", "source", "u_flag")


@dataclass(frozen=True)
class CovariateTable:
    """Row-aligned covariates plus whichever flag and outcome columns were declared."""

    X: np.ndarray
    covariate_names: tuple[str, ...]
    t: np.ndarray | None = None
    s: np.ndarray | None = None
    u: np.ndarray | None = None
    y: np.ndarray | None = None
    dropped_count: int = 0

    def __len__(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]


def validate_schema(schema: Mapping[str, str], header: list[str]) -> None:
    roles = get_args(ColumnRole)
    for column, role in schema.items():
        if role not in roles:
            raise DataError(f"column '{column}' has unknown role '{role}'")
        if column not in header:
            raise DataError(f"unknown column '{column}' in schema")
    for role in _SINGLE_ROLES:
        columns = [c for c, r in schema.items() if r == role]
        if len(columns) > 1:
            raise DataError(f"role '{role}' assigned to several columns: {columns}")
    if not any(r == "covariate" for r in schema.values()):
        raise DataError("schema declares no covariate column")


def _numeric_column(frame: pd.DataFrame, column: str) -> np.ndarray:
    values = pd.to_numeric(frame[column], errors="coerce").to_numpy(dtype=float)
    bad = np.flatnonzero(~np.isfinite(values))
    if len(bad):
        i = bad[0]
        raw = frame[column].iloc[i]
        raise DataError(
            f"column '{column}' at data row {frame.index[i]}: not a finite number: {raw!r}"
        )
    return values


def _binary_column(frame: pd.DataFrame, column: str) -> np.ndarray:
    values = _numeric_column(frame, column)
    bad = np.flatnonzero((values != 0.0) & (values != 1.0))
    if len(bad):
        i = bad[0]
        raise DataError(
            f"column '{column}' at data row {frame.index[i]}: "
            f"non-binary value {values[i]:g}"
        )
    return values.astype(int)


def ingest_covariates_csv(
    path: str | Path, schema: Mapping[str, ColumnRole]
) -> CovariateTable:
    """
    Read a covariate extract according to ``schema``.

    Args:
        path: CSV file with a header row
        schema: Column name -> role. Columns absent from the schema are ignored.

    Returns:
        CovariateTable: covariates in schema order and the declared flag/outcome columns

    Raises:
        DataError: on an unreadable file, an unknown column or role, a malformed
            value, or when no row survives the missing-field filter.
    """
    path = Path(path)
    try:
        frame = pd.read_csv(path, dtype=str, encoding="utf-8", skipinitialspace=True)
    except (OSError, UnicodeDecodeError, pd.errors.ParserError) as e:
        raise DataError(f"cannot read {path}: {e}") from e
    except pd.errors.EmptyDataError:
        raise DataError(f"{path} has no header row") from None

    validate_schema(schema, list(frame.columns))
    declared = [c for c, role in schema.items() if role != "ignore"]
    missing = frame[declared].isna().any(axis=1)
    dropped = int(missing.sum())
    frame = frame.loc[~missing]
    if dropped:
        logger.warning("Dropped %d rows with missing fields from %s", dropped, path)
    if frame.empty:
        raise DataError(f"zero surviving rows in {path}")

    covariates = [c for c, role in schema.items() if role == "covariate"]
    X = np.column_stack([_numeric_column(frame, c) for c in covariates])
    by_role = {role: c for c, role in schema.items() if role in _SINGLE_ROLES}
    columns: dict[str, np.ndarray | None] = {}
    for role in _SINGLE_ROLES:
        column = by_role.get(role)
        if column is None:
            columns[role] = None
        elif role in _BINARY_ROLES:
            columns[role] = _binary_column(frame, column)
        else:
            columns[role] = _numeric_column(frame, column)

    logger.info("Ingested %d rows (p=%d) from %s", len(frame), len(covariates), path)
    return CovariateTable(
        X=X,
        covariate_names=tuple(covariates),
        t=columns["treatment"],
        s=columns["source"],
        u=columns["u_flag"],
        y=columns["outcome"],
        dropped_count=dropped,
    )
