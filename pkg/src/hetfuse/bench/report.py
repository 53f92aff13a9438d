"""
Result writers.

CSV files use six-decimal floats and are written atomically (temp file, then rename)
so identical inputs always give identical bytes. Results files open with a comment
header recording the tool version and the SHA-256 of the run configuration.
"""

import hashlib
import io
import os
import tempfile
from collections.abc import Sequence
from pathlib import Path

import pandas as pd
import yaml

from hetfuse import __version__
from hetfuse.bench.experiment import ResultRow, SummaryRow, SweepTable
from hetfuse.bench.metrics import welch_t
from hetfuse.dataset import Dataset, truth_columns
from hetfuse.exceptions import ReportError
from hetfuse.logging import get_logger
from hetfuse.synth.fusion import FusionSplit

logger = get_logger(__name__)

FLOAT_FORMAT = "%.6f"
DETAIL_COLUMNS = [
    "dataset",
    "method",
    "base_model",
    "p_r",
    "beta",
    "os_control_count",
    "run_index",
    "seed",
    "sqrt_pehe",
]
SUMMARY_COLUMNS = [
    "dataset",
    "method",
    "base_model",
    "p_r",
    "beta",
    "os_control_count",
    "n_runs",
    "mean",
    "std",
]


def config_digest(config_bytes: bytes) -> str:
    return hashlib.sha256(config_bytes).hexdigest()


def write_atomic(path: Path, content: str) -> None:
    """Write ``content`` to a sibling temp file and rename it over ``path``.

    Raises:
        ReportError: if the directory is missing or not writable.
    """
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
                f.write(content)
            os.replace(tmp_name, path)
        except BaseException:
            Path(tmp_name).unlink(missing_ok=True)
            raise
    except OSError as e:
        raise ReportError(f"Failed to write {path}: {e}") from e


def _to_csv(frame: pd.DataFrame) -> str:
    buffer = io.StringIO()
    frame.to_csv(
        buffer, index=False, float_format=FLOAT_FORMAT, na_rep="", lineterminator="\n"
    )
    return buffer.getvalue()


def _frame(records: Sequence[dict], columns: list[str]) -> pd.DataFrame:
    frame = pd.DataFrame.from_records(list(records), columns=columns)
    frame["os_control_count"] = pd.array(frame["os_control_count"], dtype="Int64")
    for column in ("p_r", "beta"):
        frame[column] = frame[column].astype(float)
    return frame


def detail_frame(rows: Sequence[ResultRow]) -> pd.DataFrame:
    frame = _frame([row.model_dump() for row in rows], DETAIL_COLUMNS)
    frame["sqrt_pehe"] = frame["sqrt_pehe"].astype(float)
    return frame


def summary_frame(summaries: Sequence[SummaryRow]) -> pd.DataFrame:
    frame = _frame([row.model_dump() for row in summaries], SUMMARY_COLUMNS)
    for column in ("mean", "std"):
        frame[column] = frame[column].astype(float)
    return frame


def _header(digest: str, base_seed: int) -> str:
    return (
        f"# hetfuse {__version__}\n"
        f"# config_sha256: {digest}\n"
        f"# base_seed: {base_seed}\n"
    )


def render_results(table: SweepTable, digest: str, base_seed: int) -> str:
    """Detail rows, then a ``# summary`` section of mean / std rows."""
    return (
        _header(digest, base_seed)
        + _to_csv(detail_frame(table.rows))
        + "# summary\n"
        + _to_csv(summary_frame(table.summaries))
    )


def render_sweep(table: SweepTable, axis: str, digest: str, base_seed: int) -> str:
    """Long format: one summary row per (axis value, method, base model)."""
    return _header(digest, base_seed) + f"# axis: {axis}\n" + _to_csv(
        summary_frame(table.summaries)
    )


def write_results(path: Path, table: SweepTable, digest: str, base_seed: int) -> None:
    write_atomic(path, render_results(table, digest, base_seed))
    logger.info("Wrote %d result rows to %s", len(table.rows), path)


def write_sweep(
    path: Path, table: SweepTable, axis: str, digest: str, base_seed: int
) -> None:
    write_atomic(path, render_sweep(table, axis, digest, base_seed))
    logger.info("Wrote %d sweep rows to %s", len(table.summaries), path)


def dataset_frame(ds: Dataset) -> pd.DataFrame:
    """Columns ``x_0 .. x_{p-1}, t, s, y, y0_true, y1_true, tau_true``."""
    frame = pd.DataFrame(ds.X, columns=[f"x_{j}" for j in range(ds.p)])
    frame["t"] = ds.t
    frame["s"] = ds.s
    frame["y"] = ds.y
    y0, y1 = truth_columns(ds)
    frame["y0_true"] = y0
    frame["y1_true"] = y1
    frame["tau_true"] = ds.tau_true
    return frame


def write_split(out_dir: Path, split: FusionSplit) -> list[Path]:
    """Write ``os.csv``, ``rct.csv`` and ``test.csv`` into ``out_dir``."""
    paths = []
    for name, ds in split.as_dict().items():
        path = Path(out_dir) / f"{name}.csv"
        write_atomic(path, _to_csv(dataset_frame(ds)))
        paths.append(path)
    logger.info("Wrote split files to %s", out_dir)
    return paths


def _significance(table: SweepTable, reference: str) -> list[dict]:
    """Welch p-values of every method against ``reference`` per model and axis point."""
    entries = []
    for row in table.summaries:
        if row.method == reference or row.n_runs < 2:
            continue
        axes = {"p_r": row.p_r, "beta": row.beta, "os_control_count": row.os_control_count}
        ours = table.values(reference, row.base_model, **axes)
        theirs = table.values(row.method, row.base_model, **axes)
        if len(ours) < 2:
            continue
        entries.append(
            {
                "method": row.method,
                "base_model": row.base_model,
                **axes,
                "p_value": round(welch_t(ours, theirs), 6),
            }
        )
    return entries


def build_yaml_report(table: SweepTable, digest: str, base_seed: int) -> str:
    """Human-readable summary: mean / std per cell and Welch p-values against CIO."""
    reference = next(
        (m for m in ("cio", "cio_io") if any(s.method == m for s in table.summaries)),
        None,
    )
    report = {
        "hetfuse_report": {
            "version": __version__,
            "config_sha256": digest,
            "base_seed": base_seed,
            "summaries": [
                {
                    **row.model_dump(),
                    "mean": round(row.mean, 6),
                    "std": round(row.std, 6),
                }
                for row in table.summaries
            ],
            "significance": {
                "test": "welch_t",
                "reference": reference,
                "comparisons": _significance(table, reference) if reference else [],
            },
        }
    }
    return yaml.dump(report, sort_keys=False, allow_unicode=True, width=120)


def write_yaml_report(path: Path, table: SweepTable, digest: str, base_seed: int) -> None:
    write_atomic(path, build_yaml_report(table, digest, base_seed))
    logger.info("Wrote summary report to %s", path)
