"""Evaluation and experiment harness: sqrt(PEHE), repeated runs, sweeps, reports."""

from hetfuse.bench.experiment import (
    Axis,
    Experiment,
    ResultRow,
    SummaryRow,
    SweepTable,
    repeat,
    run_experiment,
    sweep,
)
from hetfuse.bench.metrics import Summary, pehe, summarize, welch_t

__all__ = [
    "Axis",
    "Experiment",
    "ResultRow",
    "Summary",
    "SummaryRow",
    "SweepTable",
    "pehe",
    "repeat",
    "run_experiment",
    "summarize",
    "sweep",
    "welch_t",
]
