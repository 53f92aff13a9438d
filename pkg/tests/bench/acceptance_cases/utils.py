"""Utilities for loading benchmark acceptance cases."""

import importlib
from pathlib import Path
from typing import NamedTuple

from hetfuse.bench import Experiment


class Cell(NamedTuple):
    """A method at one sweep point; ``axes`` is empty for a plain repeat."""

    method: str
    axes: tuple[tuple[str, float | int], ...] = ()


class AcceptanceCase:
    """An acceptance scenario loaded from a case file."""

    def __init__(self, case_name: str, case_module):
        self.case_name = case_name
        self.experiment: Experiment = case_module.EXPERIMENT
        self.n_runs: int = case_module.N_RUNS
        self.sweep: tuple[str, list[float]] | None = getattr(case_module, "SWEEP", None)
        # (better, worse): mean sqrt(PEHE) of the first is strictly lower
        self.expected_better: list[tuple[Cell, Cell]] = getattr(
            case_module, "EXPECTED_BETTER", []
        )
        # (numerator, denominator, minimum ratio of means)
        self.expected_ratio: list[tuple[Cell, Cell, float]] = getattr(
            case_module, "EXPECTED_RATIO", []
        )
        # (a, b, relative tolerance on the means)
        self.expected_close: list[tuple[Cell, Cell, float]] = getattr(
            case_module, "EXPECTED_CLOSE", []
        )
        self.expected_absent: list[str] = getattr(case_module, "EXPECTED_ABSENT", [])
        self.expected_present: list[str] = getattr(case_module, "EXPECTED_PRESENT", [])


def load_test_case(case_name: str) -> AcceptanceCase:
    """Load a specific case by name."""
    try:
        module_name = f"tests.bench.acceptance_cases.{case_name}"
        case_module = importlib.import_module(module_name)
        return AcceptanceCase(case_name, case_module)
    except ImportError as e:
        raise ValueError(f"Acceptance case '{case_name}' not found: {e}") from e


def load_all_test_cases() -> list[AcceptanceCase]:
    """Load every ``*_case.py`` module in this directory, sorted by name."""
    cases_dir = Path(__file__).parent
    return [load_test_case(path.stem) for path in sorted(cases_dir.glob("*_case.py"))]
