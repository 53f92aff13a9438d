"""
Rich console helpers for experiment progress and result summaries.
Everything here writes to the diagnostics (stderr) console.
"""

from collections.abc import Sequence

from rich.table import Table

from hetfuse.logging import diagnostics_console as console
from hetfuse.logging import get_logger

logger = get_logger(__name__)


def log_step_start(step_name: str, context: str = "") -> None:
    """Log the start of a processing step."""
    context_text = f" for {context}" if context else ""
    console.print(f"[bold cyan]▶ {step_name}[/bold cyan]{context_text}")


def log_step_complete(step_name: str, count: int | None = None) -> None:
    """Log completion of a processing step."""
    count_text = f" ({count} rows)" if count is not None else ""
    console.print(f"[green]✔ {step_name} complete[/green]{count_text}")


def log_notice(message: str) -> None:
    """One-line notice for skipped work (e.g. a method impossible on a split)."""
    console.print(f"[yellow]notice:[/yellow] {message}")


def log_summary_table(
    title: str, columns: Sequence[str], rows: Sequence[Sequence[object]]
) -> None:
    """Render a summary table, e.g. mean ± std of sqrt(PEHE) per method."""
    table = Table(title=title)
    for i, column in enumerate(columns):
        table.add_column(column, style="cyan" if i == 0 else None)
    for row in rows:
        table.add_row(*(str(value) for value in row))
    console.print(table)
