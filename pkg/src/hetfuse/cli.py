"""
Command-line driver: ``hetfuse gen | run | sweep``.

Results go to files; diagnostics (skipped methods, dropped rows, retries) go to
stderr. Exit codes: 0 success, 1 configuration error, 2 data or runtime error.
"""

from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path

import typer

from hetfuse.bench.experiment import SweepTable, repeat, run_seed, sweep
from hetfuse.bench.report import (
    config_digest,
    write_results,
    write_split,
    write_sweep,
    write_yaml_report,
)
from hetfuse.config import settings
from hetfuse.exceptions import ConfigError, HetfuseError
from hetfuse.logging import get_logger, setup_logging
from hetfuse.logging_utils import (
    log_notice,
    log_step_complete,
    log_step_start,
    log_summary_table,
)
from hetfuse.run_config import RunConfig, load_run_config
from hetfuse.seeding import derive_seed
from hetfuse.synth.sources import build_split

EXIT_CONFIG = 1
EXIT_RUNTIME = 2

app = typer.Typer(
    name="hetfuse",
    help="Heterogeneous treatment effects from fused RCT and observational data",
    no_args_is_help=True,
)
logger = get_logger(__name__)

CONFIG_OPTION = typer.Option(..., "--config", help="Run configuration (JSON)")
SEED_OPTION = typer.Option(None, "--seed", help="Override base_seed")
VERBOSE_OPTION = typer.Option(False, "--verbose", "-v", help="Enable debug logging")


@contextmanager
def _exit_codes() -> Iterator[None]:
    try:
        yield
    except ConfigError as e:
        logger.error("Configuration error: %s", e)
        raise typer.Exit(code=EXIT_CONFIG) from e
    except HetfuseError as e:
        logger.error("%s", e)
        raise typer.Exit(code=EXIT_RUNTIME) from e
    except typer.Exit:
        raise
    except Exception as e:
        logger.exception("Unexpected failure: %s", e)
        raise typer.Exit(code=EXIT_RUNTIME) from e


def _setup(verbose: bool) -> None:
    setup_logging("DEBUG" if verbose else settings.loglevel)


def _output_path(config: RunConfig, out: Path | None) -> Path:
    path = out or config.output
    if path is None:
        raise ConfigError("output: no results path; pass --out or set 'output'")
    return path


def _report_skipped(config: RunConfig, table: SweepTable) -> None:
    produced = {(row.method, row.base_model) for row in table.rows}
    for spec in config.base_models:
        for method in config.methods:
            if (method, spec.tag) not in produced:
                log_notice(
                    f"{method} ({spec.tag}) is not possible on the "
                    f"{config.dataset_tag} splits; no rows emitted"
                )


def _print_summaries(table: SweepTable, title: str) -> None:
    log_summary_table(
        title,
        ["method", "model", "p_r", "beta", "os_ctrl", "runs", "sqrt(PEHE)"],
        [
            (
                s.method,
                s.base_model,
                f"{s.p_r:g}",
                f"{s.beta:g}",
                "-" if s.os_control_count is None else s.os_control_count,
                s.n_runs,
                f"{s.mean:.3f} ± {s.std:.3f}",
            )
            for s in table.summaries
        ],
    )


@app.command()
def gen(
    config_path: Path = CONFIG_OPTION,
    out: Path = typer.Option(..., "--out", help="Directory for os.csv, rct.csv, test.csv"),
    seed: int | None = SEED_OPTION,
    verbose: bool = VERBOSE_OPTION,
) -> None:
    """Write the OS / RCT / test split of run 0 as CSV files."""
    _setup(verbose)
    with _exit_codes():
        config, _ = load_run_config(config_path, seed)
        log_step_start("Generating split", config.dataset_tag)
        split_seed = derive_seed(run_seed(config.base_seed, 0), "split")
        split = build_split(config.dataset, config.beta, split_seed)
        write_split(out, split)
        total = sum(len(ds) for ds in split.as_dict().values())
        log_step_complete("Generating split", total)


@app.command()
def run(
    config_path: Path = CONFIG_OPTION,
    out: Path | None = typer.Option(None, "--out", help="Results CSV (overrides 'output')"),
    report: Path | None = typer.Option(None, "--report", help="Also write a YAML summary"),
    seed: int | None = SEED_OPTION,
    verbose: bool = VERBOSE_OPTION,
) -> None:
    """Repeat the experiment grid and write per-run and summary rows."""
    _setup(verbose)
    with _exit_codes():
        config, raw = load_run_config(config_path, seed)
        path = _output_path(config, out)
        log_step_start("Running experiment", f"{config.dataset_tag}, {config.n_runs} runs")
        table = repeat(config, config.n_runs, parallel=config.parallel)
        _report_skipped(config, table)
        digest = config_digest(raw)
        write_results(path, table, digest, config.base_seed)
        if report is not None:
            write_yaml_report(report, table, digest, config.base_seed)
        log_step_complete("Running experiment", len(table.rows))
        _print_summaries(table, "sqrt(PEHE) over runs")


def _parse_values(values: str) -> list[float]:
    try:
        return [float(v) for v in values.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"--values is not a list of numbers: {values!r}") from None


@app.command("sweep")
def sweep_command(
    config_path: Path = CONFIG_OPTION,
    axis: str = typer.Option(..., "--axis", help="p_r, beta or os_control_count"),
    values: str = typer.Option(..., "--values", help="Comma-separated axis values"),
    out: Path | None = typer.Option(None, "--out", help="Sweep CSV (overrides 'output')"),
    seed: int | None = SEED_OPTION,
    verbose: bool = VERBOSE_OPTION,
) -> None:
    """Repeat the experiment at every value of one axis (long-format CSV)."""
    _setup(verbose)
    with _exit_codes():
        config, raw = load_run_config(config_path, seed)
        path = _output_path(config, out)
        axis_values = _parse_values(values)
        log_step_start("Sweeping", f"{axis} over {len(axis_values)} values")
        table = sweep(config, axis, axis_values, config.n_runs, parallel=config.parallel)
        _report_skipped(config, table)
        write_sweep(path, table, axis, config_digest(raw), config.base_seed)
        log_step_complete("Sweeping", len(table.summaries))
        _print_summaries(table, f"sqrt(PEHE) across {axis}")


def main() -> None:
    app()


if __name__ == "__main__":
    main()
