"""
Run configuration: one JSON document describing an experiment grid and its outputs.

Unknown keys are errors. Validation failures are reported as a single
:class:`ConfigError` naming every offending key path.
"""

from pathlib import Path

from pydantic import Field, ValidationError

from hetfuse.bench.experiment import Experiment
from hetfuse.exceptions import ConfigError


class RunConfig(Experiment):
    n_runs: int = Field(default=10, ge=1, description="Repeated runs per grid cell")
    parallel: bool = Field(default=True, description="Run repetitions concurrently")
    output: Path | None = Field(default=None, description="Results path (or --out)")


def describe_validation_error(error: ValidationError) -> str:
    parts = []
    for item in error.errors():
        loc = ".".join(str(part) for part in item["loc"]) or "<document>"
        parts.append(f"{loc}: {item['msg']}")
    return "; ".join(parts)


def parse_run_config(raw: bytes | str, seed: int | None = None) -> RunConfig:
    """Validate a JSON document; ``seed`` overrides ``base_seed`` when given."""
    try:
        config = RunConfig.model_validate_json(raw)
    except ValidationError as e:
        raise ConfigError(f"invalid config: {describe_validation_error(e)}") from None
    if seed is not None:
        config = config.model_copy(update={"base_seed": seed})
    return config


def load_run_config(path: str | Path, seed: int | None = None) -> tuple[RunConfig, bytes]:
    """Read and validate a config file; returns the config and its raw bytes."""
    try:
        raw = Path(path).read_bytes()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    return parse_run_config(raw, seed), raw
