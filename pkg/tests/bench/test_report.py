import io

import pandas as pd
import pytest
import yaml

from hetfuse import __version__
from hetfuse.bench import ResultRow, SweepTable
from hetfuse.bench.experiment import summarize_rows
from hetfuse.bench.report import (
    build_yaml_report,
    config_digest,
    render_results,
    render_sweep,
    write_atomic,
    write_split,
)
from hetfuse.exceptions import ReportError
from hetfuse.synth import SimulationConfig, gen_simulation


def _row(method: str, run_index: int, value: float) -> ResultRow:
    return ResultRow(
        dataset="simulation",
        method=method,
        base_model="ridge",
        p_r=0.2,
        beta=1.0,
        os_control_count=None,
        run_index=run_index,
        seed=1000 + run_index,
        sqrt_pehe=value,
    )


def _table() -> SweepTable:
    rows = [
        _row("sf_rct", 0, 9.0),
        _row("sf_rct", 1, 10.0),
        _row("cio", 0, 5.5),
        _row("cio", 1, 6.0),
    ]
    rows.sort(key=lambda r: (r.method != "sf_rct", r.run_index))
    return SweepTable(rows=rows, summaries=summarize_rows(rows))


def test_results_layout():
    text = render_results(_table(), config_digest(b"{}"), base_seed=7)
    lines = text.splitlines()
    assert lines[0] == f"# hetfuse {__version__}"
    assert lines[1] == f"# config_sha256: {config_digest(b'{}')}"
    assert lines[2] == "# base_seed: 7"
    assert lines[3] == (
        "dataset,method,base_model,p_r,beta,os_control_count,run_index,seed,sqrt_pehe"
    )
    assert lines[4] == "simulation,sf_rct,ridge,0.200000,1.000000,,0,1000,9.000000"
    assert lines[8] == "# summary"
    assert lines[9] == "dataset,method,base_model,p_r,beta,os_control_count,n_runs,mean,std"
    assert lines[10] == "simulation,sf_rct,ridge,0.200000,1.000000,,2,9.500000,0.500000"
    assert lines[11] == "simulation,cio,ridge,0.200000,1.000000,,2,5.750000,0.250000"
    assert text.endswith("\n")


def test_sweep_layout_is_long_format():
    text = render_sweep(_table(), "p_r", config_digest(b"{}"), base_seed=0)
    lines = text.splitlines()
    assert lines[3] == "# axis: p_r"
    frame = pd.read_csv(io.StringIO(text), comment="#")
    assert len(frame) == 2
    assert frame["os_control_count"].isna().all()


def test_yaml_report_compares_against_cio():
    report = yaml.safe_load(build_yaml_report(_table(), "abc", base_seed=0))
    body = report["hetfuse_report"]
    assert body["config_sha256"] == "abc"
    assert [s["method"] for s in body["summaries"]] == ["sf_rct", "cio"]
    significance = body["significance"]
    assert significance["test"] == "welch_t"
    assert significance["reference"] == "cio"
    (comparison,) = significance["comparisons"]
    assert comparison["method"] == "sf_rct"
    assert 0.0 <= comparison["p_value"] <= 1.0


def test_write_atomic_replaces_content(tmp_path):
    path = tmp_path / "nested" / "out.csv"
    write_atomic(path, "a\n")
    write_atomic(path, "b\n")
    assert path.read_text() == "b\n"
    assert [p.name for p in path.parent.iterdir()] == ["out.csv"]


def test_write_atomic_reports_unwritable_path(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    with pytest.raises(ReportError, match="Failed to write"):
        write_atomic(blocker / "out.csv", "x")


def test_split_files(tmp_path):
    split = gen_simulation(SimulationConfig(p=2, n_os=30, n_rct=20, n_test=10))
    paths = write_split(tmp_path, split)
    assert [p.name for p in paths] == ["os.csv", "rct.csv", "test.csv"]
    test = pd.read_csv(tmp_path / "test.csv")
    assert list(test.columns) == [
        "x_0",
        "x_1",
        "t",
        "s",
        "y",
        "y0_true",
        "y1_true",
        "tau_true",
    ]
    assert len(test) == 10
    assert test["tau_true"].notna().all()
    os = pd.read_csv(tmp_path / "os.csv")
    assert len(os) == 30
    assert os["tau_true"].isna().all()
