import numpy as np
import pytest

from hetfuse.exceptions import DataError
from hetfuse.synth import ingest_covariates_csv
from hetfuse.synth.surrogate import NSW_COLUMNS

SCHEMA = {"age": "covariate", "educ": "covariate", "treat": "treatment", "id": "ignore"}


def _write(tmp_path, text: str):
    path = tmp_path / "covariates.csv"
    path.write_text(text, encoding="utf-8")
    return path


def test_rows_with_missing_fields_are_dropped(tmp_path):
    path = _write(tmp_path, "id,age,educ,treat\na,25,12,1\nb,,10,0\nc,40,16,0\n")
    table = ingest_covariates_csv(path, SCHEMA)
    assert len(table) == 2
    assert table.dropped_count == 1
    assert table.covariate_names == ("age", "educ")
    np.testing.assert_array_equal(table.X, [[25.0, 12.0], [40.0, 16.0]])
    assert table.t.tolist() == [1, 0]
    assert table.u is None


def test_ignored_columns_may_be_missing(tmp_path):
    path = _write(tmp_path, "id,age,educ,treat\n,25,12,1\n")
    assert ingest_covariates_csv(path, SCHEMA).dropped_count == 0


def test_header_only_file(tmp_path):
    path = _write(tmp_path, "id,age,educ,treat\n")
    with pytest.raises(DataError, match="zero surviving rows"):
        ingest_covariates_csv(path, SCHEMA)


def test_empty_file(tmp_path):
    path = _write(tmp_path, "")
    with pytest.raises(DataError, match="no header row"):
        ingest_covariates_csv(path, SCHEMA)


def test_unknown_column(tmp_path):
    path = _write(tmp_path, "age,treat\n1,0\n")
    with pytest.raises(DataError, match="unknown column 'educ'"):
        ingest_covariates_csv(path, {"age": "covariate", "educ": "covariate"})


def test_unknown_role(tmp_path):
    path = _write(tmp_path, "age,treat\n1,0\n")
    with pytest.raises(DataError, match="unknown role 'label'"):
        ingest_covariates_csv(path, {"age": "covariate", "treat": "label"})


def test_duplicated_flag_role(tmp_path):
    path = _write(tmp_path, "age,a,b\n1,0,1\n")
    schema = {"age": "covariate", "a": "treatment", "b": "treatment"}
    with pytest.raises(DataError, match="role 'treatment'"):
        ingest_covariates_csv(path, schema)


def test_non_binary_flag_names_column_and_row(tmp_path):
    path = _write(tmp_path, "age,treat\n1,0\n2,3\n")
    with pytest.raises(DataError, match="column 'treat' at data row 1: non-binary value 3"):
        ingest_covariates_csv(path, {"age": "covariate", "treat": "treatment"})


def test_non_numeric_covariate(tmp_path):
    path = _write(tmp_path, "age,treat\nold,0\n")
    with pytest.raises(DataError, match="not a finite number"):
        ingest_covariates_csv(path, {"age": "covariate", "treat": "treatment"})


def test_nsw_layout_has_six_covariates(tmp_path):
    header = ",".join([*NSW_COLUMNS, "treat"])
    row = ",".join(["30", "10", "1", "0", "0", "1", "1"])
    path = _write(tmp_path, f"{header}\n{row}\n")
    schema = {name: "covariate" for name in NSW_COLUMNS} | {"treat": "treatment"}
    assert ingest_covariates_csv(path, schema).p == 6
