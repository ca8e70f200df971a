import io
import json

import jsonschema
import numpy as np
import pytest

from colsel.errors import (
    EmptyMatrixError,
    NonNumericCellError,
    NotNormalizedError,
    RaggedRowsError,
    ZeroColumnError,
)
from colsel.io import (
    BOUND_TRACE_COLUMNS,
    DatasetHandle,
    ReportDocument,
    load_csv,
    load_schema,
    read_csv_array,
    save_csv,
    write_table,
)


def _write(tmp_path, text, name="m.csv"):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_identity_csv(tmp_path):
    X = load_csv(DatasetHandle(_write(tmp_path, "1,0,0\n0,1,0\n0,0,1\n")))
    assert X.shape == (3, 3)
    np.testing.assert_array_equal(X.data, np.eye(3))


def test_header_and_blank_lines_skipped(tmp_path):
    a = read_csv_array(_write(tmp_path, "x,y\n\n3,0\n4,2\n\n"))
    np.testing.assert_array_equal(a, [[3, 0], [4, 2]])


def test_normalize_policy(tmp_path):
    X = load_csv(DatasetHandle(_write(tmp_path, "3,0\n4,2\n")))
    np.testing.assert_allclose(X.data, [[0.6, 0.0], [0.8, 1.0]])


def test_orientations(tmp_path):
    rng = np.random.default_rng(1)
    wide = rng.standard_normal((39, 1479))
    save_csv(wide, tmp_path / "wide.csv")
    save_csv(wide.T, tmp_path / "tall.csv")
    a = load_csv(DatasetHandle(tmp_path / "wide.csv", "columns-are-features"))
    b = load_csv(DatasetHandle(tmp_path / "tall.csv", "rows-are-features"))
    assert a.shape == b.shape == (39, 1479)
    np.testing.assert_allclose(a.data, b.data, rtol=0, atol=1e-15)
    assert load_csv(DatasetHandle(tmp_path / "wide.csv", "rows-are-features")).shape == (1479, 39)


def test_save_round_trip(tmp_path):
    rng = np.random.default_rng(2)
    a = rng.standard_normal((7, 5)) * 10.0 ** rng.integers(-8, 8, size=(7, 5))
    save_csv(a, tmp_path / "r.csv", header=[f"c{i}" for i in range(5)])
    back = read_csv_array(tmp_path / "r.csv")
    np.testing.assert_array_equal(back, a)
    np.testing.assert_allclose(back, a, rtol=1e-15)


def test_ragged_rows(tmp_path):
    with pytest.raises(RaggedRowsError) as exc:
        read_csv_array(_write(tmp_path, "1,2\n3,4\n5\n"))
    assert exc.value.details["line"] == 3


def test_non_numeric_cell(tmp_path):
    with pytest.raises(NonNumericCellError) as exc:
        read_csv_array(_write(tmp_path, "1,2\n3,abc\n"))
    assert exc.value.details == {"line": 2, "col": 1}


def test_zero_column(tmp_path):
    with pytest.raises(ZeroColumnError):
        load_csv(DatasetHandle(_write(tmp_path, "1,0\n2,0\n")))


def test_not_normalized(tmp_path):
    path = _write(tmp_path, "1,0.6\n0,0.7\n")
    with pytest.raises(NotNormalizedError) as exc:
        load_csv(DatasetHandle(path, policy="require-normalized"))
    assert exc.value.details["index"] == 1
    ok = load_csv(DatasetHandle(_write(tmp_path, "1,0.6\n0,0.8\n", "ok.csv"), policy="require-normalized"))
    assert ok.shape == (2, 2)


def test_empty_file(tmp_path):
    with pytest.raises(EmptyMatrixError):
        read_csv_array(_write(tmp_path, "a,b\n\n"))


def test_bad_handle():
    with pytest.raises(ValueError):
        DatasetHandle("x.csv", orientation="diagonal")


def test_write_table_blank_for_none():
    buf = io.StringIO()
    write_table(buf, BOUND_TRACE_COLUMNS, [{"s": 1, "exact": 1.0, "eta": 0.5, "cor34": None, "gershgorin": 0.25}])
    assert buf.getvalue() == "s,exact,eta,cor34,gershgorin\n1,1.0,0.5,,0.25\n"


def test_report_round_trip(tmp_path):
    doc = ReportDocument(
        kind="bound",
        command={"command": "bound", "lam": 0.5},
        result={"x": float("inf"), "y": {"a": np.float64(0.25), "b": float("nan")}},
        library_version="0.1.0",
    )
    path = tmp_path / "r.json"
    doc.write(path)
    text = path.read_text()
    assert text.endswith("\n")
    back = ReportDocument.from_json(text)
    assert back.result == {"x": None, "y": {"a": 0.25, "b": None}}
    assert back.to_json() == text
    jsonschema.validate(json.loads(text), load_schema())


def test_schema_rejects_bad_documents():
    schema = load_schema()
    jsonschema.Draft202012Validator.check_schema(schema)
    good = ReportDocument("bound", {"command": "bound"}, {"gershgorin": 0.5}, "0.1.0").to_dict()
    jsonschema.validate(good, schema)
    for bad in (
        {**good, "schema_version": 2},
        {**good, "kind": "other"},
        {**good, "extra": 1},
        {k: v for k, v in good.items() if k != "result"},
        {**good, "result": {}},
    ):
        with pytest.raises(jsonschema.ValidationError):
            jsonschema.validate(bad, schema)
