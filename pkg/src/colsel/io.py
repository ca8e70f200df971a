"""CSV matrix ingestion, plot-data CSVs and versioned JSON reports."""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Iterable, Sequence, Union

import numpy as np

from colsel.errors import (
    EmptyMatrixError,
    NonNumericCellError,
    NotNormalizedError,
    RaggedRowsError,
)
from colsel.linalg import ColumnMatrix, normalize_columns

SCHEMA_VERSION = 1
NORMALIZED_TOL = 1e-6
ORIENTATIONS = ("columns-are-features", "rows-are-features")
POLICIES = ("normalize", "require-normalized")


@dataclass(frozen=True)
class DatasetHandle:
    path: Union[str, Path]
    orientation: str = "columns-are-features"
    policy: str = "normalize"

    def __post_init__(self):
        if self.orientation not in ORIENTATIONS:
            raise ValueError(f"orientation must be one of {ORIENTATIONS}")
        if self.policy not in POLICIES:
            raise ValueError(f"policy must be one of {POLICIES}")


def _parse_row(cells):
    return [float(c) for c in cells]


def read_csv_array(path) -> np.ndarray:
    """Rectangular numeric CSV to an array; a non-numeric first row is a header."""
    rows = []
    width = None
    first = True
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        for cells in reader:
            line = reader.line_num
            if not cells or all(not c.strip() for c in cells):
                continue
            if first:
                first = False
                try:
                    _parse_row(cells)
                except ValueError:
                    continue
            if width is None:
                width = len(cells)
            elif len(cells) != width:
                raise RaggedRowsError(
                    f"line {line}: {len(cells)} cells, expected {width}", line=line
                )
            values = []
            for col, c in enumerate(cells):
                try:
                    values.append(float(c))
                except ValueError:
                    raise NonNumericCellError(
                        f"line {line}, column {col}: {c!r} is not a number", line=line, col=col
                    ) from None
            rows.append(values)
    if not rows:
        raise EmptyMatrixError(f"{path}: no numeric rows")
    return np.array(rows, dtype=np.float64)


def load_csv(handle: DatasetHandle) -> ColumnMatrix:
    a = read_csv_array(handle.path)
    if handle.orientation == "rows-are-features":
        a = a.T
    if handle.policy == "normalize":
        return normalize_columns(a)
    X = ColumnMatrix(a)
    bad = np.flatnonzero(np.abs(X.column_norms() - 1.0) > NORMALIZED_TOL)
    if bad.size:
        j = int(bad[0])
        raise NotNormalizedError(f"column {j} is not unit norm", index=j)
    return X


def save_csv(matrix, path, header: Sequence[str] = None):
    """Write a matrix with full float precision (``repr`` round-trips exactly)."""
    a = matrix.data if isinstance(matrix, ColumnMatrix) else np.asarray(matrix, dtype=np.float64)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if header:
            w.writerow(header)
        for row in a:
            w.writerow([repr(float(v)) for v in row])


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_table(path_or_stream, columns: Sequence[str], rows: Iterable[Dict[str, Any]]):
    """Flat CSV with a header row; ``None`` cells are left empty."""
    own = isinstance(path_or_stream, (str, Path))
    fh = open(path_or_stream, "w", newline="", encoding="utf-8") if own else path_or_stream
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_cell(r[c]) for c in columns])
    finally:
        if own:
            fh.close()


SELECT_TRACE_COLUMNS = ("s", "j", "score", "alpha", "eta", "lambda_exact")
BOUND_TRACE_COLUMNS = ("s", "exact", "eta", "cor34", "gershgorin")


def _finite_only(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _finite_only(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite_only(v) for v in obj]
    if isinstance(obj, np.generic):
        return _finite_only(obj.item())
    return obj


@dataclass(frozen=True)
class ReportDocument:
    kind: str
    command: Dict[str, Any]
    result: Dict[str, Any]
    library_version: str = ""
    schema_version: int = SCHEMA_VERSION

    def to_dict(self):
        return {
            "schema_version": self.schema_version,
            "library_version": self.library_version,
            "kind": self.kind,
            "command": _finite_only(self.command),
            "result": _finite_only(self.result),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, allow_nan=False) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ReportDocument":
        d = json.loads(text)
        return cls(
            kind=d["kind"],
            command=d["command"],
            result=d["result"],
            library_version=d["library_version"],
            schema_version=d["schema_version"],
        )

    def write(self, path):
        Path(path).write_text(self.to_json(), encoding="utf-8")


def schema_path() -> Path:
    return Path(__file__).with_name("schemas") / "report.schema.json"


def load_schema() -> Dict[str, Any]:
    return json.loads(schema_path().read_text(encoding="utf-8"))
