"""CSV and JSON plumbing for the command-line surface.

Data files carry a ``t,y`` header (``t,y,x`` for grouped regression data)
with integer states starting at 1.  Detection results serialise to JSON
with a fixed field order so equal runs produce byte-identical files.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .core import TimeSeries
from .detect import DetectionResult
from .errors import DataShapeError
from .scenarios import ScenarioKind, ScenarioSpec
from .simulate import GroundTruth

__all__ = [
    "read_series",
    "write_series",
    "write_result",
    "read_result",
    "write_truth",
    "read_truth",
]


class CsvFormatError(DataShapeError):
    """Malformed data file; carries the offending line number."""

    def __init__(self, path, line_no, message):
        self.line_no = line_no
        super().__init__(f"{path}:{line_no}: {message}")


def read_series(path, spec: ScenarioSpec | None = None) -> TimeSeries:
    """Parse a data CSV; the covariate column is required exactly for
    grouped regression data."""
    want_x = spec is not None and spec.kind is ScenarioKind.LINREG
    t_col, y_col, x_col = [], [], []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [c.strip() for c in header[:2]] != ["t", "y"]:
            raise CsvFormatError(path, 1, "expected header starting with t,y")
        has_x = len(header) >= 3 and header[2].strip() == "x"
        if want_x and not has_x:
            raise CsvFormatError(path, 1, "regression data needs an x column")
        for line_no, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                t_col.append(int(row[0]))
                y_col.append(float(row[1]))
                if has_x:
                    x_col.append(float(row[2]))
            except (ValueError, IndexError):
                raise CsvFormatError(path, line_no, f"bad row {row!r}") from None
    if not t_col:
        raise CsvFormatError(path, 2, "no data rows")
    try:
        if has_x:
            return TimeSeries.from_pairs(t_col, y_col, x_col)
        return TimeSeries.from_values(y_col, states=t_col)
    except DataShapeError:
        raise
    except Exception as exc:
        raise CsvFormatError(path, 2, str(exc)) from None


def write_series(path, data: TimeSeries) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        if data.covariates is not None:
            writer.writerow(["t", "y", "x"])
            states = np.repeat(data.states, data.counts)
            for t, y, x in zip(states, data.values, data.covariates):
                writer.writerow([int(t), _num(y), _num(x)])
        else:
            writer.writerow(["t", "y"])
            for t, y in zip(data.states, data.values):
                writer.writerow([int(t), _num(y)])


def _num(v):
    """Render integers without a trailing .0 so count data stays integral."""
    f = float(v)
    return int(f) if f.is_integer() else repr(f)


def result_to_dict(result: DetectionResult) -> dict:
    out = {
        "changepoints": [int(c) for c in result.changepoints],
        "khat": int(result.khat),
        "map_curve": [float(v) for v in result.map_curve],
        "zeta": [float(v) for v in result.zeta],
        "sigma_trimmed": float(result.sigma_trimmed),
        "segments": result.segments,
    }
    if result.diagnostics is not None:
        out["diagnostics"] = result.diagnostics
    return out


def write_result(path, result: DetectionResult) -> None:
    Path(path).write_text(json.dumps(result_to_dict(result), indent=2) + "\n")


def read_result(path) -> dict:
    return json.loads(Path(path).read_text())


def write_truth(path, truth: GroundTruth) -> None:
    doc = {
        "changepoints": [int(c) for c in truth.changepoints],
        "segment_values": [float(v) for v in truth.segment_values],
        "n": int(truth.n),
        "kind": truth.kind.value,
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def read_truth(path) -> GroundTruth:
    doc = json.loads(Path(path).read_text())
    return GroundTruth(changepoints=np.asarray(doc["changepoints"]),
                       segment_values=np.asarray(doc["segment_values"]),
                       n=int(doc["n"]), kind=ScenarioKind(doc["kind"]))
