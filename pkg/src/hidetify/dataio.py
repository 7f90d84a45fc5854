"""CSV and sidecar file formats.

Dataset CSV: header row, comma separator, decimal point, UTF-8; the
response column is named "y" by default. Ground-truth sidecar: plain
text, one 1-based row index per line. Detection report: CSV with one
record per input row plus a JSON metadata file alongside (same stem,
".meta.json" suffix). Floats are written with repr, which round-trips
exactly, so identical runs produce byte-identical files.
"""

import csv
import json
from pathlib import Path

import numpy as np

from .errors import InvalidSample
from .influence import DataMatrix

REPORT_COLUMNS = (
    "row",
    "t_min_stat",
    "t_min_p",
    "t_max_stat",
    "t_max_p",
    "step_flagged",
    "validation_stat",
    "validation_p",
    "influential",
)

BENCHMARK_COLUMNS = ("method", "model", "mu", "replication", "metric", "value")


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def load_dataset(path, response="y"):
    """Read a dataset CSV; returns (DataMatrix, feature_names, response_name).

    The response is selected by column name, or by 0-based column index
    when the selector is an integer (or all-digit string).
    """
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise InvalidSample(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        if isinstance(response, int) or (isinstance(response, str) and response.isdigit()):
            idx = int(response)
            if not (0 <= idx < len(header)):
                raise InvalidSample(f"{path}: response index {idx} outside 0..{len(header) - 1}")
        else:
            if response not in header:
                raise InvalidSample(f"{path}: no column named {response!r}")
            idx = header.index(response)
        rows = []
        for line_no, record in enumerate(reader, start=2):
            if not record:
                continue
            if len(record) != len(header):
                raise InvalidSample(
                    f"{path}: line {line_no}: expected {len(header)} cells, got {len(record)}"
                )
            parsed = []
            for col, cell in enumerate(record):
                try:
                    value = float(cell)
                except ValueError:
                    raise InvalidSample(
                        f"{path}: row {line_no - 1}, column {header[col]!r}: "
                        f"not numeric: {cell!r}"
                    ) from None
                if not np.isfinite(value):
                    raise InvalidSample(
                        f"{path}: row {line_no - 1}, column {header[col]!r}: non-finite value"
                    )
                parsed.append(value)
            rows.append(parsed)
    if not rows:
        raise InvalidSample(f"{path}: no data rows")
    table = np.asarray(rows)
    y = table[:, idx]
    X = np.delete(table, idx, axis=1)
    names = [h for i, h in enumerate(header) if i != idx]
    return DataMatrix(X, y), names, header[idx]


def write_dataset(path, data: DataMatrix, feature_names=None, response_name="y"):
    names = feature_names or [f"x{j + 1}" for j in range(data.p)]
    if len(names) != data.p:
        raise InvalidSample(f"{len(names)} names for {data.p} columns")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(names) + [response_name])
        for i in range(data.n):
            writer.writerow([_fmt(v) for v in data.values[i]] + [_fmt(data.response[i])])


def write_truth(path, truth):
    """Ground-truth sidecar: one 1-based row index per line."""
    with open(path, "w", encoding="utf-8") as fh:
        for idx in sorted(int(i) for i in truth):
            fh.write(f"{idx + 1}\n")


def read_truth(path):
    with open(path, encoding="utf-8") as fh:
        return tuple(int(line.strip()) - 1 for line in fh if line.strip())


def report_rows(result, n):
    """Flatten a DetectionResult trace into one record per input row.

    Rows carry the most recent statistic from each step that tested
    them; "row" is 1-based to match the ground-truth sidecar format.
    Single-detection traces report their full-sample statistic in the
    validation columns (it is the same leave-one-out form).
    """
    rows = {
        i: {name: None for name in REPORT_COLUMNS} | {"row": i + 1, "influential": 0}
        for i in range(n)
    }
    influential = set(result.influential)
    for entry in result.trace:
        for pos, k in enumerate(entry.tested):
            rec = rows[k]
            if entry.step == "min":
                rec["t_min_stat"] = entry.statistics[pos]
                rec["t_min_p"] = entry.p_values[pos]
            elif entry.step == "max":
                rec["t_max_stat"] = entry.statistics[pos]
                rec["t_max_p"] = entry.p_values[pos]
            else:  # validation or single
                rec["validation_stat"] = entry.statistics[pos]
                rec["validation_p"] = entry.p_values[pos]
        if entry.step in ("min", "max", "single"):
            for k in entry.flagged:
                if rows[k]["step_flagged"] is None:
                    label = entry.step
                    if entry.step in ("min", "max"):
                        label = f"{entry.step}:{entry.iteration}"
                    rows[k]["step_flagged"] = label
    for k in influential:
        rows[k]["influential"] = 1
    return [rows[i] for i in range(n)]


def meta_path(out_path) -> Path:
    out_path = Path(out_path)
    if out_path.suffix:
        return out_path.with_suffix(".meta.json")
    return out_path.parent / (out_path.name + ".meta.json")


def write_report(path, rows, metadata):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(REPORT_COLUMNS)
        for rec in rows:
            writer.writerow([_fmt(rec[name]) for name in REPORT_COLUMNS])
    with open(meta_path(path), "w", encoding="utf-8") as fh:
        json.dump(metadata, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_benchmark(path, records, metadata=None):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(BENCHMARK_COLUMNS)
        for rec in records:
            writer.writerow(
                [
                    rec.method,
                    rec.model,
                    _fmt(rec.mu),
                    _fmt(rec.replication),
                    rec.metric,
                    _fmt(rec.value),
                ]
            )
    if metadata is not None:
        with open(meta_path(path), "w", encoding="utf-8") as fh:
            json.dump(metadata, fh, indent=2, sort_keys=True)
            fh.write("\n")
