"""Reading and writing labelled datasets.

Two formats are supported. ``csv``: one sample per row, features first and
the label last, with an optional header row. ``binary-f64le``: a flat
little-endian float64 stream of rows ``(x_1, ..., x_d, y)``; ``d`` must be
declared since the file carries no metadata.
"""
import csv
import math

import numpy as np

from ..errors import InvalidValue, IoError, ParseError
from ..kernels import DataSet

FORMATS = ("csv", "binary-f64le")


def _is_number(text):
    try:
        float(text)
    except ValueError:
        return False
    return True


def _read_csv(path, n_features, header):
    try:
        with open(path, newline="", encoding="ascii") as fh:
            rows = [(i, r) for i, r in enumerate(csv.reader(fh), start=1)]
    except UnicodeDecodeError as exc:
        raise ParseError(f"non-ASCII content: {exc}") from None
    rows = [(i, r) for i, r in rows if r and any(c.strip() for c in r)]
    if not rows:
        raise ParseError("empty file", 1)
    if header is None:
        header = not all(_is_number(c) for c in rows[0][1])
    if header:
        rows = rows[1:]
        if not rows:
            raise ParseError("header but no data rows", 2)
    width = n_features + 1 if n_features is not None else len(rows[0][1])
    if width < 2:
        raise ParseError("need at least one feature and a label", rows[0][0])
    out = np.empty((len(rows), width))
    for k, (line, r) in enumerate(rows):
        if len(r) != width:
            raise ParseError(f"expected {width} fields, found {len(r)}", line)
        for j, cell in enumerate(r):
            try:
                v = float(cell)
            except ValueError:
                raise ParseError(f"not a number: {cell.strip()!r}", line) from None
            if not math.isfinite(v):
                raise InvalidValue(f"line {line}: non-finite value {cell.strip()!r}")
            out[k, j] = v
    return out


def _read_binary(path, n_features):
    if n_features is None:
        raise ParseError("binary-f64le needs the feature count")
    raw = np.fromfile(path, dtype="<f8")
    width = n_features + 1
    if raw.size == 0:
        raise ParseError("empty file", 1)
    if raw.size % width:
        full = raw.size // width
        raise ParseError(f"truncated record after {full} complete rows", full + 1)
    out = raw.reshape(-1, width).astype(float)
    bad = ~np.isfinite(out)
    if bad.any():
        row = int(np.argmax(bad.any(axis=1))) + 1
        raise InvalidValue(f"record {row}: non-finite value")
    return out


def ingest_dataset(path, format="csv", n_features=None, header=None):
    """Parse a dataset file; the last column of every record is the label."""
    if format not in FORMATS:
        raise ParseError(f"unknown format {format!r}")
    try:
        if format == "csv":
            table = _read_csv(path, n_features, header)
        else:
            table = _read_binary(path, n_features)
    except OSError as exc:
        raise IoError(str(exc)) from None
    return DataSet(table[:, :-1], table[:, -1])


def emit_dataset(data, path, format="csv", header=True):
    """Write ``data`` so that :func:`ingest_dataset` reads it back exactly."""
    if format not in FORMATS:
        raise ParseError(f"unknown format {format!r}")
    table = np.column_stack([data.points, data.labels])
    try:
        if format == "binary-f64le":
            table.astype("<f8").tofile(path)
            return
        with open(path, "w", newline="", encoding="ascii") as fh:
            w = csv.writer(fh, lineterminator="\n")
            d = data.points.shape[1]
            if header:
                w.writerow([f"x{j + 1}" for j in range(d)] + ["y"])
            for row in table:
                w.writerow([repr(float(v)) for v in row])
    except OSError as exc:
        raise IoError(str(exc)) from None
