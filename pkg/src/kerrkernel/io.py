"""CSV/JSON helpers shared by the CLI. Floats are written in shortest round-trip form."""
from __future__ import annotations

import csv
import json

import numpy as np

from .errors import DomainError


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def write_rows(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def write_points(path, points, labels=None) -> None:
    pts = np.asarray(points, dtype=float)
    if labels is None:
        write_rows(path, ["x1", "x2"], pts.tolist())
    else:
        rows = [(a, b, int(c)) for (a, b), c in zip(pts.tolist(), np.asarray(labels).tolist())]
        write_rows(path, ["x1", "x2", "label"], rows)


def read_points(path) -> tuple[np.ndarray, np.ndarray | None]:
    """Points (n, 2) and labels if the file has a ``label`` column."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or header[:2] != ["x1", "x2"]:
            raise DomainError(f"{path}: expected a header starting with x1,x2")
        rows = [r for r in reader if r]
    if not rows:
        raise DomainError(f"{path}: no data rows")
    pts = np.array([[float(r[0]), float(r[1])] for r in rows])
    labels = None
    if "label" in header:
        k = header.index("label")
        labels = np.array([int(r[k]) for r in rows])
    return pts, labels


def write_json(path, obj) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_json(path):
    with open(path) as fh:
        return json.load(fh)
