"""CSV input, JSON path records and long-format plot data."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .model import DataMatrix
from .path import ClusterPath, PathEntry

__all__ = [
    "InputError",
    "ingest_csv",
    "path_to_records",
    "records_to_path",
    "write_path_json",
    "read_path_json",
    "emit_plot_data",
]


class InputError(ValueError):
    """Malformed input file; the message names the offending location."""


def _is_number(cell):
    try:
        float(cell)
    except ValueError:
        return False
    return True


def ingest_csv(path, has_header: bool | None = None, standardize: bool = False) -> DataMatrix:
    """Read a numeric CSV with one observation per row.

    Parameters
    ----------
    path : str or Path
    has_header : bool or None
        Skip the first row. ``None`` skips it only if some cell in it is not
        a number.
    standardize : bool
        Center every column and scale it to unit standard deviation;
        constant columns are only centered.
    """
    path = Path(path)
    with path.open(newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows:
        raise InputError(f"{path}: file is empty")
    if has_header is None:
        has_header = not all(_is_number(c) for c in rows[0])
    first = 1 if has_header else 0
    body = rows[first:]
    if not body:
        raise InputError(f"{path}: no data rows")
    width = len(body[0])
    values = np.empty((len(body), width))
    for r, row in enumerate(body):
        line = r + first + 1
        if len(row) != width:
            raise InputError(f"{path}: row {line} has {len(row)} columns, expected {width}")
        for c, cell in enumerate(row):
            try:
                values[r, c] = float(cell)
            except ValueError:
                raise InputError(f"{path}: non-numeric value {cell!r} at row {line}, column {c + 1}") from None
    if not np.all(np.isfinite(values)):
        raise InputError(f"{path}: non-finite values")
    if standardize:
        values = values - values.mean(axis=0)
        sd = values.std(axis=0)
        values = values / np.where(sd > 0, sd, 1.0)
    return DataMatrix(values)


def _opt(x):
    return None if x is None else float(x)


def path_to_records(path: ClusterPath) -> list[dict]:
    records = []
    for e in path:
        records.append({
            "gamma": float(e.gamma),
            "num_clusters": int(e.num_clusters),
            "assignments": [int(a) for a in e.assignments],
            "centroids": np.asarray(e.centroids, dtype=float).tolist(),
            "objective": float(e.objective),
            "gap": _opt(e.gap),
            "primal_residual": _opt(e.primal_residual),
            "dual_residual": _opt(e.dual_residual),
            "iterations": int(e.iterations),
            "converged": bool(e.converged),
        })
    return records


def records_to_path(records, solver="ama") -> ClusterPath:
    entries = [
        PathEntry(
            gamma=r["gamma"],
            centroids=np.asarray(r["centroids"], dtype=float),
            assignments=np.asarray(r["assignments"], dtype=np.int64),
            num_clusters=r["num_clusters"],
            iterations=r["iterations"],
            converged=r["converged"],
            objective=r["objective"],
            gap=r.get("gap"),
            primal_residual=r.get("primal_residual"),
            dual_residual=r.get("dual_residual"),
        )
        for r in records
    ]
    return ClusterPath(entries, solver=solver)


def write_path_json(path: ClusterPath, out) -> None:
    # Python's float repr is the shortest string that round-trips exactly
    text = json.dumps(path_to_records(path), indent=1)
    if out == "-":
        print(text)
    else:
        Path(out).write_text(text + "\n")


def read_path_json(src) -> ClusterPath:
    return records_to_path(json.loads(Path(src).read_text()))


def emit_plot_data(path: ClusterPath, out) -> None:
    """Write centroid trajectories as ``gamma,node,feature,value`` rows.

    Rows are sorted by ``(gamma, node, feature)`` and values use the exact
    float repr, so reruns produce identical bytes.
    """
    if len(path) == 0:
        raise ValueError("empty path")
    entries = sorted(path, key=lambda e: e.gamma)
    with open(out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["gamma", "node", "feature", "value"])
        for e in entries:
            U = np.asarray(e.centroids, dtype=float)
            g = repr(float(e.gamma))
            for i in range(U.shape[0]):
                for k in range(U.shape[1]):
                    w.writerow([g, i, k, repr(float(U[i, k]))])
