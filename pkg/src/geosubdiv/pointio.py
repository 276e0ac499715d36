"""Reading and writing point-sequence files (CSV and JSON)."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np

from .errors import ContractViolation
from .schemes import Boundary, PointSequence

ACCEPT_TOL = 1e-9
RENORMALIZE_TOL = 1e-6


def normalize_rows(points: np.ndarray) -> tuple[np.ndarray, bool]:
    """Apply the unit-norm policy. Returns the points and whether any was renormalized."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] < 3:
        raise ContractViolation(f"expected rows of n+1 >= 3 coordinates, got shape {pts.shape}")
    if not np.all(np.isfinite(pts)):
        raise ContractViolation("non-finite coordinate in point file")
    dev = np.abs(np.linalg.norm(pts, axis=1) - 1.0)
    if np.any(dev > RENORMALIZE_TOL):
        row = int(np.argmax(dev))
        raise ContractViolation(f"row {row} has norm deviating from 1 by {dev[row]:.3g} (limit {RENORMALIZE_TOL:g})")
    if np.any(dev > ACCEPT_TOL):
        return pts / np.linalg.norm(pts, axis=1, keepdims=True), True
    return pts, False


def parse_csv(text: str) -> np.ndarray:
    rows = []
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not row or row[0].lstrip().startswith("#") or not "".join(row).strip():
            continue
        try:
            rows.append([float(v) for v in row])
        except ValueError as exc:
            raise ContractViolation(f"line {lineno}: {exc}") from exc
    if not rows:
        raise ContractViolation("no points in CSV input")
    if len({len(r) for r in rows}) != 1:
        raise ContractViolation("CSV rows have differing numbers of columns")
    return np.array(rows)


def parse_json(text: str) -> tuple[np.ndarray, bool]:
    obj = json.loads(text)
    pts = np.asarray(obj["points"], dtype=float)
    dim = obj.get("dimension")
    if dim is not None and (pts.ndim != 2 or pts.shape[1] != dim):
        raise ContractViolation(f"declared dimension {dim} does not match points of shape {pts.shape}")
    return pts, bool(obj.get("periodic", True))


def load_points(path, periodic: bool | None = None) -> tuple[PointSequence, bool]:
    """Load a point file; the format follows the extension (``.json`` or CSV).

    Returns the sequence and a flag telling whether rows were renormalized.
    CSV files carry no boundary information, so ``periodic`` (default True)
    decides it; for JSON an explicit ``periodic`` overrides the file.
    """
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".json":
        pts, file_periodic = parse_json(text)
        closed = file_periodic if periodic is None else periodic
    else:
        pts = parse_csv(text)
        closed = True if periodic is None else periodic
    pts, renormalized = normalize_rows(pts)
    boundary = Boundary.PERIODIC if closed else Boundary.TRUNCATE
    return PointSequence(pts, 0, boundary), renormalized


def dump_json(seq: PointSequence) -> str:
    return json.dumps(
        {
            "dimension": int(seq.points.shape[1]),
            "periodic": seq.periodic,
            "start": int(seq.start),
            "points": seq.points.tolist(),
        },
        indent=1,
    )


def dump_csv(seq: PointSequence) -> str:
    buf = io.StringIO()
    buf.write(f"# {len(seq)} points, start index {seq.start}, {seq.boundary.value}\n")
    writer = csv.writer(buf, lineterminator="\n")
    for row in seq.points:
        writer.writerow([repr(float(v)) for v in row])
    return buf.getvalue()


def save_points(seq: PointSequence, path) -> None:
    path = Path(path)
    path.write_text(dump_json(seq) if path.suffix.lower() == ".json" else dump_csv(seq))
