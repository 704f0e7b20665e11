"""File formats: measures, plans, slice sets, embeddings.

CSV floats are written with 17 significant digits and JSON floats in
Python's shortest round-trip form, so write-then-read reproduces every
value exactly.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .applications import EmbeddingMatrix
from .errors import TransportError
from .measures import DiscreteMeasure, TransportPlan, make_measure


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _measure_from_raw(atoms, weights) -> DiscreteMeasure:
    """Bitwise-preserving measure construction for file readers.

    Stored values that already form a valid measure are kept untouched so
    write-then-read is exact; anything else (zero rows, drifted sums) goes
    through the normalizing constructor.
    """
    try:
        arr = np.asarray(atoms, dtype=float)
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        return DiscreteMeasure(arr, np.asarray(weights, dtype=float))
    except (TypeError, ValueError):
        return make_measure(atoms, weights)


def write_measure_csv(measure: DiscreteMeasure, path) -> None:
    path = Path(path)
    header = ["w"] + [f"x{k}" for k in range(1, measure.dim + 1)]
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for w, atom in zip(measure.weights, measure.atoms):
            writer.writerow([_fmt(w)] + [_fmt(c) for c in atom])


def read_measure_csv(path) -> DiscreteMeasure:
    path = Path(path)
    with path.open(newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise TransportError(f"{path}: empty measure file")
    header = [c.strip() for c in rows[0]]
    expected = ["w"] + [f"x{k}" for k in range(1, len(header))]
    if header != expected:
        raise TransportError(f"{path}: bad header {header!r}, expected w,x1,...,xd")
    weights = []
    atoms = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise TransportError(f"{path}:{lineno}: expected {len(header)} fields")
        try:
            weights.append(float(row[0]))
            atoms.append([float(c) for c in row[1:]])
        except ValueError as exc:
            raise TransportError(f"{path}:{lineno}: {exc}") from None
    return _measure_from_raw(atoms, weights)


def write_measure_json(measure: DiscreteMeasure, path) -> None:
    payload = {
        "weights": [float(w) for w in measure.weights],
        "atoms": [[float(c) for c in atom] for atom in measure.atoms],
    }
    Path(path).write_text(json.dumps(payload))


def read_measure_json(path) -> DiscreteMeasure:
    path = Path(path)
    try:
        payload = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise TransportError(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(payload, dict) or "weights" not in payload or "atoms" not in payload:
        raise TransportError(f"{path}: expected an object with 'weights' and 'atoms'")
    return _measure_from_raw(payload["atoms"], payload["weights"])


def read_measure(path) -> DiscreteMeasure:
    """Dispatch on extension: .json reads JSON, anything else CSV."""
    path = Path(path)
    if path.suffix.lower() == ".json":
        return read_measure_json(path)
    return read_measure_csv(path)


def write_measure(measure: DiscreteMeasure, path, fmt: str | None = None) -> None:
    path = Path(path)
    if fmt is None:
        fmt = "json" if path.suffix.lower() == ".json" else "csv"
    if fmt == "json":
        write_measure_json(measure, path)
    elif fmt == "csv":
        write_measure_csv(measure, path)
    else:
        raise TransportError(f"unknown measure format {fmt!r}")


def write_plan_csv(plan: TransportPlan, path) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["i", "j", "mass"])
        for i, j, mass in zip(plan.i, plan.j, plan.mass):
            writer.writerow([int(i), int(j), _fmt(mass)])


def read_plan_csv(path, source_size: int | None = None, target_size: int | None = None) -> TransportPlan:
    """Read a plan; sizes default to one past the largest index seen."""
    path = Path(path)
    with path.open(newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or [c.strip() for c in rows[0]] != ["i", "j", "mass"]:
        raise TransportError(f"{path}: expected header i,j,mass")
    ii, jj, mm = [], [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != 3:
            raise TransportError(f"{path}:{lineno}: expected 3 fields")
        try:
            ii.append(int(row[0]))
            jj.append(int(row[1]))
            mm.append(float(row[2]))
        except ValueError as exc:
            raise TransportError(f"{path}:{lineno}: {exc}") from None
    if not ii:
        raise TransportError(f"{path}: plan has no entries")
    n = source_size if source_size is not None else max(ii) + 1
    m = target_size if target_size is not None else max(jj) + 1
    return TransportPlan(n, m, np.asarray(ii), np.asarray(jj), np.asarray(mm))


def write_directions_csv(directions: np.ndarray, path) -> None:
    """Reproducibility dump: one direction per row, d coordinates."""
    directions = np.asarray(directions, dtype=float)
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        for row in directions:
            writer.writerow([_fmt(c) for c in row])


def write_embedding_csv(embedding: EmbeddingMatrix, path, params: dict | None = None) -> None:
    """N x d matrix rows; method parameters go to a .meta.json sidecar."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        for row in embedding.rows:
            writer.writerow([_fmt(c) for c in row])
    if params is not None:
        sidecar = path.with_suffix(path.suffix + ".meta.json")
        sidecar.write_text(json.dumps(params, sort_keys=True, indent=2))


def read_embedding_csv(path, reference_size: int | None = None) -> EmbeddingMatrix:
    path = Path(path)
    with path.open(newline="") as fh:
        rows = [[float(c) for c in row] for row in csv.reader(fh) if row]
    if not rows:
        raise TransportError(f"{path}: empty embedding file")
    mat = np.asarray(rows, dtype=float)
    if reference_size is not None and mat.shape[0] != reference_size:
        raise TransportError(f"{path}: expected {reference_size} rows, found {mat.shape[0]}")
    return EmbeddingMatrix(mat, mat.shape[0], mat.shape[1])
