"""Grid dumps and result tables.

Grid CSV: a ``# grid: <json>`` header (basis, component count), a column
header, then one row per site in row-major order with the site index and
the real and imaginary part of every component.  A 4-component spinor
therefore has 8 real columns.  The binary form is a magic line, the same
JSON header on one line, and little-endian float64 data.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np

from .modebasis import ModeBasis, build_basis

MAGIC = b"FIELDLAB-GRID 1\n"


def _header(basis: ModeBasis, components: int) -> dict:
    return {
        "dim": basis.dim,
        "extent": basis.extent,
        "points_per_axis": basis.points_per_axis,
        "components": components,
    }


def _as_components(basis: ModeBasis, values: np.ndarray) -> np.ndarray:
    values = np.asarray(values)
    if values.shape == basis.shape:
        values = values[None]
    if values.shape[1:] != basis.shape:
        raise ValueError(f"values of shape {values.shape} do not match lattice {basis.shape}")
    return values


def grid_to_csv(basis: ModeBasis, values) -> str:
    values = _as_components(basis, values)
    comps = values.shape[0]
    flat = values.reshape(comps, -1).astype(complex)
    buf = io.StringIO()
    buf.write("# grid: " + json.dumps(_header(basis, comps), sort_keys=True) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    names = ["site"]
    for c in range(comps):
        names += [f"re{c}", f"im{c}"]
    writer.writerow(names)
    for site in range(flat.shape[1]):
        row = [site]
        for c in range(comps):
            row += [repr(float(flat[c, site].real)), repr(float(flat[c, site].imag))]
        writer.writerow(row)
    return buf.getvalue()


def grid_from_csv(text: str) -> tuple[ModeBasis, np.ndarray]:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("# grid: "):
        raise ValueError("missing '# grid:' header")
    head = json.loads(lines[0][len("# grid: "):])
    basis = build_basis(head["dim"], head["extent"], head["points_per_axis"])
    comps = head["components"]
    rows = np.array([[float(x) for x in r[1:]] for r in csv.reader(lines[2:])])
    if rows.shape != (basis.size, 2 * comps):
        raise ValueError(f"grid body has shape {rows.shape}, expected {(basis.size, 2 * comps)}")
    values = (rows[:, 0::2] + 1j * rows[:, 1::2]).T.reshape((comps,) + basis.shape)
    return basis, values


def save_grid_csv(path, basis: ModeBasis, values) -> None:
    Path(path).write_text(grid_to_csv(basis, values))


def load_grid_csv(path) -> tuple[ModeBasis, np.ndarray]:
    return grid_from_csv(Path(path).read_text())


def save_grid_binary(path, basis: ModeBasis, values) -> None:
    values = _as_components(basis, values)
    head = json.dumps(_header(basis, values.shape[0]), sort_keys=True).encode() + b"\n"
    data = np.stack([values.real, values.imag], axis=-1).astype("<f8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(head)
        fh.write(data.tobytes())


def load_grid_binary(path) -> tuple[ModeBasis, np.ndarray]:
    with open(path, "rb") as fh:
        if fh.readline() != MAGIC:
            raise ValueError(f"{path} is not a fieldlab grid dump")
        head = json.loads(fh.readline())
        raw = fh.read()
    basis = build_basis(head["dim"], head["extent"], head["points_per_axis"])
    shape = (head["components"],) + basis.shape + (2,)
    data = np.frombuffer(raw, dtype="<f8").reshape(shape)
    return basis, data[..., 0] + 1j * data[..., 1]


def format_value(value) -> str:
    """Stable text form for table cells."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def table_to_csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    return buf.getvalue()


def write_table(path, header, rows) -> None:
    Path(path).write_text(table_to_csv(header, rows))


def read_table(path) -> tuple[list, list]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        return header, [row for row in reader]
