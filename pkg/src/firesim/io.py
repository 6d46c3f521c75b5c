"""Text output: snapshots (CSV and legacy VTK), time series and run manifests.

Every float is written with ``repr`` so files round-trip bit for bit.

Snapshot layouts
----------------
1D CSV::

    x,T,Y
    <x_0>,<T_0>,<Y_0>
    ...

2D CSV: a coordinate header followed by one matrix per field.  Matrix rows
run over y (j), columns over x (i), so ``row j, column i`` holds the value
of cell (i, j)::

    # t = <t>
    x,<x_0>,...,<x_nx-1>
    y,<y_0>,...,<y_ny-1>
    T
    <ny rows of nx values>
    Y
    <ny rows of nx values>

VTK: legacy ASCII ``STRUCTURED_POINTS`` with point data T and Y at cell
centres (x fastest), one value per line.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .grid import Grid, State
from .params import ConfigError, Parameters, RunConfig, config_from_mapping, dump_config, parse_key_values
from .scenarios import build_scenario

SNAPSHOT_FORMATS = ("csv", "vtk")
FORMAT_ALIASES = {"structured-grid-text": "vtk"}
SUFFIX = {"csv": ".csv", "vtk": ".vtk"}


def _fmt(value) -> str:
    return repr(float(value))


def _format(fmt: str) -> str:
    fmt = FORMAT_ALIASES.get(fmt, fmt)
    if fmt not in SNAPSHOT_FORMATS:
        raise ValueError(f"unknown snapshot format {fmt!r}; expected one of {SNAPSHOT_FORMATS}")
    return fmt


def export_snapshot(state: State, path, fmt: str = "csv", grid: Grid | None = None) -> Path:
    grid = grid or state.grid
    fmt = _format(fmt)
    path = Path(path)
    T = np.asarray(state.T, dtype=float)
    Y = np.asarray(state.Y, dtype=float)
    if T.shape != grid.shape or Y.shape != grid.shape:
        raise ValueError(f"state shape {T.shape} does not match grid {grid.shape}")
    if fmt == "vtk":
        path.write_text(_vtk_text(T, Y, state.t, grid))
        return path
    lines = []
    if grid.ndim == 1:
        lines.append("x,T,Y")
        lines += [f"{_fmt(x)},{_fmt(a)},{_fmt(b)}" for x, a, b in zip(grid.centers(0), T, Y)]
    else:
        lines.append(f"# t = {_fmt(state.t)}")
        lines.append("x," + ",".join(map(_fmt, grid.centers(0))))
        lines.append("y," + ",".join(map(_fmt, grid.centers(1))))
        for name, field in (("T", T), ("Y", Y)):
            lines.append(name)
            lines += [",".join(map(_fmt, row)) for row in field.T]
    path.write_text("\n".join(lines) + "\n")
    return path


def _vtk_text(T, Y, t, grid: Grid) -> str:
    nx, ny = (grid.cells + (1,))[:2]
    dx, dy = (grid.spacing + (1.0,))[:2]
    x0 = grid.centers(0)[0]
    y0 = grid.centers(1)[0] if grid.ndim == 2 else 0.0
    head = [
        "# vtk DataFile Version 3.0",
        f"firesim snapshot t={_fmt(t)}",
        "ASCII",
        "DATASET STRUCTURED_POINTS",
        f"DIMENSIONS {nx} {ny} 1",
        f"ORIGIN {_fmt(x0)} {_fmt(y0)} 0.0",
        f"SPACING {_fmt(dx)} {_fmt(dy)} 1.0",
        f"POINT_DATA {nx * ny}",
    ]
    body = []
    for name, field in (("T", T), ("Y", Y)):
        body += [f"SCALARS {name} double 1", "LOOKUP_TABLE default"]
        # VTK orders points with x varying fastest
        body += [_fmt(v) for v in np.asarray(field).reshape(nx, ny).T.ravel()]
    return "\n".join(head + body) + "\n"


def read_snapshot(path):
    """Read a snapshot written by :func:`export_snapshot`.

    Returns ``(coords, fields)`` where coords is a tuple of centre arrays and
    fields maps 'T' and 'Y' to arrays indexed like the solver state.
    """
    path = Path(path)
    lines = path.read_text().splitlines()
    if lines and lines[0].startswith("# vtk"):
        return _read_vtk(lines)
    if lines[0] == "x,T,Y":
        data = np.array([[float(v) for v in line.split(",")] for line in lines[1:] if line])
        data = data.reshape(-1, 3)
        return (data[:, 0],), {"T": data[:, 1], "Y": data[:, 2]}
    body = [line for line in lines if not line.startswith("#")]
    x = np.array([float(v) for v in body[0].split(",")[1:]])
    y = np.array([float(v) for v in body[1].split(",")[1:]])
    fields = {}
    pos = 2
    while pos < len(body):
        name = body[pos]
        rows = body[pos + 1 : pos + 1 + len(y)]
        fields[name] = np.array([[float(v) for v in row.split(",")] for row in rows]).T
        pos += 1 + len(y)
    return (x, y), fields


def _read_vtk(lines):
    header = {}
    for line in lines[:8]:
        parts = line.split()
        if parts and parts[0] in ("DIMENSIONS", "ORIGIN", "SPACING"):
            header[parts[0]] = parts[1:]
    nx, ny, _ = map(int, header["DIMENSIONS"])
    ox, oy, _ = map(float, header["ORIGIN"])
    sx, sy, _ = map(float, header["SPACING"])
    fields = {}
    pos = 8
    while pos < len(lines):
        if lines[pos].startswith("SCALARS"):
            name = lines[pos].split()[1]
            values = np.array([float(v) for v in lines[pos + 2 : pos + 2 + nx * ny]])
            field = values.reshape(ny, nx).T
            fields[name] = field[:, 0] if ny == 1 else field
            pos += 2 + nx * ny
        else:
            pos += 1
    x = ox + sx * np.arange(nx)
    coords = (x,) if ny == 1 else (x, oy + sy * np.arange(ny))
    return coords, fields


def write_series(path, columns: dict) -> Path:
    """Write equal-length columns as CSV with a header row."""
    path = Path(path)
    names = list(columns)
    data = [np.asarray(columns[n], dtype=float) for n in names]
    if len({len(d) for d in data}) > 1:
        raise ValueError("series columns differ in length")
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(names)
        for row in zip(*data):
            writer.writerow([_fmt(v) for v in row])
    return path


def read_series(path) -> dict[str, np.ndarray]:
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    names = rows[0]
    data = np.array([[float(v) for v in row] for row in rows[1:]]).reshape(-1, len(names))
    return {name: data[:, i] for i, name in enumerate(names)}


def write_snapshot_index(path, snapshots: dict) -> Path:
    """CSV of snapshot time and file name (relative to the index) per row."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t", "file"])
        for t, file in snapshots.items():
            writer.writerow([_fmt(t), Path(file).name])
    return path


def read_snapshot_index(path) -> dict[float, Path]:
    path = Path(path)
    with path.open(newline="") as fh:
        rows = list(csv.reader(fh))[1:]
    return {float(t): path.parent / name for t, name in rows}


# ---------------------------------------------------------------------------
# manifests: the config format plus provenance keys

PROVENANCE_KEYS = ("scenario", "code_version", "dt", "sample_dt", "ignition_timing", "steps", "status", "t_reached")


def write_manifest(path, params: Parameters, run: RunConfig, provenance: dict) -> Path:
    unknown = set(provenance) - set(PROVENANCE_KEYS)
    if unknown:
        raise ValueError(f"unknown provenance keys {sorted(unknown)}")
    path = Path(path)
    path.write_text(dump_config(params, run, provenance))
    return path


def read_manifest(path) -> tuple[Parameters, RunConfig, dict[str, str]]:
    """Parse a manifest (or a plain config) into parameters, run config and provenance.

    A ``scenario`` key selects the base configuration (and initial condition)
    that the remaining keys override.
    """
    path = Path(path)
    values = parse_key_values(path.read_text(), str(path))
    provenance = {k: values.pop(k) for k in list(values) if k in PROVENANCE_KEYS}
    base = None
    if "scenario" in provenance:
        try:
            scenario = build_scenario(provenance["scenario"])
        except KeyError as err:
            raise ConfigError("scenario", str(err)) from None
        base = (scenario.params, scenario.run)
    params, run = config_from_mapping(values, base)
    return params, run, provenance


__all__ = [
    "PROVENANCE_KEYS", "SNAPSHOT_FORMATS", "export_snapshot", "read_manifest", "read_series", "read_snapshot",
    "read_snapshot_index", "write_manifest", "write_series", "write_snapshot_index",
]
