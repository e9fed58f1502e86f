"""Report and field serialization.

All files are UTF-8 with LF line endings and fixed 6-decimal number
formatting, so repeated runs of the same scenario produce byte-identical
output.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np


class ExportError(OSError):
    pass


def write_cell_csv(report, path: Path) -> Path:
    """Per-entity temperature series: time_s,entity,mean_c,max_c,min_c.

    One row per entity per sample, ordered by (time, entity).
    """
    path = Path(path)
    try:
        with path.open("w", encoding="utf-8", newline="\n") as fp:
            fp.write("time_s,entity,mean_c,max_c,min_c\n")
            order = sorted(range(len(report.entities)),
                           key=lambda j: report.entities[j])
            for i, t in enumerate(report.times):
                for j in order:
                    fp.write(f"{t:.6f},{report.entities[j]},"
                             f"{report.mean_c[i, j]:.6f},"
                             f"{report.max_c[i, j]:.6f},"
                             f"{report.min_c[i, j]:.6f}\n")
    except OSError as exc:
        raise ExportError(f"cannot write CSV {path}: {exc}") from exc
    return path


def read_cell_csv(path: Path) -> dict[str, dict[str, list[float]]]:
    """Inverse of write_cell_csv: entity -> {time_s, mean_c, max_c, min_c}."""
    out: dict[str, dict[str, list[float]]] = {}
    with Path(path).open(encoding="utf-8") as fp:
        for row in csv.DictReader(fp):
            series = out.setdefault(row["entity"], {
                "time_s": [], "mean_c": [], "max_c": [], "min_c": []})
            series["time_s"].append(float(row["time_s"]))
            series["mean_c"].append(float(row["mean_c"]))
            series["max_c"].append(float(row["max_c"]))
            series["min_c"].append(float(row["min_c"]))
    return out


def write_field_dump(grid, path: Path) -> Path:
    """Legacy structured-points text dump of the temperature field (deg C).

    Scalar values are written in x-fastest order, one per line, consumable
    by common scientific visualization tools.
    """
    path = Path(path)
    nx, ny, nz = grid.dims
    temps_c = np.asarray(grid.temperature) - 273.15
    try:
        with path.open("w", encoding="utf-8", newline="\n") as fp:
            fp.write("# vtk DataFile Version 3.0\n")
            fp.write("temperature field\n")
            fp.write("ASCII\n")
            fp.write("DATASET STRUCTURED_POINTS\n")
            fp.write(f"DIMENSIONS {nx} {ny} {nz}\n")
            fp.write(f"ORIGIN {grid.origin[0]:.9g} {grid.origin[1]:.9g} "
                     f"{grid.origin[2]:.9g}\n")
            fp.write(f"SPACING {grid.spacing:.9g} {grid.spacing:.9g} "
                     f"{grid.spacing:.9g}\n")
            fp.write(f"POINT_DATA {nx * ny * nz}\n")
            fp.write("SCALARS temperature_c float\n")
            fp.write("LOOKUP_TABLE default\n")
            # x varies fastest: iterate z, y outer and x inner
            for iz in range(nz):
                for iy in range(ny):
                    for ix in range(nx):
                        fp.write(f"{temps_c[ix, iy, iz]:.6f}\n")
    except OSError as exc:
        raise ExportError(f"cannot write field dump {path}: {exc}") from exc
    return path


def read_field_dump(path: Path):
    """Parse a structured-points dump back into (dims, origin, spacing, values).

    values come back as a (nx, ny, nz) array in the grid's indexing.
    """
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    dims = origin = spacing = None
    data_start = None
    for i, line in enumerate(lines):
        if line.startswith("DIMENSIONS"):
            dims = tuple(int(v) for v in line.split()[1:4])
        elif line.startswith("ORIGIN"):
            origin = tuple(float(v) for v in line.split()[1:4])
        elif line.startswith("SPACING"):
            spacing = float(line.split()[1])
        elif line.startswith("LOOKUP_TABLE"):
            data_start = i + 1
            break
    if dims is None or data_start is None:
        raise ExportError(f"{path} is not a structured-points dump")
    n = dims[0] * dims[1] * dims[2]
    values = np.array([float(v) for v in lines[data_start:data_start + n]])
    if len(values) != n:
        raise ExportError(f"{path}: expected {n} values, found {len(values)}")
    # x-fastest on disk -> index order (ix, iy, iz)
    field = values.reshape((dims[2], dims[1], dims[0])).transpose(2, 1, 0)
    return dims, origin, spacing, field
