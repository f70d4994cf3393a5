"""CSV and raw binary import/export of grid-sampled fields.

CSV layout: one coordinate column per axis followed by a value column.
The raw format is a flat little-endian float64 array in C order with a
JSON sidecar recording the grid (d, N, L) and the field name, enough to
rebuild the GridFunction exactly.
"""

from __future__ import annotations

import json

import numpy as np

from .errors import StructuralError
from .spectral import Grid, GridFunction

__all__ = ["save_csv", "load_csv", "save_raw", "load_raw",
           "save_table_csv"]


def save_csv(f: GridFunction, path: str) -> None:
    g = f.grid
    pts = g.points().reshape(-1, g.d)
    cols = np.column_stack([pts, f.values.reshape(-1)])
    header = ",".join([f"x{i + 1}" for i in range(g.d)] + ["value"])
    np.savetxt(path, cols, delimiter=",", header=header, comments="")


def save_table_csv(path: str, columns: dict) -> None:
    """Write named 1-d arrays of equal length as CSV columns."""
    names = list(columns)
    data = np.column_stack([np.asarray(columns[k], dtype=float)
                            for k in names])
    np.savetxt(path, data, delimiter=",", header=",".join(names),
               comments="")


def load_csv(path: str) -> GridFunction:
    """Rebuild a GridFunction from its CSV export."""
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    d = data.shape[1] - 1
    x0 = np.unique(data[:, 0])
    N = len(x0) if d == 1 else int(round(len(data) ** (1.0 / d)))
    if N ** d != len(data):
        raise StructuralError("CSV rows do not fill a cubic grid")
    h = x0[1] - x0[0]
    L = -x0[0]
    grid = Grid(d=d, N=N, L=float(L))
    if abs(grid.h - h) > 1e-12 * abs(h):
        raise StructuralError("CSV coordinates are not uniformly spaced")
    return GridFunction(grid, data[:, d].reshape((N,) * d))


def save_raw(f: GridFunction, path: str, name: str = "field") -> None:
    f.values.astype("<f8").tofile(path)
    sidecar = {"d": f.grid.d, "N": f.grid.N, "L": f.grid.L, "name": name}
    with open(path + ".json", "w") as fh:
        json.dump(sidecar, fh, sort_keys=True)


def load_raw(path: str) -> GridFunction:
    with open(path + ".json") as fh:
        meta = json.load(fh)
    grid = Grid(d=meta["d"], N=meta["N"], L=meta["L"])
    vals = np.fromfile(path, dtype="<f8")
    if vals.size != grid.N ** grid.d:
        raise StructuralError(
            f"raw file holds {vals.size} values, expected "
            f"{grid.N ** grid.d}")
    return GridFunction(grid, vals.reshape((grid.N,) * grid.d))
