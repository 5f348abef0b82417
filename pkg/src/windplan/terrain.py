"""2.5D elevation maps and terrain collision checks."""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from windplan.windfields import FormatError


class ElevationMap:
    """Elevation nodes on a square grid, bilinearly interpolated.

    ``values`` are row-major with the first row northernmost; ``origin`` is
    the south-west node, so node ``(col, row)`` sits at
    ``(x0 + col * cellsize, y0 + (nrows - 1 - row) * cellsize)``. Queries
    outside the map return ``-inf`` (always clear) unless ``strict_bounds``
    is set, in which case they return ``+inf`` (forbidden). Cells touching a
    ``nodata`` node are forbidden.
    """

    def __init__(self, ncols, nrows, origin, cellsize, values, nodata=None, strict_bounds=False):
        if ncols < 1 or nrows < 1:
            raise ValueError("elevation map needs at least one row and column")
        if not (math.isfinite(cellsize) and cellsize > 0.0):
            raise ValueError("cellsize must be positive")
        arr = np.asarray(values, dtype=float).ravel()
        if arr.size != ncols * nrows:
            raise FormatError(f"elevation 'values': expected {ncols * nrows} values (ncols*nrows), got {arr.size}")
        self.ncols, self.nrows = int(ncols), int(nrows)
        self.origin = (float(origin[0]), float(origin[1]))
        self.cellsize = float(cellsize)
        self.nodata = nodata
        self.strict_bounds = strict_bounds
        grid = arr.reshape(nrows, ncols)[::-1].copy()  # row 0 = south
        forbidden = np.zeros(grid.shape, dtype=bool)
        if nodata is not None:
            forbidden = np.isnan(grid) if math.isnan(nodata) else grid == nodata
        if np.any(~np.isfinite(grid) & ~forbidden):
            raise FormatError("elevation 'values' must be finite or nodata")
        self.values = arr
        self._grid = np.where(forbidden, np.inf, grid)

    @property
    def extent(self):
        x0, y0 = self.origin
        return x0, y0, x0 + (self.ncols - 1) * self.cellsize, y0 + (self.nrows - 1) * self.cellsize

    def elevation_many(self, x, y) -> np.ndarray:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        y = np.atleast_1d(np.asarray(y, dtype=float))
        x0, y0, x1, y1 = self.extent
        inside = (x >= x0) & (x <= x1) & (y >= y0) & (y <= y1)
        u = (np.clip(x, x0, x1) - x0) / self.cellsize
        v = (np.clip(y, y0, y1) - y0) / self.cellsize
        i = np.minimum(np.floor(u).astype(int), max(self.ncols - 2, 0))
        j = np.minimum(np.floor(v).astype(int), max(self.nrows - 2, 0))
        fu = u - i if self.ncols > 1 else np.zeros_like(u)
        fv = v - j if self.nrows > 1 else np.zeros_like(v)
        i1 = np.minimum(i + 1, self.ncols - 1)
        j1 = np.minimum(j + 1, self.nrows - 1)
        g = self._grid
        corners = (g[j, i], g[j, i1], g[j1, i], g[j1, i1])
        blocked = np.isinf(corners[0]) | np.isinf(corners[1]) | np.isinf(corners[2]) | np.isinf(corners[3])
        with np.errstate(invalid="ignore"):
            z = (corners[0] * (1 - fu) + corners[1] * fu) * (1 - fv) + (corners[2] * (1 - fu) + corners[3] * fu) * fv
        z = np.where(blocked, np.inf, z)
        outside = np.inf if self.strict_bounds else -np.inf
        return np.where(inside, z, outside)

    def to_dict(self) -> dict:
        return {
            "ncols": self.ncols,
            "nrows": self.nrows,
            "origin": list(self.origin),
            "cellsize": self.cellsize,
            "nodata": self.nodata,
            "values": [float(v) for v in self.values],
        }


def elevation_at(emap: ElevationMap | None, x: float, y: float) -> float:
    if emap is None:
        return -math.inf
    return float(emap.elevation_many(x, y)[0])


def positions_clear(emap: ElevationMap | None, positions: np.ndarray, clearance: float = 0.0) -> bool:
    if emap is None:
        return True
    elev = emap.elevation_many(positions[:, 0], positions[:, 1])
    return bool(np.all(positions[:, 2] >= elev + clearance))


def state_clear(emap, state, clearance: float = 0.0) -> bool:
    return positions_clear(emap, np.array([[state.x, state.y, state.z]]), clearance)


def motion_clear(path, emap: ElevationMap | None, clearance: float = 0.0, ds: float = 10.0) -> bool:
    """True iff every sample of ``path`` at spacing ``ds`` (and its end) clears the terrain."""
    if not ds > 0.0:
        raise ValueError("ds must be positive")
    if clearance < 0.0:
        raise ValueError("clearance must be non-negative")
    if emap is None:
        return True
    _, pos, _, _, _ = path.sample_arrays(ds)
    return positions_clear(emap, pos, clearance)


def load_elevation_map(document, strict_bounds: bool = False) -> ElevationMap:
    """Parse an elevation map from JSON text, a ``dict``, or a file path."""
    where = "elevation map"
    if isinstance(document, Path) or (isinstance(document, str) and not document.lstrip().startswith("{")):
        where = f"elevation map {str(document)!r}"
        document = Path(document).read_text(encoding="utf-8")
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{where}: not valid JSON ({exc})") from exc
    if not isinstance(document, dict):
        raise FormatError(f"{where}: top level must be an object")
    for key in ("ncols", "nrows", "origin", "cellsize", "values"):
        if key not in document:
            raise FormatError(f"{where}: missing field {key!r}")
    ncols, nrows = document["ncols"], document["nrows"]
    if not all(isinstance(n, int) and not isinstance(n, bool) and n >= 1 for n in (ncols, nrows)):
        raise FormatError(f"{where}: 'ncols' and 'nrows' must be positive integers")
    origin = document["origin"]
    if not (isinstance(origin, list) and len(origin) == 2):
        raise FormatError(f"{where}: 'origin' must be a list of 2 numbers")
    values = document["values"]
    if not isinstance(values, list):
        raise FormatError(f"{where}: 'values' must be a list")
    try:
        return ElevationMap(
            ncols,
            nrows,
            origin,
            float(document["cellsize"]),
            [float(v) for v in values],
            document.get("nodata"),
            strict_bounds,
        )
    except (FormatError, ValueError, TypeError) as exc:
        raise FormatError(f"{where}: {exc}") from None


def save_elevation_map(emap: ElevationMap, path=None) -> str:
    text = json.dumps(emap.to_dict())
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text
