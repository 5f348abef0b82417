"""Wind fields: analytic synthetic environments and gridded fields loaded from file."""

from __future__ import annotations

import json
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class FormatError(ValueError):
    """A wind, terrain or scenario document does not match its schema."""


@dataclass(frozen=True)
class WindVector:
    wx: float
    wy: float
    wz: float

    def __iter__(self):
        return iter((self.wx, self.wy, self.wz))


class WindField(ABC):
    """Temporally constant map from world position to a 3D wind vector (m/s)."""

    @abstractmethod
    def sample_many(self, positions: np.ndarray) -> np.ndarray:
        """Wind at each row of an ``(N, 3)`` position array, as an ``(N, 3)`` array."""

    def sample(self, position) -> WindVector:
        w = self.sample_many(np.asarray(position, dtype=float).reshape(1, 3))[0]
        return WindVector(float(w[0]), float(w[1]), float(w[2]))

    def to_dict(self) -> dict:
        raise NotImplementedError(f"{type(self).__name__} has no scenario representation")


def sample_wind(field: WindField, position) -> WindVector:
    return field.sample(position)


@dataclass(frozen=True)
class Uniform(WindField):
    wx: float = 0.0
    wy: float = 0.0
    wz: float = 0.0

    def sample_many(self, positions):
        return np.tile([self.wx, self.wy, self.wz], (len(positions), 1)).astype(float)

    def to_dict(self):
        return {"kind": "uniform", "wind": [self.wx, self.wy, self.wz]}


_AXES = {"x": 0, "y": 1}


@dataclass(frozen=True)
class HorizontalShear(WindField):
    """Two half-spaces split at ``axis == boundary`` with opposite horizontal winds.

    The wind blows along the other horizontal axis: ``+magnitude`` where the
    coordinate is at or above the boundary, ``-magnitude`` below it. With
    ``axis="y"`` the wind is ``(+-magnitude, 0, 0)``.
    """

    boundary: float = 0.0
    magnitude: float = 5.0
    axis: str = "y"

    def __post_init__(self):
        if self.axis not in _AXES:
            raise ValueError(f"shear axis must be 'x' or 'y', got {self.axis!r}")
        if not (math.isfinite(self.magnitude) and self.magnitude >= 0.0):
            raise ValueError("shear magnitude must be finite and non-negative")
        if not math.isfinite(self.boundary):
            raise ValueError("shear boundary must be finite")

    def sample_many(self, positions):
        positions = np.asarray(positions, dtype=float)
        split = _AXES[self.axis]
        sign = np.where(positions[:, split] >= self.boundary, 1.0, -1.0)
        out = np.zeros((len(positions), 3))
        out[:, 1 - split] = sign * self.magnitude
        return out

    def to_dict(self):
        return {"kind": "shear", "boundary": self.boundary, "magnitude": self.magnitude, "axis": self.axis}


@dataclass(frozen=True)
class UpdraftRegion(WindField):
    """Vertical wind ``strength`` inside an infinite vertical cylinder, calm outside."""

    center_x: float = 0.0
    center_y: float = 0.0
    radius: float = 300.0
    strength: float = 5.0

    def __post_init__(self):
        if not (math.isfinite(self.radius) and self.radius > 0.0):
            raise ValueError("updraft radius must be positive")
        if not math.isfinite(self.strength):
            raise ValueError("updraft strength must be finite")

    def sample_many(self, positions):
        positions = np.asarray(positions, dtype=float)
        dx = positions[:, 0] - self.center_x
        dy = positions[:, 1] - self.center_y
        inside = dx * dx + dy * dy <= self.radius * self.radius
        out = np.zeros((len(positions), 3))
        out[:, 2] = np.where(inside, self.strength, 0.0)
        return out

    def to_dict(self):
        return {
            "kind": "updraft",
            "center": [self.center_x, self.center_y],
            "radius": self.radius,
            "strength": self.strength,
        }


class GriddedWindField(WindField):
    """Wind sampled on a regular grid, trilinearly interpolated and clamped at the boundary.

    Value arrays are flat with x varying fastest: ``index = i + nx * (j + ny * k)``.
    """

    def __init__(self, shape, origin, spacing, wx, wy, wz):
        nx, ny, nz = (int(n) for n in shape)
        if min(nx, ny, nz) < 2:
            raise ValueError("grid needs at least 2 nodes per axis")
        spacing = tuple(float(s) for s in spacing)
        if not all(math.isfinite(s) and s > 0.0 for s in spacing):
            raise ValueError("grid spacing must be positive")
        self.shape = (nx, ny, nz)
        self.origin = tuple(float(o) for o in origin)
        self.spacing = spacing
        count = nx * ny * nz
        arrays = []
        for name, values in (("wx", wx), ("wy", wy), ("wz", wz)):
            arr = np.asarray(values, dtype=float).ravel()
            if arr.size != count:
                raise FormatError(f"wind grid array {name!r}: expected {count} values (nx*ny*nz), got {arr.size}")
            if not np.all(np.isfinite(arr)):
                bad = int(np.flatnonzero(~np.isfinite(arr))[0])
                raise FormatError(f"wind grid array {name!r}: non-finite value at index {bad}")
            arrays.append(arr)
        self.wx, self.wy, self.wz = arrays
        # (nz, ny, nx, 3) view for interpolation
        self._values = np.stack(arrays, axis=1).reshape(nz, ny, nx, 3)

    def sample_many(self, positions):
        positions = np.asarray(positions, dtype=float)
        o = np.asarray(self.origin)
        h = np.asarray(self.spacing)
        n = np.asarray(self.shape)
        u = np.clip((positions - o) / h, 0.0, n - 1)
        i0 = np.minimum(np.floor(u).astype(int), n - 2)
        f = u - i0
        ix, iy, iz = i0[:, 0], i0[:, 1], i0[:, 2]
        fx, fy, fz = f[:, 0:1], f[:, 1:2], f[:, 2:3]
        v = self._values
        c00 = v[iz, iy, ix] * (1 - fx) + v[iz, iy, ix + 1] * fx
        c10 = v[iz, iy + 1, ix] * (1 - fx) + v[iz, iy + 1, ix + 1] * fx
        c01 = v[iz + 1, iy, ix] * (1 - fx) + v[iz + 1, iy, ix + 1] * fx
        c11 = v[iz + 1, iy + 1, ix] * (1 - fx) + v[iz + 1, iy + 1, ix + 1] * fx
        c0 = c00 * (1 - fy) + c10 * fy
        c1 = c01 * (1 - fy) + c11 * fy
        return c0 * (1 - fz) + c1 * fz

    @classmethod
    def from_field(cls, field: WindField, shape, origin, spacing) -> GriddedWindField:
        """Rasterise any field onto a grid."""
        nx, ny, nz = shape
        xs = origin[0] + spacing[0] * np.arange(nx)
        ys = origin[1] + spacing[1] * np.arange(ny)
        zs = origin[2] + spacing[2] * np.arange(nz)
        zz, yy, xx = np.meshgrid(zs, ys, xs, indexing="ij")
        pts = np.column_stack([xx.ravel(), yy.ravel(), zz.ravel()])
        w = field.sample_many(pts)
        return cls(shape, origin, spacing, w[:, 0], w[:, 1], w[:, 2])

    def to_document(self) -> str:
        return save_wind_grid(self)


# --------------------------------------------------------------------------
# file IO


def _fmt(values) -> str:
    return "[" + ", ".join(format(float(v), ".17g") for v in values) + "]"


def save_wind_grid(field: GriddedWindField, path: str | Path | None = None) -> str:
    """Serialise a gridded field as JSON text; numbers carry 17 significant digits."""
    nx, ny, nz = field.shape
    lines = [
        "{",
        f'  "nx": {nx},',
        f'  "ny": {ny},',
        f'  "nz": {nz},',
        f'  "origin": {_fmt(field.origin)},',
        f'  "spacing": {_fmt(field.spacing)},',
        f'  "wx": {_fmt(field.wx)},',
        f'  "wy": {_fmt(field.wy)},',
        f'  "wz": {_fmt(field.wz)}',
        "}",
    ]
    text = "\n".join(lines) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def _require(doc: dict, key: str, where: str):
    if key not in doc:
        raise FormatError(f"{where}: missing field {key!r}")
    return doc[key]


def _real_list(doc, key, where, length=None):
    value = _require(doc, key, where)
    if not isinstance(value, list) or (length is not None and len(value) != length):
        want = f"a list of {length} numbers" if length else "a list of numbers"
        raise FormatError(f"{where}: field {key!r} must be {want}")
    for i, v in enumerate(value):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise FormatError(f"{where}: field {key!r} item {i} is not a number")
    return [float(v) for v in value]


def _positive_int(doc, key, where):
    value = _require(doc, key, where)
    if isinstance(value, bool) or not isinstance(value, int) or value < 2:
        raise FormatError(f"{where}: field {key!r} must be an integer >= 2, got {value!r}")
    return value


def load_wind_grid(document) -> GriddedWindField:
    """Parse a wind grid from JSON text, a ``dict``, or a file path."""
    where = "wind grid"
    if isinstance(document, Path) or (isinstance(document, str) and not document.lstrip().startswith("{")):
        where = f"wind grid {str(document)!r}"
        document = Path(document).read_text(encoding="utf-8")
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{where}: not valid JSON ({exc})") from exc
    if not isinstance(document, dict):
        raise FormatError(f"{where}: top level must be an object")
    shape = tuple(_positive_int(document, k, where) for k in ("nx", "ny", "nz"))
    origin = _real_list(document, "origin", where, 3)
    spacing = _real_list(document, "spacing", where, 3)
    if not all(math.isfinite(s) and s > 0.0 for s in spacing):
        raise FormatError(f"{where}: field 'spacing' must be strictly positive")
    if not all(math.isfinite(o) for o in origin):
        raise FormatError(f"{where}: field 'origin' must be finite")
    arrays = [_real_list(document, k, where) for k in ("wx", "wy", "wz")]
    try:
        return GriddedWindField(shape, origin, spacing, *arrays)
    except FormatError as exc:
        raise FormatError(f"{where}: {exc}") from None


# --------------------------------------------------------------------------
# synthetic environments


def make_synthetic(spec: dict, base_dir: str | Path | None = None) -> WindField:
    """Build a wind field from a scenario ``wind`` entry.

    ``kind`` is one of ``uniform``, ``shear``, ``updraft`` or ``grid``; a grid
    entry names a wind grid file relative to ``base_dir``.
    """
    if not isinstance(spec, dict) or "kind" not in spec:
        raise FormatError("wind description must be an object with a 'kind' field")
    kind = spec["kind"]
    try:
        if kind == "uniform":
            w = spec.get("wind", [0.0, 0.0, 0.0])
            return Uniform(*(float(c) for c in w))
        if kind == "shear":
            return HorizontalShear(
                boundary=float(spec.get("boundary", 0.0)),
                magnitude=float(spec["magnitude"]),
                axis=spec.get("axis", "y"),
            )
        if kind == "updraft":
            cx, cy = spec.get("center", [0.0, 0.0])
            return UpdraftRegion(float(cx), float(cy), float(spec.get("radius", 300.0)), float(spec.get("strength", 5.0)))
        if kind == "grid":
            path = Path(spec["path"])
            if base_dir is not None and not path.is_absolute():
                path = Path(base_dir) / path
            if not path.exists():
                raise FormatError(f"wind grid file {str(path)!r} not found")
            return load_wind_grid(path)
    except KeyError as exc:
        raise FormatError(f"wind of kind {kind!r}: missing field {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(f"wind of kind {kind!r}: {exc}") from None
    raise FormatError(f"unknown wind kind {kind!r}")
