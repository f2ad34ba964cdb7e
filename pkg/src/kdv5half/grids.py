"""Uniform grids, sampled functions, and their serialization.

Everything downstream (transforms, norms, the solver) works on periodized
uniform grids.  A grid stands in for the real line: scenario data decay fast
enough that the periodization error sits below every tolerance used in the
test harness.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "UniformGrid",
    "GridFunction",
    "TimeSeries",
    "SpectrumFunction",
    "SpaceTimeField",
    "GridMismatchError",
    "canonical_json",
    "grid_function_to_csv",
    "grid_function_from_csv",
    "grid_function_to_json",
    "grid_function_from_json",
    "field_to_csv",
    "field_to_json",
    "field_from_json",
]


class GridMismatchError(ValueError):
    """Binary operation between functions living on different grids."""


@dataclass(frozen=True)
class UniformGrid:
    """Periodized uniform grid: nodes origin + k*step, k = 0..count-1.

    The periodization length is step*count; discrete frequencies are the
    standard FFT set with spacing 2*pi/length.
    """

    origin: float
    step: float
    count: int

    def __post_init__(self):
        if not (self.step > 0):
            raise ValueError(f"grid step must be positive, got {self.step}")
        if self.count < 2:
            raise ValueError(f"grid count must be >= 2, got {self.count}")

    @property
    def length(self) -> float:
        return self.step * self.count

    @property
    def nodes(self) -> np.ndarray:
        return self.origin + self.step * np.arange(self.count)

    @property
    def frequencies(self) -> np.ndarray:
        """Angular frequencies in FFT (unsorted) order."""
        return 2.0 * np.pi * np.fft.fftfreq(self.count, d=self.step)

    @property
    def freq_step(self) -> float:
        return 2.0 * np.pi / self.length

    @property
    def nyquist(self) -> float:
        return np.pi / self.step

    def index_of(self, coordinate: float) -> int:
        """Index of the node closest to `coordinate` (must lie on the grid)."""
        k = int(round((coordinate - self.origin) / self.step))
        if not (0 <= k < self.count):
            raise ValueError(f"coordinate {coordinate} outside grid range")
        if abs(self.origin + k * self.step - coordinate) > 1e-9 * max(1.0, abs(coordinate)):
            raise ValueError(f"coordinate {coordinate} does not lie on a grid node")
        return k

    def contains_time(self, t: float) -> bool:
        return self.origin <= t <= self.origin + self.step * (self.count - 1)


def _freeze(values: np.ndarray, shape_expected: tuple) -> np.ndarray:
    arr = np.asarray(values, dtype=np.complex128)
    if arr.shape != shape_expected:
        raise ValueError(f"values shape {arr.shape} does not match grid shape {shape_expected}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("values contain non-finite entries")
    arr = arr.copy()
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class GridFunction:
    """Complex samples on a UniformGrid (a function of one variable)."""

    grid: UniformGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "values", _freeze(self.values, (self.grid.count,)))

    @classmethod
    def from_callable(cls, grid: UniformGrid, fn) -> "GridFunction":
        return cls(grid, np.asarray(fn(grid.nodes), dtype=np.complex128))

    def require_same_grid(self, other: "GridFunction") -> None:
        if self.grid != other.grid:
            raise GridMismatchError(f"grids differ: {self.grid} vs {other.grid}")

    def __add__(self, other: "GridFunction") -> "GridFunction":
        self.require_same_grid(other)
        return type(self)(self.grid, self.values + other.values)

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        self.require_same_grid(other)
        return type(self)(self.grid, self.values - other.values)

    def __mul__(self, scalar) -> "GridFunction":
        return type(self)(self.grid, self.values * scalar)

    __rmul__ = __mul__


class TimeSeries(GridFunction):
    """A GridFunction whose grid runs over t rather than x."""


@dataclass(frozen=True)
class SpectrumFunction:
    """Discrete spectrum paired with the physical grid it came from.

    Coefficients are stored in FFT frequency order; `grid.frequencies` gives
    the matching angular frequencies.
    """

    grid: UniformGrid
    coefficients: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "coefficients", _freeze(self.coefficients, (self.grid.count,)))

    @property
    def frequencies(self) -> np.ndarray:
        return self.grid.frequencies


@dataclass(frozen=True)
class SpaceTimeField:
    """Complex samples u(x_i, t_n) on a tensor grid, shape (count_x, count_t)."""

    xgrid: UniformGrid
    tgrid: UniformGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(
            self, "values", _freeze(self.values, (self.xgrid.count, self.tgrid.count))
        )

    def require_same_grids(self, other: "SpaceTimeField") -> None:
        if self.xgrid != other.xgrid or self.tgrid != other.tgrid:
            raise GridMismatchError("space-time grids differ")

    def __add__(self, other: "SpaceTimeField") -> "SpaceTimeField":
        self.require_same_grids(other)
        return SpaceTimeField(self.xgrid, self.tgrid, self.values + other.values)

    def __sub__(self, other: "SpaceTimeField") -> "SpaceTimeField":
        self.require_same_grids(other)
        return SpaceTimeField(self.xgrid, self.tgrid, self.values - other.values)

    def __mul__(self, scalar) -> "SpaceTimeField":
        return SpaceTimeField(self.xgrid, self.tgrid, self.values * scalar)

    __rmul__ = __mul__

    def time_slice(self, n: int) -> GridFunction:
        return GridFunction(self.xgrid, self.values[:, n])

    def space_slice(self, i: int) -> TimeSeries:
        return TimeSeries(self.tgrid, self.values[i, :])


# ---------------------------------------------------------------------------
# Canonical JSON: deterministic float formatting (17 significant digits).
# ---------------------------------------------------------------------------

def _format_scalar(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if x is None:
        return "null"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        v = float(x)
        if not math.isfinite(v):
            raise ValueError(f"non-finite float in JSON payload: {v}")
        return f"{v:.17g}"
    if isinstance(x, str):
        return json.dumps(x)
    raise TypeError(f"unsupported JSON scalar type: {type(x)}")


def canonical_json(obj, indent: int = 0) -> str:
    """Serialize dict/list/scalar trees with floats printed at 17 significant
    digits. Identical inputs produce byte-identical output."""
    pad = " " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = []
        for key, val in obj.items():
            if not isinstance(key, str):
                raise TypeError("JSON object keys must be strings")
            items.append(f"{pad}  {json.dumps(key)}: {canonical_json(val, indent + 2)}")
        return "{\n" + ",\n".join(items) + f"\n{pad}}}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        scalars = all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq)
        if scalars:
            return "[" + ", ".join(_format_scalar(v) for v in seq) + "]"
        items = [f"{pad}  {canonical_json(v, indent + 2)}" for v in seq]
        return "[\n" + ",\n".join(items) + f"\n{pad}]"
    if isinstance(obj, (complex, np.complexfloating)):
        raise TypeError("split complex values into re/im before serializing")
    return _format_scalar(obj)


# ---------------------------------------------------------------------------
# CSV / JSON envelopes for sampled functions.
# ---------------------------------------------------------------------------

def grid_function_to_csv(f: GridFunction, stream=None) -> str:
    """Columns: coordinate, re, im."""
    buf = stream if stream is not None else io.StringIO()
    buf.write("coordinate,re,im\n")
    for x, v in zip(f.grid.nodes, f.values):
        buf.write(f"{x:.17g},{v.real:.17g},{v.imag:.17g}\n")
    return buf.getvalue() if stream is None else ""


def grid_function_from_csv(text: str, cls=GridFunction) -> GridFunction:
    rows = [line for line in text.strip().splitlines()[1:] if line]
    coords = np.empty(len(rows))
    vals = np.empty(len(rows), dtype=np.complex128)
    for i, row in enumerate(rows):
        c, re_part, im_part = row.split(",")
        coords[i] = float(c)
        vals[i] = float(re_part) + 1j * float(im_part)
    if len(coords) < 2:
        raise ValueError("CSV holds fewer than two samples")
    step = coords[1] - coords[0]
    grid = UniformGrid(origin=float(coords[0]), step=float(step), count=len(coords))
    return cls(grid, vals)


def _grid_meta(grid: UniformGrid) -> dict:
    return {"origin": grid.origin, "step": grid.step, "count": grid.count}


def _grid_from_meta(meta: dict) -> UniformGrid:
    return UniformGrid(origin=meta["origin"], step=meta["step"], count=int(meta["count"]))


def grid_function_to_json(f: GridFunction) -> str:
    payload = {
        "kind": "time_series" if isinstance(f, TimeSeries) else "grid_function",
        "grid": _grid_meta(f.grid),
        "re": [float(v) for v in f.values.real],
        "im": [float(v) for v in f.values.imag],
    }
    return canonical_json(payload)


def grid_function_from_json(text: str) -> GridFunction:
    payload = json.loads(text)
    grid = _grid_from_meta(payload["grid"])
    vals = np.asarray(payload["re"], dtype=float) + 1j * np.asarray(payload["im"], dtype=float)
    cls = TimeSeries if payload.get("kind") == "time_series" else GridFunction
    return cls(grid, vals)


def field_to_csv(u: SpaceTimeField, stream=None) -> str:
    """Long-format columns: x, t, re, im."""
    buf = stream if stream is not None else io.StringIO()
    buf.write("x,t,re,im\n")
    xs, ts = u.xgrid.nodes, u.tgrid.nodes
    for i, x in enumerate(xs):
        for n, t in enumerate(ts):
            v = u.values[i, n]
            buf.write(f"{x:.17g},{t:.17g},{v.real:.17g},{v.imag:.17g}\n")
    return buf.getvalue() if stream is None else ""


def field_to_json(u: SpaceTimeField) -> str:
    payload = {
        "kind": "space_time_field",
        "xgrid": _grid_meta(u.xgrid),
        "tgrid": _grid_meta(u.tgrid),
        "re": [[float(v) for v in row] for row in u.values.real],
        "im": [[float(v) for v in row] for row in u.values.imag],
    }
    return canonical_json(payload)


def field_from_json(text: str) -> SpaceTimeField:
    payload = json.loads(text)
    vals = np.asarray(payload["re"], dtype=float) + 1j * np.asarray(payload["im"], dtype=float)
    return SpaceTimeField(
        _grid_from_meta(payload["xgrid"]), _grid_from_meta(payload["tgrid"]), vals
    )
