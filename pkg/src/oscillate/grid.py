"""Sampled functions on uniform grids, index-range cubes and prefix tables.

Functions are stored as cell-midpoint samples.  Integrals are midpoint sums
times the cell volume, so averages are exact for piecewise-constant data.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from itertools import product
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Real samples at cell midpoints of a 1D interval/torus or a 2D rectangle."""

    values: np.ndarray
    domain: tuple[tuple[float, float], ...]
    torus: bool = False

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim not in (1, 2):
            raise ValueError(f"only 1D and 2D grids are supported, got ndim={values.ndim}")
        domain = tuple((float(a), float(b)) for a, b in self.domain)
        if len(domain) != values.ndim:
            raise ValueError("domain needs one (a, b) pair per axis")
        for (a, b), n in zip(domain, values.shape):
            if n < 1:
                raise ValueError("every axis needs at least one cell")
            if not b > a:
                raise ValueError(f"empty interval [{a}, {b}]")
        if self.torus:
            if values.ndim != 1 or not (domain[0][0] == 0.0 and math.isclose(domain[0][1], TWO_PI)):
                raise ValueError("torus grids must be 1D on [0, 2*pi)")
        if not np.all(np.isfinite(values)):
            raise ValueError("values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "domain", domain)

    @classmethod
    def on_interval(cls, values, a: float = 0.0, b: float = 1.0) -> "GridFunction":
        return cls(np.asarray(values, dtype=float), ((a, b),))

    @classmethod
    def on_torus(cls, values) -> "GridFunction":
        return cls(np.asarray(values, dtype=float), ((0.0, TWO_PI),), torus=True)

    @property
    def dim(self) -> int:
        return self.values.ndim

    @property
    def n_cells(self) -> tuple[int, ...]:
        return self.values.shape

    @property
    def size(self) -> int:
        return self.values.size

    @property
    def mesh(self) -> tuple[float, ...]:
        return tuple((b - a) / n for (a, b), n in zip(self.domain, self.n_cells))

    @property
    def cell_volume(self) -> float:
        return math.prod(self.mesh)

    @property
    def measure(self) -> float:
        return math.prod(b - a for a, b in self.domain)

    def midpoints(self, axis: int = 0) -> np.ndarray:
        a, _ = self.domain[axis]
        h = self.mesh[axis]
        return a + (np.arange(self.n_cells[axis]) + 0.5) * h

    def with_values(self, values) -> "GridFunction":
        """Same grid, new samples."""
        return GridFunction(np.asarray(values, dtype=float).reshape(self.n_cells), self.domain, self.torus)

    def same_grid(self, other: "GridFunction") -> bool:
        return self.n_cells == other.n_cells and self.domain == other.domain and self.torus == other.torus

    def integral(self) -> float:
        return math.fsum(self.values.ravel()) * self.cell_volume

    def __add__(self, other):
        if isinstance(other, GridFunction):
            _require_same_grid(self, other)
            return self.with_values(self.values + other.values)
        return self.with_values(self.values + float(other))

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, GridFunction):
            _require_same_grid(self, other)
            return self.with_values(self.values - other.values)
        return self.with_values(self.values - float(other))

    def __mul__(self, c):
        return self.with_values(self.values * float(c))

    __rmul__ = __mul__

    def __neg__(self):
        return self.with_values(-self.values)

    def to_dict(self) -> dict:
        domain = list(self.domain[0]) if self.dim == 1 else [list(d) for d in self.domain]
        return {"domain": domain, "torus": self.torus, "values": self.values.tolist()}


def _require_same_grid(f: GridFunction, g: GridFunction) -> None:
    if not f.same_grid(g):
        raise ValueError("grid mismatch")


@dataclass(frozen=True, order=True)
class Cube:
    """Half-open index ranges ``[lo, hi)`` per axis; a union of whole cells."""

    lo: tuple[int, ...]
    hi: tuple[int, ...]

    def __post_init__(self):
        lo = tuple(int(v) for v in self.lo)
        hi = tuple(int(v) for v in self.hi)
        if len(lo) != len(hi) or not lo:
            raise ValueError("lo and hi need the same, nonzero length")
        if any(l < 0 or h <= l for l, h in zip(lo, hi)):
            raise ValueError(f"empty or negative cube {lo}..{hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def interval(cls, lo: int, hi: int) -> "Cube":
        return cls((lo,), (hi,))

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(h - l for l, h in zip(self.lo, self.hi))

    @property
    def cell_count(self) -> int:
        return math.prod(self.shape)

    def measure(self, f: GridFunction) -> float:
        return self.cell_count * f.cell_volume

    def contains(self, x) -> bool:
        x = _as_cell(x, self.dim)
        return all(l <= xi < h for l, xi, h in zip(self.lo, x, self.hi))

    def fits(self, n_cells: Sequence[int]) -> bool:
        return len(n_cells) == self.dim and all(h <= n for h, n in zip(self.hi, n_cells))

    def slices(self) -> tuple[slice, ...]:
        return tuple(slice(l, h) for l, h in zip(self.lo, self.hi))

    def to_list(self):
        if self.dim == 1:
            return [self.lo[0], self.hi[0]]
        return [[l, h] for l, h in zip(self.lo, self.hi)]

    @classmethod
    def from_list(cls, data) -> "Cube":
        if data and isinstance(data[0], (list, tuple)):
            return cls(tuple(d[0] for d in data), tuple(d[1] for d in data))
        return cls.interval(data[0], data[1])


def _as_cell(x, dim: int) -> tuple[int, ...]:
    if isinstance(x, (int, np.integer)):
        x = (int(x),)
    x = tuple(int(v) for v in x)
    if len(x) != dim:
        raise ValueError(f"cell index {x} does not match dimension {dim}")
    return x


def compensated_cumsum(a: np.ndarray, axis: int = 0) -> np.ndarray:
    """Zero-padded cumulative sum along ``axis`` with Neumaier compensation.

    Summation runs from low to high index, so results do not depend on
    hardware vectorisation order.
    """
    a = np.moveaxis(np.asarray(a, dtype=float), axis, 0)
    out = np.zeros((a.shape[0] + 1,) + a.shape[1:])
    s = np.zeros(a.shape[1:])
    c = np.zeros(a.shape[1:])
    for i in range(a.shape[0]):
        v = a[i]
        t = s + v
        c += np.where(np.abs(s) >= np.abs(v), (s - t) + v, (v - t) + s)
        s = t
        out[i + 1] = s + c
    return np.moveaxis(out, 0, axis)


class PrefixTable:
    """Cumulative sums of values and of |values| for O(1) cube sums."""

    def __init__(self, f: GridFunction):
        self.grid = f
        self.sums = self._table(f.values)
        self.abs_sums = self._table(np.abs(f.values))
        self.sums.setflags(write=False)
        self.abs_sums.setflags(write=False)

    @staticmethod
    def _table(values: np.ndarray) -> np.ndarray:
        table = values
        for axis in range(values.ndim):
            table = compensated_cumsum(table, axis)
        return table

    def _box(self, table: np.ndarray, lo, hi):
        lo = np.asarray(lo)
        hi = np.asarray(hi)
        if table.ndim == 1:
            return table[hi[..., 0]] - table[lo[..., 0]]
        l0, l1 = lo[..., 0], lo[..., 1]
        h0, h1 = hi[..., 0], hi[..., 1]
        return table[h0, h1] - table[l0, h1] - table[h0, l1] + table[l0, l1]

    def sum(self, q: Cube) -> float:
        self._check(q)
        return float(self._box(self.sums, q.lo, q.hi))

    def abs_sum(self, q: Cube) -> float:
        self._check(q)
        return float(self._box(self.abs_sums, q.lo, q.hi))

    def sums_over(self, los: np.ndarray, his: np.ndarray) -> np.ndarray:
        """Vectorised cube sums; ``los``/``his`` have shape (k, dim)."""
        return self._box(self.sums, los, his)

    def abs_sums_over(self, los: np.ndarray, his: np.ndarray) -> np.ndarray:
        return self._box(self.abs_sums, los, his)

    def _check(self, q: Cube) -> None:
        if not q.fits(self.grid.n_cells):
            raise ValueError(f"cube {q} lies outside grid {self.grid.n_cells}")


def build_prefix(f: GridFunction) -> PrefixTable:
    return PrefixTable(f)


def cube_average(table: PrefixTable, q: Cube) -> float:
    """Mean of the cell values in ``q``; the discrete f^#_Q."""
    return table.sum(q) / q.cell_count


def cube_abs_average(table: PrefixTable, q: Cube) -> float:
    """|cube_average|; the discrete f_Q."""
    return abs(cube_average(table, q))


# -- cube families ---------------------------------------------------------

FAMILIES = ("all", "dyadic")


def cube_bounds(n_cells: Sequence[int], family: str = "all", min_cells: int = 1,
                containing=None) -> tuple[np.ndarray, np.ndarray]:
    """Arrays ``(los, his)`` of shape (k, dim) for a cube family.

    Order is by cell count ascending, then lexicographically by ``lo`` and
    ``hi``.  This is the vectorised form of :func:`enumerate_cubes`.
    """
    n_cells = tuple(int(n) for n in n_cells)
    dim = len(n_cells)
    if min_cells < 1:
        raise ValueError("min_cells must be >= 1")
    if family == "all":
        per_axis = []
        for n in n_cells:
            lo, hi = np.triu_indices(n + 1, k=1)
            per_axis.append((lo, hi))
        if dim == 1:
            los = per_axis[0][0][:, None]
            his = per_axis[0][1][:, None]
        else:
            (l0, h0), (l1, h1) = per_axis
            i0, i1 = np.meshgrid(np.arange(len(l0)), np.arange(len(l1)), indexing="ij")
            i0, i1 = i0.ravel(), i1.ravel()
            los = np.stack([l0[i0], l1[i1]], axis=1)
            his = np.stack([h0[i0], h1[i1]], axis=1)
    elif family == "dyadic":
        lo_list, hi_list = [], []
        shape = n_cells
        level = 0
        while True:
            counts = [n // s for n, s in zip(n_cells, shape)]
            for idx in product(*(range(c) for c in counts)):
                lo_list.append([i * s for i, s in zip(idx, shape)])
                hi_list.append([(i + 1) * s for i, s in zip(idx, shape)])
            if any(s % 2 or s < 2 for s in shape):
                break
            shape = tuple(s // 2 for s in shape)
            level += 1
        los = np.array(lo_list, dtype=np.int64).reshape(-1, dim)
        his = np.array(hi_list, dtype=np.int64).reshape(-1, dim)
    else:
        raise ValueError(f"unknown cube family {family!r}; expected one of {FAMILIES}")

    counts = np.prod(his - los, axis=1)
    keep = counts >= min_cells
    if containing is not None:
        x = np.asarray(_as_cell(containing, dim))
        if np.any(x < 0) or np.any(x >= np.asarray(n_cells)):
            raise ValueError(f"cell {tuple(x)} outside grid {n_cells}")
        keep &= np.all((los <= x) & (x < his), axis=1)
    los, his, counts = los[keep], his[keep], counts[keep]
    keys = [his[:, d] for d in reversed(range(dim))] + [los[:, d] for d in reversed(range(dim))] + [counts]
    order = np.lexsort(keys)
    return los[order].astype(np.int64), his[order].astype(np.int64)


def enumerate_cubes(n_cells, family: str = "all", min_cells: int = 1, containing=None) -> list[Cube]:
    """List the cubes of a family on a grid (``n_cells`` or a GridFunction).

    ``family`` is ``"all"`` (every index-range box) or ``"dyadic"``
    (recursive halving of the whole grid).  ``containing`` restricts to
    cubes that contain the given cell.
    """
    if isinstance(n_cells, GridFunction):
        n_cells = n_cells.n_cells
    if isinstance(n_cells, (int, np.integer)):
        n_cells = (int(n_cells),)
    los, his = cube_bounds(n_cells, family, min_cells, containing)
    return [Cube(tuple(l), tuple(h)) for l, h in zip(los.tolist(), his.tolist())]


# -- generators ------------------------------------------------------------

# ``None`` marks a default that depends on the domain (its midpoint or length)
GENERATOR_DEFAULTS: dict[str, dict] = {
    "constant": {"c": 1.0},
    "step": {"at": None, "low": 0.0, "high": 1.0},
    "sawtooth": {"period": None, "amplitude": 1.0},
    "trig": {"cos": [(1, 1.0)], "sin": []},
    "log_singularity": {"x0": None},
    "weierstrass": {"a": 0.5, "b": 2.0, "n_terms": 25},
    "uniform": {"seed": 0, "low": -1.0, "high": 1.0},
}
GENERATORS = tuple(GENERATOR_DEFAULTS)


def weierstrass_sum(x, a: float = 0.5, b: float = 2.0, n_terms: int = 25) -> np.ndarray:
    """Sum_{n < n_terms} a^n cos(b^n pi x), term by term."""
    x = np.asarray(x, dtype=float)
    total = np.zeros_like(x)
    for n in range(n_terms):
        total = total + a**n * np.cos(b**n * math.pi * x)
    return total


def generate(kind: str, N: int, domain: tuple[float, float] | None = None, torus: bool | None = None,
             **params) -> GridFunction:
    """Sample a named test function at the N cell midpoints of a 1D grid.

    ``trig`` lives on the torus by default, everything else on [0, 1].
    ``trig`` takes ``cos``/``sin`` lists of ``(k, amplitude)`` pairs; see
    ``GENERATOR_DEFAULTS`` for the other parameters.
    """
    if N < 2:
        raise ValueError("N must be >= 2")
    if kind not in GENERATOR_DEFAULTS:
        raise ValueError(f"unknown generator {kind!r}; expected one of {GENERATORS}")
    unknown = set(params) - set(GENERATOR_DEFAULTS[kind])
    if unknown:
        raise ValueError(f"unknown parameters for {kind}: {sorted(unknown)}")
    if kind == "trig" and "sin" in params and "cos" not in params:
        params["cos"] = []
    p = {**GENERATOR_DEFAULTS[kind], **params}
    if torus is None:
        torus = kind == "trig" and domain is None
    if torus:
        f = GridFunction.on_torus(np.zeros(N))
    else:
        a, b = domain if domain is not None else (0.0, 1.0)
        f = GridFunction.on_interval(np.zeros(N), a, b)
    x = f.midpoints()
    (a, b), = f.domain
    centre = a + (b - a) / 2

    if kind == "constant":
        values = np.full(N, float(p["c"]))
    elif kind == "step":
        at = centre if p["at"] is None else float(p["at"])
        values = np.where(x < at, float(p["low"]), float(p["high"]))
    elif kind == "sawtooth":
        period = b - a if p["period"] is None else float(p["period"])
        if period <= 0:
            raise ValueError("sawtooth period must be positive")
        values = float(p["amplitude"]) * np.mod((x - a) / period, 1.0)
    elif kind == "trig":
        values = np.zeros(N)
        for k, amp in p["cos"]:
            values += float(amp) * np.cos(float(k) * x)
        for k, amp in p["sin"]:
            values += float(amp) * np.sin(float(k) * x)
    elif kind == "log_singularity":
        x0 = centre if p["x0"] is None else float(p["x0"])
        # clip inside half a cell so the singular cell stays finite
        values = np.log(np.maximum(np.abs(x - x0), f.mesh[0] / 2))
    elif kind == "weierstrass":
        wa, wb, n_terms = float(p["a"]), float(p["b"]), int(p["n_terms"])
        if wa <= 0 or wb < 1 or n_terms < 1:
            raise ValueError("weierstrass needs a > 0, b >= 1, n_terms >= 1")
        values = weierstrass_sum(x, wa, wb, n_terms)
    else:  # uniform
        rng = np.random.default_rng(int(p["seed"]))
        values = rng.uniform(float(p["low"]), float(p["high"]), N)
    return f.with_values(values)


# -- file formats ----------------------------------------------------------

def load_csv(text: str, domain=None) -> GridFunction:
    """One value per line (1D), or a ``rows,cols`` header then row-major values (2D)."""
    rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
    if not rows:
        raise ValueError("empty CSV input")
    try:
        if len(rows[0]) == 2 and all(_is_int(c) for c in rows[0]) and len(rows) > 1:
            n_rows, n_cols = (int(c) for c in rows[0])
            flat = [float(c) for r in rows[1:] for c in r if c.strip()]
            if len(flat) != n_rows * n_cols:
                raise ValueError(f"expected {n_rows * n_cols} values, found {len(flat)}")
            dom = domain or ((0.0, 1.0), (0.0, 1.0))
            return GridFunction(np.array(flat).reshape(n_rows, n_cols), dom)
        if any(len([c for c in r if c.strip()]) != 1 for r in rows):
            raise ValueError("1D CSV needs exactly one value per line")
        values = [float(r[0]) for r in rows]
    except ValueError as exc:
        raise ValueError(f"malformed CSV: {exc}") from None
    a, b = domain[0] if domain else (0.0, 1.0)
    return GridFunction.on_interval(values, a, b)


def _is_int(s: str) -> bool:
    try:
        int(s)
    except ValueError:
        return False
    return True


def load_json(text: str) -> GridFunction:
    data = json.loads(text)
    values = np.asarray(data["values"], dtype=float)
    torus = bool(data.get("torus", False))
    if torus:
        return GridFunction.on_torus(values)
    domain = data.get("domain")
    if values.ndim == 1:
        dom = (tuple(domain) if domain else (0.0, 1.0),)
    else:
        dom = tuple(tuple(d) for d in domain) if domain else ((0.0, 1.0),) * values.ndim
    return GridFunction(values, dom)


def load(path: str | Path) -> GridFunction:
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".json":
        return load_json(text)
    return load_csv(text)


def dumps_csv(f: GridFunction) -> str:
    if f.dim == 1:
        return "".join(f"{v!r}\n" for v in f.values.tolist())
    lines = [f"{f.n_cells[0]},{f.n_cells[1]}"]
    lines += [",".join(repr(v) for v in row) for row in f.values.tolist()]
    return "\n".join(lines) + "\n"


def iter_cells(f: GridFunction) -> Iterable[tuple[int, ...]]:
    return product(*(range(n) for n in f.n_cells))
