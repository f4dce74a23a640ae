"""Maximal operators, (weak) BMO norms, VMO oscillation profiles, rotations.

Per cube Q with mean ``a = f^#_Q``:

* sharp oscillation  ``mean |f - a|``              (operator M#)
* weak oscillation   ``|a - c_Q|``                 (operator M)
* absolute average   ``|a|``                       (operator m)

where the centering constant ``c_Q`` is ``|a|`` under the default
``"literal-abs"`` convention and ``a`` under ``"signed"``.  With the literal
convention the weak oscillation equals ``2 * max(0, -a)``.

Suprema over "all cubes containing x" become maxima over a finite cube
family; the sup over x of a pointwise maximal function is the max over the
whole family, since every cube contains some cell.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .grid import Cube, GridFunction, PrefixTable, cube_bounds

CENTERINGS = ("literal-abs", "signed")


@dataclass
class NormReport:
    """A computed norm with its parts and the cubes/points attaining them."""

    value: float
    parts: dict[str, float]
    witness: dict[str, dict] = field(default_factory=dict)
    convention: str = "literal-abs"
    family: str = "all"
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        primary = next(iter(self.witness.values()), {})
        out = {
            "norm": self.value,
            "parts": dict(self.parts),
            "witness": primary,
            "witnesses": dict(self.witness),
            "convention": self.convention,
            "family": self.family,
        }
        if self.notes:
            out["notes"] = list(self.notes)
        return out


@dataclass
class OscillationProfile:
    scales: np.ndarray  # cube-measure thresholds, decreasing
    omega: np.ndarray
    flavor: str
    cell_counts: np.ndarray

    def to_dict(self) -> dict:
        return {
            "flavor": self.flavor,
            "scales": self.scales.tolist(),
            "cell_counts": self.cell_counts.tolist(),
            "omega": self.omega.tolist(),
        }


class Factor2Result(NamedTuple):
    lhs: float
    rhs: float
    holds: bool
    margin: float


# -- cube sweeps -----------------------------------------------------------

class CubeSweep:
    """All cubes of a family together with their averages."""

    def __init__(self, f: GridFunction, family: str = "all", min_cells: int = 1, containing=None,
                 table: PrefixTable | None = None):
        self.f = f
        self.family = family
        self.los, self.his = cube_bounds(f.n_cells, family, min_cells, containing)
        self.counts = np.prod(self.his - self.los, axis=1)
        table = table or PrefixTable(f)
        self.avg = table.sums_over(self.los, self.his) / self.counts

    def __len__(self):
        return len(self.counts)

    def cube(self, i: int) -> Cube:
        return Cube(tuple(self.los[i].tolist()), tuple(self.his[i].tolist()))

    def mean_abs_dev(self, centers: np.ndarray) -> np.ndarray:
        """mean_Q |f - centers[Q]| for every cube, summed cube by cube."""
        values = self.f.values
        shapes = self.his - self.los
        out = np.empty(len(self))
        uniq, inverse = np.unique(shapes, axis=0, return_inverse=True)
        inverse = np.asarray(inverse).ravel()
        axes = tuple(range(1, values.ndim + 1))
        for s, shape in enumerate(uniq):
            idx = np.flatnonzero(inverse == s)
            windows = sliding_window_view(values, tuple(shape))
            block = windows[tuple(self.los[idx].T)]
            c = centers[idx].reshape((-1,) + (1,) * values.ndim)
            out[idx] = np.abs(block - c).sum(axis=axes) / self.counts[idx]
        return out

    def pointwise_max(self, per_cube: np.ndarray) -> np.ndarray:
        """For each cell x, the max of ``per_cube`` over cubes containing x."""
        n = self.f.n_cells
        if self.f.dim == 1:
            N = n[0]
            table = np.full((N + 1, N + 1), -np.inf)
            np.maximum.at(table, (self.los[:, 0], self.his[:, 0]), per_cube)
            # best over hi > x for each lo, then over lo <= x
            suffix = np.maximum.accumulate(table[:, ::-1], axis=1)[:, ::-1]
            w = suffix[:, 1:]
            best = np.maximum.accumulate(w, axis=0)
            return best[np.arange(N), np.arange(N)]
        out = np.full(n, -np.inf)
        for lo, hi, v in zip(self.los.tolist(), self.his.tolist(), per_cube.tolist()):
            region = out[lo[0]:hi[0], lo[1]:hi[1]]
            np.maximum(region, v, out=region)
        return out

    def witness(self, per_cube: np.ndarray) -> tuple[float, dict]:
        i = int(np.argmax(per_cube))
        q = self.cube(i)
        x = q.lo[0] if q.dim == 1 else list(q.lo)
        return float(per_cube[i]), {"cube": q.to_list(), "x": x}


def _centers(avg: np.ndarray, centering: str) -> np.ndarray:
    if centering == "literal-abs":
        return np.abs(avg)
    if centering == "signed":
        return avg
    raise ValueError(f"unknown centering {centering!r}; expected one of {CENTERINGS}")


def sharp_oscillation(sweep: CubeSweep) -> np.ndarray:
    return sweep.mean_abs_dev(sweep.avg)


def weak_oscillation(sweep: CubeSweep, centering: str = "literal-abs") -> np.ndarray:
    return np.abs(sweep.avg - _centers(sweep.avg, centering))


def _pointwise_or_at(f, x, family, per_cube_fn):
    if x is None:
        sweep = CubeSweep(f, family)
        return sweep.pointwise_max(per_cube_fn(sweep))
    sweep = CubeSweep(f, family, containing=x)
    return float(np.max(per_cube_fn(sweep)))


# -- the three maximal operators ------------------------------------------

def sharp_maximal(f: GridFunction, x=None, family: str = "all"):
    """M#f(x) = max over Q containing x of mean_Q |f - f^#_Q|.

    With ``x=None`` the whole field is returned.
    """
    return _pointwise_or_at(f, x, family, sharp_oscillation)


def weak_maximal(f: GridFunction, x=None, family: str = "all", centering: str = "literal-abs"):
    """Mf(x) = max over Q containing x of |f^#_Q - f_Q|."""
    return _pointwise_or_at(f, x, family, lambda s: weak_oscillation(s, centering))


def small_m(f: GridFunction, x=None, family: str = "all"):
    """mf(x) = max over Q containing x of |f^#_Q|."""
    return _pointwise_or_at(f, x, family, lambda s: np.abs(s.avg))


# -- norms -----------------------------------------------------------------

def bmo_norm(f: GridFunction, family: str = "all") -> NormReport:
    sweep = CubeSweep(f, family)
    value, wit = sweep.witness(sharp_oscillation(sweep))
    return NormReport(value, {"sharp": value}, {"sharp": wit}, convention="mean-centered", family=family)


def weak_bmo_norm(f: GridFunction, family: str = "all", centering: str = "literal-abs") -> NormReport:
    """||mf||_inf + ||Mf||_inf, parts reported separately."""
    sweep = CubeSweep(f, family)
    m_val, m_wit = sweep.witness(np.abs(sweep.avg))
    w_val, w_wit = sweep.witness(weak_oscillation(sweep, centering))
    report = NormReport(m_val + w_val, {"m": m_val, "M": w_val}, {"m": m_wit, "M": w_wit},
                        convention=centering, family=family)
    if centering == "signed":
        report.notes.append("signed centering makes the M part identically zero")
    return report


def weak_bmo_star_norm(f: GridFunction, family: str = "all") -> NormReport:
    """||mf||_inf + 2 max_Q inf_{alpha >= 0} |f^#_Q - alpha|.

    The inner infimum is attained in closed form: it is ``max(0, -f^#_Q)``.
    """
    sweep = CubeSweep(f, family)
    m_val, m_wit = sweep.witness(np.abs(sweep.avg))
    dist, d_wit = sweep.witness(np.maximum(0.0, -sweep.avg))
    return NormReport(m_val + 2.0 * dist, {"m": m_val, "inf_alpha": dist}, {"m": m_wit, "inf_alpha": d_wit},
                      convention="alpha>=0", family=family)


def factor2_check(f: GridFunction, alpha: float, family: str = "all",
                  centering: str = "literal-abs", tol: float = 1e-12) -> Factor2Result:
    """Compare sup_{Q∋x} |f^#_Q - f_Q| with 2 sup_{Q∋x} |f^#_Q - alpha| at every cell x.

    ``lhs``/``rhs`` are the maxima over x (rhs already includes the factor
    2); ``holds`` requires the inequality at every x; ``margin`` is the
    smallest ``rhs(x) - lhs(x)``.
    """
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    sweep = CubeSweep(f, family)
    lhs_x = sweep.pointwise_max(weak_oscillation(sweep, centering))
    rhs_x = 2.0 * sweep.pointwise_max(np.abs(sweep.avg - alpha))
    margin = float(np.min(rhs_x - lhs_x))
    return Factor2Result(float(lhs_x.max()), float(rhs_x.max()), bool(margin >= -tol), margin)


def factor2_sweep(f: GridFunction, alphas, family: str = "all", centering: str = "literal-abs",
                  tol: float = 1e-12) -> list[Factor2Result]:
    """:func:`factor2_check` for many alphas, sharing one cube sweep."""
    alphas = np.asarray(alphas, dtype=float)
    if np.any(alphas < 0):
        raise ValueError("alpha must be non-negative")
    sweep = CubeSweep(f, family)
    lhs_x = sweep.pointwise_max(weak_oscillation(sweep, centering))
    out = []
    for a in alphas:
        rhs_x = 2.0 * sweep.pointwise_max(np.abs(sweep.avg - a))
        margin = float(np.min(rhs_x - lhs_x))
        out.append(Factor2Result(float(lhs_x.max()), float(rhs_x.max()), bool(margin >= -tol), margin))
    return out


def oscillation_profile(f: GridFunction, flavor: str = "strong", family: str = "all",
                        centering: str = "literal-abs") -> OscillationProfile:
    """omega(s) = max over cubes of measure <= s of the (strong|weak) oscillation.

    Scales run over the dyadic ladder 1, 2, 4, ... cells (plus the whole
    grid) and are reported in decreasing order.  The strong flavor is the
    classical mean-centred oscillation; ``centering`` only affects the weak one.
    """
    sweep = CubeSweep(f, family)
    if flavor == "strong":
        per_cube = sharp_oscillation(sweep)
    elif flavor == "weak":
        per_cube = np.abs(sweep.avg - _centers(sweep.avg, centering))
    else:
        raise ValueError("flavor must be 'strong' or 'weak'")
    total = f.size
    ladder = [1 << j for j in range(int(math.log2(total)) + 1)]
    if ladder[-1] != total:
        ladder.append(total)
    ladder = np.array(ladder[::-1])
    omega = np.array([per_cube[sweep.counts <= c].max(initial=0.0) for c in ladder])
    return OscillationProfile(ladder * f.cell_volume, omega, flavor, ladder)


def rotate(f: GridFunction, epsilon: float) -> GridFunction:
    """R_eps f(theta) = f(theta - eps), with eps snapped to whole cells."""
    if not f.torus:
        raise ValueError("rotation needs a torus grid function")
    shift = int(round(epsilon / f.mesh[0]))
    return f.with_values(np.roll(f.values, shift))
