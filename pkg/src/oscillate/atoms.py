"""Special atoms, atom dictionaries, pairings and B^1 decompositions.

A difference atom on a cube I is ``(1/phi(I)) (chi_R - chi_L)`` where I is
cut through its centre into 2^dim subcubes and R collects 2^(dim-1) of them.
Subcube ``s`` has bit ``d`` set when it is the upper half along axis ``d``.
The constant atom is identically 1 on the whole grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import NamedTuple, Sequence

import numpy as np

from .grid import Cube, GridFunction, PrefixTable, cube_bounds
from .maximal import NormReport, weak_bmo_norm
from .optimize import DEFAULT_MAX_PIVOTS, L1Problem, L1Solution, solve_l1

CONSTANT_ID = "const"
DICT_FAMILIES = ("dyadic", "symmetric-all")

# sign vectors over subcubes used by the cascade; each is orthogonal to the
# constants and to the others
CASCADE_PATTERNS = {
    1: [(1,)],
    2: [(1, 3), (2, 3), (1, 2)],
}


class InfeasibleError(ValueError):
    pass


class CapExceededError(ValueError):
    pass


def default_pattern(dim: int) -> tuple[int, ...]:
    return CASCADE_PATTERNS[dim][0]


def all_patterns(dim: int) -> list[tuple[int, ...]]:
    return list(combinations(range(2**dim), 2 ** (dim - 1)))


def _subcubes(cube: Cube) -> list[Cube]:
    mids = [(l + h) // 2 for l, h in zip(cube.lo, cube.hi)]
    out = []
    for s in range(2**cube.dim):
        lo, hi = [], []
        for d, (l, m, h) in enumerate(zip(cube.lo, mids, cube.hi)):
            upper = (s >> d) & 1
            lo.append(m if upper else l)
            hi.append(h if upper else m)
        out.append(Cube(tuple(lo), tuple(hi)))
    return out


@dataclass(frozen=True)
class SpecialAtom:
    cube: Cube
    pattern: tuple[int, ...]
    weight: float  # phi(I)

    @property
    def dim(self) -> int:
        return self.cube.dim

    @property
    def key(self) -> str:
        return f"b{self.cube.to_list()}R{list(self.pattern)}".replace(" ", "")

    @property
    def amplitude(self) -> float:
        return 1.0 / self.weight

    def signs(self) -> np.ndarray:
        return np.array([1.0 if s in self.pattern else -1.0 for s in range(2**self.dim)])

    def subcubes(self) -> list[Cube]:
        return _subcubes(self.cube)

    def values(self, grid: GridFunction) -> np.ndarray:
        out = np.zeros(grid.n_cells)
        for sub, sign in zip(self.subcubes(), self.signs()):
            out[sub.slices()] = sign / self.weight
        return out

    def to_dict(self) -> dict:
        return {"cube": self.cube.to_list(), "pattern": list(self.pattern), "weight": self.weight}


@dataclass(frozen=True)
class ConstantAtom:
    n_cells: tuple[int, ...]

    key = CONSTANT_ID

    def values(self, grid: GridFunction) -> np.ndarray:
        return np.ones(grid.n_cells)

    def to_dict(self) -> dict:
        return {"cube": Cube((0,) * len(self.n_cells), self.n_cells).to_list(), "pattern": "constant"}


def make_atom(grid: GridFunction, cube: Cube, pattern: Sequence[int] | None = None,
              phi: GridFunction | None = None) -> SpecialAtom:
    """Difference atom on ``cube`` of ``grid``.

    The weight is ``phi(I) = integral of phi over I``; with no ``phi`` it is
    the Lebesgue measure of I, so the atom takes the values ±1/|I|.
    """
    if not cube.fits(grid.n_cells):
        raise ValueError(f"cube {cube} outside grid {grid.n_cells}")
    if any(n % 2 for n in cube.shape):
        raise ValueError(f"cube {cube} needs an even cell count on every axis")
    pattern = tuple(sorted(pattern)) if pattern is not None else default_pattern(cube.dim)
    if len(pattern) != 2 ** (cube.dim - 1) or len(set(pattern)) != len(pattern) \
            or any(not 0 <= s < 2**cube.dim for s in pattern):
        raise ValueError(f"pattern {pattern} must pick {2 ** (cube.dim - 1)} of {2**cube.dim} subcubes")
    if phi is None:
        weight = cube.measure(grid)
    else:
        if phi.n_cells != grid.n_cells:
            raise ValueError("phi must live on the atom's grid")
        weight = PrefixTable(phi).sum(cube) * phi.cell_volume
    if weight == 0 or not math.isfinite(weight):
        raise ValueError("atom weight phi(I) must be nonzero")
    return SpecialAtom(cube, pattern, float(weight))


class AtomDictionary:
    """An indexed collection of atoms on one grid."""

    def __init__(self, grid: GridFunction, atoms: Sequence):
        self.grid = grid
        self.atoms = list(atoms)
        self.ids = [a.key for a in self.atoms]
        if len(set(self.ids)) != len(self.ids):
            raise ValueError("atom ids must be unique")
        self._index = {k: i for i, k in enumerate(self.ids)}
        diff = [a for a in self.atoms if isinstance(a, SpecialAtom)]
        self._diff_pos = np.array([i for i, a in enumerate(self.atoms) if isinstance(a, SpecialAtom)], dtype=int)
        self._const_pos = [i for i, a in enumerate(self.atoms) if isinstance(a, ConstantAtom)]
        dim = grid.dim
        if diff:
            subs = [[(s.lo, s.hi) for s in a.subcubes()] for a in diff]
            self._sub_lo = np.array([[lo for lo, _ in row] for row in subs]).reshape(-1, dim)
            self._sub_hi = np.array([[hi for _, hi in row] for row in subs]).reshape(-1, dim)
            self._signs = np.array([a.signs() for a in diff])
            self._weights = np.array([a.weight for a in diff])

    def __len__(self):
        return len(self.atoms)

    def __getitem__(self, key: str):
        try:
            return self.atoms[self._index[key]]
        except KeyError:
            raise KeyError(f"unknown atom id {key!r}") from None

    def __contains__(self, key: str) -> bool:
        return key in self._index

    def design(self) -> np.ndarray:
        """Evaluation table, cells x atoms (cells in row-major order)."""
        return np.stack([a.values(self.grid).ravel() for a in self.atoms], axis=1)

    def pair_all(self, g: GridFunction) -> np.ndarray:
        """pair(g, atom) for every atom, in dictionary order."""
        _check_grid(self.grid, g)
        out = np.empty(len(self.atoms))
        table = PrefixTable(g)
        if self._diff_pos.size:
            sums = table.sums_over(self._sub_lo, self._sub_hi).reshape(self._signs.shape)
            out[self._diff_pos] = (sums * self._signs).sum(axis=1) * g.cell_volume / self._weights
        for i in self._const_pos:
            out[i] = g.integral()
        return out

    def permuted(self, order: Sequence[int]) -> "AtomDictionary":
        return AtomDictionary(self.grid, [self.atoms[i] for i in order])


def _check_grid(grid: GridFunction, g: GridFunction) -> None:
    if grid.n_cells != g.n_cells or grid.domain != g.domain:
        raise ValueError("grid mismatch between function and dictionary")


def build_dictionary(grid: GridFunction, family: str = "dyadic", include_constant: bool = True,
                     patterns: str = "default") -> AtomDictionary:
    """Atoms over a cube family.

    ``dyadic`` uses the dyadic tree, ``symmetric-all`` every cube with an
    even cell count on each axis.  In 2D ``patterns="all"`` (the default
    there) generates all 6 choices of R; in 1D only the right-positive atom
    is generated unless ``patterns="all"``.
    """
    if family == "dyadic":
        los, his = cube_bounds(grid.n_cells, "dyadic")
    elif family == "symmetric-all":
        los, his = cube_bounds(grid.n_cells, "all")
    else:
        raise ValueError(f"unknown dictionary family {family!r}; expected one of {DICT_FAMILIES}")
    shapes = his - los
    keep = np.all((shapes % 2 == 0) & (shapes >= 2), axis=1)
    if grid.dim == 1 and patterns == "default":
        pats = [default_pattern(1)]
    else:
        pats = all_patterns(grid.dim)
    atoms: list = [ConstantAtom(grid.n_cells)] if include_constant else []
    for lo, hi in zip(los[keep].tolist(), his[keep].tolist()):
        cube = Cube(tuple(lo), tuple(hi))
        weight = cube.measure(grid)
        atoms.extend(SpecialAtom(cube, p, weight) for p in pats)
    return AtomDictionary(grid, atoms)


def pair(g: GridFunction, atom) -> float:
    """T_g(b) = integral of b g over the grid."""
    if isinstance(atom, ConstantAtom):
        return g.integral()
    if not atom.cube.fits(g.n_cells):
        raise ValueError("atom does not fit the function's grid")
    table = PrefixTable(g)
    total = 0.0
    for sub, sign in zip(atom.subcubes(), atom.signs()):
        total += sign * table.sum(sub)
    return total * g.cell_volume / atom.weight


# -- decompositions --------------------------------------------------------

@dataclass
class Decomposition:
    terms: list[tuple[float, str]]
    l1_cost: float
    residual_norm: float
    method: str = ""
    solution: L1Solution | None = field(default=None, repr=False)

    def reconstruct(self, dictionary: AtomDictionary) -> GridFunction:
        out = np.zeros(dictionary.grid.n_cells)
        for coef, key in self.terms:
            out += coef * dictionary[key].values(dictionary.grid)
        return dictionary.grid.with_values(out)

    def to_dict(self, dictionary: AtomDictionary) -> dict:
        return {
            "method": self.method,
            "terms": [{"coef": c, "atom": dictionary[k].to_dict()} for c, k in self.terms],
            "l1_cost": self.l1_cost,
            "residual": self.residual_norm,
        }


def _finish(f: GridFunction, dictionary: AtomDictionary, terms, method: str, solution=None) -> Decomposition:
    d = Decomposition(terms, math.fsum(abs(c) for c, _ in terms), 0.0, method, solution)
    d.residual_norm = float(np.abs(d.reconstruct(dictionary).values - f.values).max(initial=0.0))
    return d


def pair_decomposition(g: GridFunction, d: Decomposition, dictionary: AtomDictionary) -> float:
    """sum_n c_n T_g(b_n)."""
    if not d.terms:
        return 0.0
    pairs = dict(zip(dictionary.ids, dictionary.pair_all(g)))
    try:
        return math.fsum(c * pairs[k] for c, k in d.terms)
    except KeyError as exc:
        raise KeyError(f"unknown atom id {exc.args[0]!r}") from None


def atomic_dual_norm(g: GridFunction, dictionary: AtomDictionary) -> NormReport:
    """max over dictionary atoms of |T_g(b)|; every atom has B^1 norm <= 1."""
    if not len(dictionary):
        raise ValueError("empty dictionary")
    pairs = np.abs(dictionary.pair_all(g))
    i = int(np.argmax(pairs))
    atom = dictionary.atoms[i]
    return NormReport(float(pairs[i]), {"atomic": float(pairs[i])}, {"atomic": {"atom": atom.to_dict(), "id": atom.key}},
                      convention="atom-sup", family="dictionary")


def _is_pow2(n: int) -> bool:
    return n >= 1 and n & (n - 1) == 0


def greedy_decompose(f: GridFunction, dictionary: AtomDictionary | None = None) -> Decomposition:
    """Dyadic cascade: constant term = mean of f, then one detail per node.

    At a node I with child averages ``c_s`` the coefficient of the atom with
    sign vector ``sigma`` is ``|I| * (sigma . c) / 2^dim``.
    """
    n = f.n_cells
    if not all(_is_pow2(k) for k in n) or len(set(n)) != 1:
        raise ValueError("greedy decomposition needs N a power of two (equal on every axis)")
    dictionary = dictionary or build_dictionary(f, "dyadic")
    _check_grid(dictionary.grid, f)
    dim = f.dim
    patterns = CASCADE_PATTERNS[dim]
    sign_rows = [np.array([1.0 if s in p else -1.0 for s in range(2**dim)]) for p in patterns]

    terms: list[tuple[float, str]] = []
    level_terms = []
    a = np.array(f.values, dtype=float)
    size = 1
    while a.shape[0] > 1:
        half = a.shape[0] // 2
        if dim == 1:
            children = a.reshape(half, 2)
        else:
            # flat index b1*2 + b0 is the subcube index s
            children = a.reshape(half, 2, half, 2).transpose(0, 2, 3, 1).reshape(half, half, 4)
        size *= 2
        weight = size**dim * f.cell_volume
        found = []
        for idx in np.ndindex(*children.shape[:-1]):
            c = children[idx]
            lo = tuple(i * size for i in idx)
            cube = Cube(lo, tuple(l + size for l in lo))
            for pat, sigma in zip(patterns, sign_rows):
                coef = weight * float(sigma @ c) / 2**dim
                if coef != 0.0:
                    found.append((coef, SpecialAtom(cube, pat, weight).key))
        level_terms.append(found)
        a = children.mean(axis=-1)
    mean = float(a.ravel()[0])
    if mean != 0.0:
        terms.append((mean, CONSTANT_ID))
    for found in reversed(level_terms):
        terms.extend(found)
    for _, key in terms:
        if key not in dictionary:
            raise ValueError(f"dictionary lacks cascade atom {key}")
    return _finish(f, dictionary, terms, "greedy")


def b1_norm_exact(f: GridFunction, dictionary: AtomDictionary | None = None, max_cells: int = 64,
                  max_atoms: int = 4096, tolerance: float = 1e-9,
                  max_pivots: int = DEFAULT_MAX_PIVOTS) -> Decomposition:
    """l1-minimal exact representation of f over the dictionary (an LP)."""
    if f.size > max_cells:
        raise CapExceededError(f"{f.size} cells exceeds the LP cap of {max_cells}")
    dictionary = dictionary or build_dictionary(f, "dyadic")
    _check_grid(dictionary.grid, f)
    if len(dictionary) > max_atoms:
        raise CapExceededError(f"{len(dictionary)} atoms exceeds the LP cap of {max_atoms}")
    problem = L1Problem(dictionary.design(), f.values.ravel(), tolerance, dictionary.ids, max_pivots)
    sol = solve_l1(problem)
    if sol.status == "infeasible":
        raise InfeasibleError("dictionary does not span the target")
    if sol.status != "optimal":
        raise CapExceededError(f"LP stopped with status {sol.status} after {sol.iterations} pivots")
    terms = [(c, k) for k, c in sol.coefficients.items() if c != 0.0]
    return _finish(f, dictionary, terms, "lp", sol)


class HolderResult(NamedTuple):
    lhs: float
    rhs: float
    holds: bool


def holder_check(d: Decomposition, g: GridFunction, dictionary: AtomDictionary, family: str = "all",
                 tol: float = 1e-9) -> HolderResult:
    """|T_g(f)| against l1_cost(f) * ||g||_BMO^w, with f given by its decomposition."""
    lhs = abs(pair_decomposition(g, d, dictionary))
    rhs = d.l1_cost * weak_bmo_norm(g, family).value
    return HolderResult(lhs, rhs, lhs <= rhs + tol)
