"""Second differences, Zygmund seminorms and the derivative-space norm.

Steps ``h`` are whole multiples of the mesh.  On an interval, ``(x, h)`` is
admissible when ``x - h`` and ``x + h`` are both cells; on the torus
indices wrap and ``h`` runs up to N/2.
"""

from __future__ import annotations

import numpy as np

from .atoms import SpecialAtom
from .grid import Cube, GridFunction, PrefixTable
from .maximal import NormReport, weak_bmo_norm

NORMALIZATIONS = ("2h", "h")


def _require_1d(f: GridFunction) -> None:
    if f.dim != 1:
        raise ValueError("only 1D grid functions are supported here")


def second_difference(f: GridFunction, x: int, h: int) -> float:
    """f(x+h) + f(x-h) - 2 f(x), with x and h in cells."""
    _require_1d(f)
    N = f.n_cells[0]
    v = f.values
    if f.torus:
        return float(v[(x + h) % N] + v[(x - h) % N] - 2.0 * v[x % N])
    if not (0 <= x - h and x + h < N):
        raise IndexError(f"x={x}, h={h} leaves the grid of {N} cells")
    return float(v[x + h] + v[x - h] - 2.0 * v[x])


def second_difference_field(f: GridFunction):
    """Yield ``(h, xs, delta)`` for every admissible step h (in cells)."""
    _require_1d(f)
    N = f.n_cells[0]
    v = f.values
    if f.torus:
        xs = np.arange(N)
        for h in range(1, N // 2 + 1):
            yield h, xs, np.roll(v, -h) + np.roll(v, h) - 2.0 * v
    else:
        for h in range(1, (N - 1) // 2 + 1):
            xs = np.arange(h, N - h)
            yield h, xs, v[2 * h:] + v[:N - 2 * h] - 2.0 * v[h:N - h]


def discrete_derivative(f: GridFunction) -> GridFunction:
    """Forward difference (f(x + mesh) - f(x)) / mesh.

    On an interval the N - 1 samples sit at the interior cell boundaries;
    on the torus the result keeps N samples and the torus grid.
    """
    _require_1d(f)
    N = f.n_cells[0]
    if N < 2:
        raise ValueError("need at least two cells")
    h = f.mesh[0]
    if f.torus:
        return f.with_values((np.roll(f.values, -1) - f.values) / h)
    (a, b), = f.domain
    return GridFunction.on_interval(np.diff(f.values) / h, a + h / 2, b - h / 2)


def cumulative_integral(g: GridFunction) -> GridFunction:
    """Antiderivative sampled at the cell boundaries, starting from 0.

    The output has N + 1 samples on the grid extended by half a cell at each
    end, so ``cumulative_integral(discrete_derivative(f)) == f - f[0]``.
    """
    _require_1d(g)
    h = g.mesh[0]
    (a, b), = g.domain
    table = PrefixTable(GridFunction.on_interval(g.values))
    return GridFunction.on_interval(table.sums * h, a - h / 2, b + h / 2)


def zygmund_seminorm(f: GridFunction, k: int = 1, normalization: str | None = None) -> NormReport:
    """max over (x, h) of |second difference of the (k-1)-th derivative| / norm(h).

    ``normalization`` defaults to ``"2h"`` for k = 1 and ``"h"`` otherwise.
    """
    _require_1d(f)
    if k < 1:
        raise ValueError("order k must be >= 1")
    if f.n_cells[0] < 3:
        raise ValueError("grid too small: need at least 3 cells")
    normalization = normalization or ("2h" if k == 1 else "h")
    if normalization not in NORMALIZATIONS:
        raise ValueError(f"normalization must be one of {NORMALIZATIONS}")
    g = f
    for _ in range(k - 1):
        g = discrete_derivative(g)
        if g.n_cells[0] < 3:
            raise ValueError("grid too small for this order")
    mesh = g.mesh[0]
    scale = 2.0 if normalization == "2h" else 1.0
    best, wit = 0.0, {"x": None, "h": None}
    for h, xs, delta in second_difference_field(g):
        q = np.abs(delta) / (scale * h * mesh)
        i = int(np.argmax(q))
        if q[i] > best:
            best = float(q[i])
            wit = {"x": int(xs[i]), "h": h, "h_length": h * mesh}
    return NormReport(best, {"zygmund": best}, {"zygmund": wit}, convention=f"k={k},normalization={normalization}",
                      family="all-steps")


def lipschitz_quotient(f: GridFunction) -> float:
    """max |f(x + mesh) - f(x)| / mesh."""
    _require_1d(f)
    return float(np.abs(discrete_derivative(f).values).max())


def lambda_prime_norm(g: GridFunction, family: str = "all") -> NormReport:
    """Zygmund seminorm of the antiderivative of g, next to ||g||_BMO^w."""
    _require_1d(g)
    z = zygmund_seminorm(cumulative_integral(GridFunction.on_interval(g.values, *g.domain[0])))
    w = weak_bmo_norm(g, family)
    ratio = z.value / w.value if w.value > 0 else None
    report = NormReport(z.value, {"lambda_prime": z.value, "weak_bmo": w.value}, {"lambda_prime": z.witness["zygmund"]},
                        convention="antiderivative", family=family)
    report.parts["ratio_to_weak_bmo"] = ratio
    return report


def symmetric_atom_pairings(g: GridFunction):
    """Yield ``(h, centres, pairings)`` over all centred atoms of g's grid.

    The atom with centre boundary ``c`` and half-width ``h`` cells covers
    cells ``[c - h, c + h)``; its pairing is computed from a prefix table.
    """
    _require_1d(g)
    N = g.n_cells[0]
    sums = PrefixTable(GridFunction.on_interval(g.values)).sums
    mesh = g.mesh[0]
    for h in range(1, N // 2 + 1):
        c = np.arange(h, N - h + 1)
        right = sums[c + h] - sums[c]
        left = sums[c] - sums[c - h]
        yield h, c, (right - left) * mesh / (2 * h * mesh)


def centred_atom(g: GridFunction, centre: int, h: int) -> SpecialAtom:
    cube = Cube.interval(centre - h, centre + h)
    return SpecialAtom(cube, (1,), cube.measure(g))


def bridge_check(f: GridFunction) -> float:
    """max over centred atoms of |T_{f'}(b_{x,h}) - second difference / 2h|.

    With forward differences both sides telescope to the same quantity, so
    the discrepancy is pure rounding.
    """
    _require_1d(f)
    if f.torus:
        f = GridFunction.on_interval(f.values, *f.domain[0])
    df = discrete_derivative(f)
    mesh = f.mesh[0]
    worst = 0.0
    fields = dict((h, (xs, d)) for h, xs, d in second_difference_field(f))
    for h, c, pairs in symmetric_atom_pairings(df):
        xs, delta = fields[h]
        # atom centre boundary c on the derivative grid is f's cell c
        expected = delta[c - h] / (2 * h * mesh)
        worst = max(worst, float(np.abs(pairs - expected).max(initial=0.0)))
    return worst
