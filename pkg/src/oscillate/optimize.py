"""Exact l1 minimisation: min sum |alpha| subject to design @ alpha = target.

Coefficients are split as ``alpha = u - v`` with ``u, v >= 0`` and the
linear program is solved by a dense two-phase tableau simplex using Bland's
rule, which is deterministic and cannot cycle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

DEFAULT_MAX_PIVOTS = 10**6


@dataclass
class L1Problem:
    design: np.ndarray  # cells x atoms
    target: np.ndarray
    tolerance: float = 1e-9
    ids: Sequence[str] | None = None
    max_pivots: int = DEFAULT_MAX_PIVOTS

    def __post_init__(self):
        self.design = np.asarray(self.design, dtype=float)
        self.target = np.asarray(self.target, dtype=float).ravel()
        if self.design.ndim != 2 or self.design.shape[0] != self.target.size:
            raise ValueError("design must be (cells x atoms) with one row per target cell")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.ids is None:
            self.ids = [str(i) for i in range(self.design.shape[1])]
        elif len(self.ids) != self.design.shape[1]:
            raise ValueError("one id per design column")


@dataclass
class L1Solution:
    coefficients: dict[str, float]
    objective: float
    status: str  # optimal | infeasible | cap-exceeded
    iterations: int
    dual: np.ndarray | None = None
    duality_gap: float | None = None
    vector: np.ndarray = field(default=None, repr=False)


class _Tableau:
    def __init__(self, A: np.ndarray, b: np.ndarray, tol: float, max_pivots: int):
        m, n = A.shape
        self.m, self.n = m, n
        self.tol = tol
        self.max_pivots = max_pivots
        self.pivots = 0
        self.T = np.zeros((m + 1, n + m + 1))
        self.T[:m, :n] = A
        self.T[:m, n:n + m] = np.eye(m)
        self.T[:m, -1] = b
        self.basis = list(range(n, n + m))

    def set_costs(self, c: np.ndarray) -> None:
        """Objective row = reduced costs for the current basis."""
        rows = self.T[:-1]
        cb = c[self.basis]
        self.T[-1, :-1] = c - cb @ rows[:, :-1]
        self.T[-1, -1] = -(cb @ rows[:, -1])

    def pivot(self, i: int, j: int) -> None:
        T = self.T
        T[i] /= T[i, j]
        col = T[:, j].copy()
        col[i] = 0.0
        T -= np.outer(col, T[i])
        self.basis[i] = j
        self.pivots += 1

    def run(self, allowed: int) -> str:
        """Pivot until optimal over columns ``< allowed``; Bland's rule throughout."""
        T, tol = self.T, self.tol
        while True:
            reduced = T[-1, :allowed]
            candidates = np.flatnonzero(reduced < -tol)
            if candidates.size == 0:
                return "optimal"
            if self.pivots >= self.max_pivots:
                return "cap-exceeded"
            j = int(candidates[0])
            col = T[:-1, j]
            rows = np.flatnonzero(col > tol)
            if rows.size == 0:
                return "unbounded"
            ratios = T[rows, -1] / col[rows]
            best = ratios.min()
            ties = rows[ratios <= best + tol * max(1.0, abs(best))]
            i = int(min(ties, key=lambda r: self.basis[r]))
            self.pivot(i, j)


def _simplex(A: np.ndarray, b: np.ndarray, c: np.ndarray, tol: float, max_pivots: int):
    """min c @ x s.t. A x = b, x >= 0.  Returns (x, status, pivots, dual)."""
    m, n = A.shape
    sign = np.where(b < 0, -1.0, 1.0)
    A = A * sign[:, None]
    b = b * sign
    tab = _Tableau(A, b, tol, max_pivots)

    phase1 = np.concatenate([np.zeros(n), np.ones(m)])
    tab.set_costs(phase1)
    status = tab.run(n + m)
    scale = max(1.0, float(np.abs(b).max(initial=0.0)))
    if status == "cap-exceeded":
        return np.zeros(n), status, tab.pivots, None
    if -tab.T[-1, -1] > tol * scale * max(1, m):
        return np.zeros(n), "infeasible", tab.pivots, None

    # drive artificial variables out of the basis; drop redundant rows
    keep = []
    for i in range(m):
        if tab.basis[i] >= n:
            row = tab.T[i, :n]
            nz = np.flatnonzero(np.abs(row) > tol)
            if nz.size == 0:
                continue
            tab.pivot(i, int(nz[0]))
        keep.append(i)
    if len(keep) < m:
        rows = keep + [m]
        tab.T = tab.T[rows]
        tab.basis = [tab.basis[i] for i in keep]
        tab.m = len(keep)
    tab.T = np.delete(tab.T, np.s_[n:n + m], axis=1)
    tab.set_costs(c)
    status = tab.run(n)

    # recompute the basic solution from the original data for accuracy
    basis = tab.basis
    A_k = A[keep]
    x = np.zeros(n)
    B = A_k[:, basis]
    x[basis] = np.linalg.solve(B, b[keep])
    x[np.abs(x) < tol * 1e-3] = 0.0
    y_k = np.linalg.solve(B.T, c[basis])
    y = np.zeros(m)
    y[keep] = y_k
    return x, status, tab.pivots, y * sign


def solve_l1(p: L1Problem) -> L1Solution:
    """Minimum-l1 exact representation of ``p.target`` over the design columns."""
    m, k = p.design.shape
    if not np.any(p.target):
        return L1Solution({i: 0.0 for i in p.ids}, 0.0, "optimal", 0, np.zeros(m), 0.0, np.zeros(k))
    A = np.hstack([p.design, -p.design])
    c = np.ones(2 * k)
    x, status, pivots, y = _simplex(A, p.target, c, p.tolerance, p.max_pivots)
    alpha = x[:k] - x[k:]
    objective = math.fsum(np.abs(alpha))
    gap = None
    if y is not None:
        gap = objective - math.fsum(p.target * y)
    if status == "optimal" and check_feasibility(p, alpha) > p.tolerance * max(1.0, np.abs(p.target).max()):
        status = "infeasible"
    return L1Solution(dict(zip(p.ids, alpha.tolist())), objective, status, pivots, y, gap, alpha)


def check_feasibility(p: L1Problem, coefficients) -> float:
    """max over cells of |sum_i alpha_i b_i(cell) - f(cell)|."""
    if isinstance(coefficients, Mapping):
        alpha = np.array([coefficients.get(i, 0.0) for i in p.ids])
    else:
        alpha = np.asarray(coefficients, dtype=float)
    return float(np.abs(p.design @ alpha - p.target).max(initial=0.0))
