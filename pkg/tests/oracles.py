"""Slow reference implementations used only by the tests.

Everything here walks cubes with explicit Python loops and plain float
sums, so it shares no code with the prefix tables or vectorised sweeps.
"""

import itertools
import math


def intervals(N, family="all"):
    if family == "all":
        return [(lo, hi) for lo in range(N) for hi in range(lo + 1, N + 1)]
    out, size = [], N
    while size >= 1:
        out += [(lo, lo + size) for lo in range(0, N, size)]
        if size % 2:
            break
        size //= 2
    return out


def boxes(shape):
    (n0, n1) = shape
    return [((a, c), (b, d)) for a in range(n0) for b in range(a + 1, n0 + 1)
            for c in range(n1) for d in range(c + 1, n1 + 1)]


def cells(q):
    lo, hi = q
    if isinstance(lo, int):
        return [(i,) for i in range(lo, hi)]
    return list(itertools.product(*(range(l, h) for l, h in zip(lo, hi))))


def contains(q, x):
    lo, hi = q
    if isinstance(lo, int):
        return lo <= x < hi
    return all(l <= xi < h for l, xi, h in zip(lo, x, hi))


def cube_mean(values, q):
    pts = cells(q)
    return math.fsum(float(values[p if len(p) > 1 else p[0]]) for p in pts) / len(pts)


def _family(values, family):
    if values.ndim == 1:
        return intervals(len(values), family)
    return boxes(values.shape)


def maximal_at(values, x, kind, family="all"):
    """sharp / weak (literal centering) / small maximal function at cell x."""
    best = 0.0
    for q in _family(values, family):
        if not contains(q, x):
            continue
        avg = cube_mean(values, q)
        if kind == "sharp":
            pts = cells(q)
            val = math.fsum(abs(float(values[p if len(p) > 1 else p[0]]) - avg) for p in pts) / len(pts)
        elif kind == "weak":
            val = abs(avg - abs(avg))
        else:
            val = abs(avg)
        best = max(best, val)
    return best


def weak_bmo(values, family="all"):
    xs = range(len(values)) if values.ndim == 1 else itertools.product(*map(range, values.shape))
    xs = list(xs)
    m = max(maximal_at(values, x, "small", family) for x in xs)
    M = max(maximal_at(values, x, "weak", family) for x in xs)
    return m + M


def weierstrass_direct(x, a=0.5, b=2.0, n_terms=25):
    return sum(a**n * math.cos(b**n * math.pi * x) for n in range(n_terms))
