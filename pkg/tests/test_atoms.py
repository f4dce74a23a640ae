import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from oscillate.atoms import (CONSTANT_ID, CapExceededError, ConstantAtom, Decomposition, InfeasibleError,
                             atomic_dual_norm, b1_norm_exact, build_dictionary, greedy_decompose, holder_check,
                             make_atom, pair, pair_decomposition)
from oscillate.grid import Cube, GridFunction, generate
from oscillate.maximal import weak_bmo_norm

unit = st.floats(-1, 1, allow_nan=False)


def f1(v, a=0.0, b=1.0):
    return GridFunction.on_interval(np.asarray(v, dtype=float), a, b)


def test_atom_values():
    grid = f1(np.zeros(4))
    b = make_atom(grid, Cube.interval(0, 4))
    assert b.values(grid).tolist() == [-1, -1, 1, 1]
    narrow = make_atom(f1(np.zeros(8)), Cube.interval(2, 6))
    assert np.abs(narrow.values(f1(np.zeros(8)))).max() == 2.0
    assert math.fsum(narrow.values(f1(np.zeros(8))) * 0.125) == 0.0
    with pytest.raises(ValueError):
        make_atom(grid, Cube.interval(0, 3))
    with pytest.raises(ValueError):
        make_atom(grid, Cube.interval(0, 4), phi=f1([1.0, -1, 1, -1]))


def test_weighted_atom():
    grid = f1(np.zeros(4))
    b = make_atom(grid, Cube.interval(0, 4), phi=f1([2.0, 2, 2, 2]))
    assert b.weight == 2.0 and b.values(grid).max() == 0.5


def test_2d_atoms_have_zero_mean():
    grid = GridFunction(np.zeros((4, 4)), ((0, 1), (0, 1)))
    d = build_dictionary(grid, "dyadic")
    assert len(d) == 1 + 6 * 5
    for atom in d.atoms[1:]:
        v = atom.values(grid)
        assert abs(v.sum()) < 1e-12
        assert np.abs(v).sum() * grid.cell_volume == pytest.approx(1.0)


def test_pairings():
    grid = f1(np.zeros(4))
    b = make_atom(grid, Cube.interval(0, 4))
    assert pair(f1(np.full(4, 3.0)), b) == 0.0
    assert pair(f1(b.values(grid)), b) == pytest.approx(1.0)
    x = f1([0.125, 0.375, 0.625, 0.875])
    assert pair(x, b) == pytest.approx(0.25, abs=1e-15)
    assert pair(f1(np.full(4, -2.0)), ConstantAtom((4,))) == -2.0


def test_pair_all_matches_pair():
    rng = np.random.default_rng(0)
    g = f1(rng.normal(size=16))
    d = build_dictionary(g, "symmetric-all")
    assert np.allclose(d.pair_all(g), [pair(g, a) for a in d.atoms], atol=1e-13)
    g2 = GridFunction(rng.normal(size=(4, 4)), ((0, 1), (0, 1)))
    d2 = build_dictionary(g2, "symmetric-all")
    assert np.allclose(d2.pair_all(g2), [pair(g2, a) for a in d2.atoms], atol=1e-13)


def test_pair_decomposition_orders_agree():
    rng = np.random.default_rng(2)
    f, g = f1(rng.normal(size=16)), f1(rng.normal(size=16))
    d = build_dictionary(f, "dyadic")
    dec = greedy_decompose(f, d)
    assert pair_decomposition(g, dec, d) == pytest.approx(math.fsum(f.values * g.values) / 16, abs=1e-10)
    assert pair_decomposition(g, Decomposition([], 0.0, 0.0), d) == 0.0
    c, key = dec.terms[3]
    assert pair_decomposition(g, Decomposition([(c, key)], abs(c), 0.0), d) == pytest.approx(c * pair(g, d[key]))
    with pytest.raises(KeyError):
        pair_decomposition(g, Decomposition([(1.0, "b[0,3]R[1]")], 1.0, 0.0), d)


def test_atomic_dual_norm_examples():
    grid = f1(np.zeros(4))
    diff_only = build_dictionary(grid, "dyadic", include_constant=False)
    assert atomic_dual_norm(f1(np.full(4, 2.0)), diff_only).value == 0
    assert atomic_dual_norm(f1(np.full(4, -2.0)), build_dictionary(grid)).value == 2.0
    step = generate("step", 4)
    r = atomic_dual_norm(step, diff_only)
    assert r.value == 0.5 and r.witness["atomic"]["atom"]["cube"] == [0, 4]
    brute = max(abs(pair(step, a)) for a in build_dictionary(grid, "dyadic").atoms)
    assert brute == 0.5


def test_greedy_examples():
    d = greedy_decompose(generate("step", 4))
    assert d.terms == [(0.5, CONSTANT_ID), (0.5, "b[0,4]R[1]")]
    assert d.residual_norm == 0
    const = greedy_decompose(f1(np.full(8, -3.0)))
    assert const.terms == [(-3.0, CONSTANT_ID)] and const.l1_cost == 3.0
    grid = f1(np.zeros(8))
    atom = make_atom(grid, Cube.interval(4, 6))
    single = greedy_decompose(grid.with_values(atom.values(grid)))
    assert single.terms == [(1.0, atom.key)] and single.l1_cost == 1.0
    with pytest.raises(ValueError):
        greedy_decompose(f1(np.zeros(6)))


@settings(max_examples=25, deadline=None)
@given(arrays(float, st.sampled_from([2, 4, 8, 16, 32]), elements=unit))
def test_greedy_reconstructs_exactly(v):
    f = f1(v)
    d = build_dictionary(f)
    dec = greedy_decompose(f, d)
    assert dec.residual_norm <= 1e-10
    assert np.allclose(dec.reconstruct(d).values, v, atol=1e-10)


def test_greedy_2d():
    rng = np.random.default_rng(4)
    f = GridFunction(rng.normal(size=(8, 8)), ((0, 1), (0, 1)))
    d = build_dictionary(f)
    dec = greedy_decompose(f, d)
    assert dec.residual_norm <= 1e-12
    lp = b1_norm_exact(f, d)
    assert lp.l1_cost == pytest.approx(dec.l1_cost, abs=1e-9)


@pytest.mark.parametrize("seed", range(10))
def test_lp_versus_greedy(seed):
    rng = np.random.default_rng(seed)
    f = f1(rng.uniform(-1, 1, 16))
    dy = build_dictionary(f, "dyadic")
    greedy = greedy_decompose(f, dy)
    lp = b1_norm_exact(f, dy)
    assert lp.l1_cost == pytest.approx(greedy.l1_cost, abs=1e-9)
    sym = b1_norm_exact(f, build_dictionary(f, "symmetric-all"))
    assert sym.l1_cost <= greedy.l1_cost + 1e-9
    assert sym.residual_norm <= 1e-9


def test_lp_small_examples():
    grid = f1(np.zeros(8))
    d = build_dictionary(grid, "symmetric-all")
    atom = d.atoms[5]
    assert b1_norm_exact(grid.with_values(atom.values(grid)), d).l1_cost <= 1 + 1e-12
    assert b1_norm_exact(grid, d).l1_cost == 0


def test_lp_brute_force_n8():
    rng = np.random.default_rng(11)
    grid = f1(np.zeros(8))
    d = build_dictionary(grid, "dyadic")
    B = d.design()
    for _ in range(10):
        cols = rng.choice(B.shape[1], size=3, replace=False)
        target = B[:, cols] @ rng.uniform(-2, 2, 3)
        best = min(math.fsum(np.abs(np.linalg.lstsq(B[:, s], target, rcond=None)[0]))
                   for k in (1, 2, 3) for s in itertools.combinations(range(B.shape[1]), k)
                   if np.abs(B[:, s] @ np.linalg.lstsq(B[:, s], target, rcond=None)[0] - target).max() < 1e-9)
        assert b1_norm_exact(grid.with_values(target), d).l1_cost == pytest.approx(best, abs=1e-9)


def test_lp_invariances():
    rng = np.random.default_rng(3)
    f = f1(rng.uniform(-1, 1, 8))
    d = build_dictionary(f, "symmetric-all")
    base = b1_norm_exact(f, d).l1_cost
    order = rng.permutation(len(d))
    assert b1_norm_exact(f, d.permuted(order)).l1_cost == pytest.approx(base, abs=1e-9)
    assert b1_norm_exact(-f, d).l1_cost == pytest.approx(base, abs=1e-9)
    assert b1_norm_exact(f * 2.5, d).l1_cost == pytest.approx(2.5 * base, abs=1e-9)


def test_lp_caps_and_infeasible():
    with pytest.raises(CapExceededError):
        b1_norm_exact(f1(np.zeros(128)))
    f = f1(np.arange(8.0))
    with pytest.raises(CapExceededError):
        b1_norm_exact(f, max_atoms=3)
    with pytest.raises(InfeasibleError):
        b1_norm_exact(f, build_dictionary(f, "dyadic", include_constant=False))


def test_holder_examples():
    grid = f1(np.zeros(4))
    d = build_dictionary(grid)
    b = make_atom(grid, Cube.interval(0, 4))
    f = grid.with_values(b.values(grid))
    r = holder_check(greedy_decompose(f, d), f, d)
    assert r.lhs == pytest.approx(1.0) and r.rhs == pytest.approx(weak_bmo_norm(f).value) and r.holds
    flat = holder_check(greedy_decompose(f, d), grid.with_values(np.full(4, 7.0)), d)
    assert flat.lhs == 0 and flat.holds


@settings(max_examples=25, deadline=None)
@given(arrays(float, 16, elements=unit), arrays(float, 16, elements=unit))
def test_holder_random(v, w):
    f, g = f1(v), f1(w)
    d = build_dictionary(f, "symmetric-all")
    assert holder_check(greedy_decompose(f, d), g, d).holds
    assert holder_check(b1_norm_exact(f, d), g, d).holds


@settings(max_examples=25, deadline=None)
@given(arrays(float, 16, elements=unit))
def test_atomic_dual_norm_bounded_by_weak_bmo(w):
    g = f1(w)
    assert atomic_dual_norm(g, build_dictionary(g, "symmetric-all")).value <= weak_bmo_norm(g).value + 1e-12


def test_dictionary_lookup_and_serialisation():
    grid = f1(np.zeros(8))
    d = build_dictionary(grid, "dyadic")
    assert CONSTANT_ID in d and "b[0,8]R[1]" in d
    with pytest.raises(KeyError):
        d["b[0,3]R[1]"]
    out = greedy_decompose(generate("step", 8), d).to_dict(d)
    assert out["terms"][0]["atom"]["pattern"] == "constant"
    assert out["terms"][1]["atom"] == {"cube": [0, 8], "pattern": [1], "weight": 1.0}
    with pytest.raises(ValueError):
        build_dictionary(grid, "haar")
