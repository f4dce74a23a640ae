import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from oscillate.atoms import atomic_dual_norm, build_dictionary, pair
from oscillate.grid import GridFunction, generate
from oscillate.zygmund import (bridge_check, centred_atom, cumulative_integral, discrete_derivative,
                               lambda_prime_norm, lipschitz_quotient, second_difference, second_difference_field,
                               symmetric_atom_pairings, zygmund_seminorm)


def sampled(fn, N, a=0.0, b=1.0):
    f = GridFunction.on_interval(np.zeros(N), a, b)
    return f.with_values(fn(f.midpoints()))


def test_second_differences():
    aff = sampled(lambda x: 3 * x - 1, 16)
    for h, xs, d in second_difference_field(aff):
        assert np.abs(d).max() < 1e-14
    sq = sampled(lambda x: x**2, 16)
    mesh = sq.mesh[0]
    for h, xs, d in second_difference_field(sq):
        assert np.allclose(d, 2 * (h * mesh) ** 2, atol=1e-15)
    assert second_difference(sq, 5, 3) == pytest.approx(2 * (3 * mesh) ** 2)
    with pytest.raises(IndexError):
        second_difference(sq, 1, 3)
    t = generate("trig", 8)
    assert second_difference(t, 0, 1) == pytest.approx(t.values[1] + t.values[7] - 2 * t.values[0])


def test_seminorm_examples():
    assert zygmund_seminorm(sampled(lambda x: 2 * x + 5, 32)).value < 1e-12
    r = zygmund_seminorm(sampled(lambda x: x**2, 16))
    assert r.value == pytest.approx(7 / 16, abs=1e-14)
    assert r.witness["zygmund"]["h"] == 7
    assert zygmund_seminorm(generate("step", 8)).value == 1 / (2 * 0.125)
    assert zygmund_seminorm(sampled(lambda x: x**3, 32), k=2).value == pytest.approx(6 * (15 / 32), rel=1e-9)
    with pytest.raises(ValueError):
        zygmund_seminorm(generate("step", 2))
    with pytest.raises(ValueError):
        zygmund_seminorm(generate("step", 8), normalization="h^2")


def test_weierstrass_plateau_and_lipschitz_growth():
    zyg = [zygmund_seminorm(generate("weierstrass", n)).value for n in (64, 128, 256, 512)]
    lip = [lipschitz_quotient(generate("weierstrass", n)) for n in (64, 128, 256, 512)]
    assert max(zyg) / min(zyg) < 1.5
    assert all(b > a for a, b in zip(lip, lip[1:]))


def test_derivative_and_integral():
    assert np.all(discrete_derivative(GridFunction.on_interval(np.full(6, 2.0))).values == 0)
    x = sampled(lambda t: t, 10)
    assert np.allclose(discrete_derivative(x).values, 1.0)
    assert lipschitz_quotient(x) == pytest.approx(1.0)
    t = discrete_derivative(generate("trig", 16))
    assert t.torus and t.n_cells == (16,)


@settings(max_examples=30, deadline=None)
@given(arrays(float, st.integers(2, 40), elements=st.floats(-10, 10)))
def test_integral_inverts_derivative(v):
    f = GridFunction.on_interval(v)
    back = cumulative_integral(discrete_derivative(f))
    assert back.n_cells == f.n_cells
    assert np.allclose(back.values, v - v[0], atol=1e-12 * max(1.0, np.abs(v).max()))


def test_lambda_prime_examples():
    assert lambda_prime_norm(GridFunction.on_interval(np.zeros(8))).value == 0
    assert lambda_prime_norm(generate("step", 16)).value == pytest.approx(0.5, abs=1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_lambda_prime_equals_sup_over_symmetric_atoms(seed):
    rng = np.random.default_rng(seed)
    g = GridFunction.on_interval(rng.normal(size=32))
    sym = build_dictionary(g, "symmetric-all", include_constant=False)
    assert lambda_prime_norm(g).value == pytest.approx(atomic_dual_norm(g, sym).value, abs=1e-12)


def test_centred_atom_pairings():
    rng = np.random.default_rng(9)
    g = GridFunction.on_interval(rng.normal(size=12))
    for h, centres, pairs in symmetric_atom_pairings(g):
        for c, p in zip(centres, pairs):
            assert p == pytest.approx(pair(g, centred_atom(g, int(c), h)), abs=1e-13)


def test_bridge_examples():
    assert bridge_check(sampled(lambda x: x**2, 64)) < 1e-12
    assert bridge_check(sampled(lambda x: 4 * x - 2, 64)) < 1e-12
    assert bridge_check(generate("weierstrass", 256)) <= 1e-12
    assert bridge_check(generate("trig", 64)) <= 1e-12


@settings(max_examples=15, deadline=None)
@given(arrays(float, st.integers(3, 64), elements=st.floats(-1, 1)))
def test_bridge_random(v):
    assert bridge_check(GridFunction.on_interval(v)) <= 1e-12
