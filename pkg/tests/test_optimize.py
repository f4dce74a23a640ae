import numpy as np
import pytest
from scipy.optimize import linprog

from oscillate.optimize import L1Problem, check_feasibility, solve_l1


def scipy_l1(A, b):
    m, k = A.shape
    res = linprog(np.ones(2 * k), A_eq=np.hstack([A, -A]), b_eq=b, bounds=(0, None), method="highs")
    return res.fun if res.status == 0 else None


@pytest.mark.parametrize("seed", range(20))
def test_matches_highs_on_random_instances(seed):
    rng = np.random.default_rng(seed)
    m, k = rng.integers(3, 9), rng.integers(9, 20)
    A = rng.normal(size=(m, k))
    b = A @ np.where(rng.random(k) < 0.3, rng.normal(size=k), 0.0)
    sol = solve_l1(L1Problem(A, b))
    assert sol.status == "optimal"
    assert sol.objective == pytest.approx(scipy_l1(A, b), abs=1e-8)
    assert check_feasibility(L1Problem(A, b), sol.vector) <= 1e-9
    assert abs(sol.duality_gap) <= 1e-8


def test_degenerate_and_redundant_rows():
    A = np.array([[1.0, 1.0, 0.0], [1.0, 1.0, 0.0], [0.0, 1.0, 1.0]])
    b = np.array([1.0, 1.0, 1.0])
    sol = solve_l1(L1Problem(A, b))
    assert sol.status == "optimal"
    assert sol.objective == pytest.approx(scipy_l1(A, b), abs=1e-12)


def test_zero_target_and_single_column():
    A = np.eye(4)
    sol = solve_l1(L1Problem(A, np.zeros(4)))
    assert sol.objective == 0 and all(v == 0 for v in sol.coefficients.values())
    sol = solve_l1(L1Problem(A, A[:, 2], ids=list("abcd")))
    assert sol.objective <= 1 + 1e-12
    assert sol.coefficients["c"] == pytest.approx(1.0)


def test_infeasible_and_cap():
    A = np.array([[1.0], [1.0]])
    assert solve_l1(L1Problem(A, np.array([1.0, 2.0]))).status == "infeasible"
    rng = np.random.default_rng(0)
    B = rng.normal(size=(6, 12))
    assert solve_l1(L1Problem(B, B @ rng.normal(size=12), max_pivots=1)).status == "cap-exceeded"


def test_feasibility_residual():
    p = L1Problem(np.eye(3), np.array([1.0, -2.0, 0.5]))
    assert check_feasibility(p, {"0": 1.0, "1": -2.0, "2": 0.5}) == 0
    assert check_feasibility(p, np.zeros(3)) == 2.0


def test_validation():
    with pytest.raises(ValueError):
        L1Problem(np.eye(2), np.zeros(3))
    with pytest.raises(ValueError):
        L1Problem(np.eye(2), np.zeros(2), tolerance=0)
    with pytest.raises(ValueError):
        L1Problem(np.eye(2), np.zeros(2), ids=["a"])


def test_deterministic():
    rng = np.random.default_rng(5)
    A = rng.normal(size=(5, 15))
    b = rng.normal(size=5)
    s1, s2 = solve_l1(L1Problem(A, b)), solve_l1(L1Problem(A, b))
    assert s1.coefficients == s2.coefficients and s1.iterations == s2.iterations
