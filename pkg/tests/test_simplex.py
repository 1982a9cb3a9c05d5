import random
from fractions import Fraction

import numpy as np
import pytest
from scipy.optimize import linprog

from latticeplast.simplex import check_farkas, solve_lp


def test_trivial_feasible():
    res = solve_lp([[1, 1]], [1])
    assert res.status == "optimal"
    assert sum(res.x) == 1 and min(res.x) >= 0


def test_infeasible_with_farkas():
    # x1 + x2 = -1 has no nonnegative solution
    res = solve_lp([[1, 1]], [-1])
    assert res.status == "infeasible"
    assert check_farkas([[1, 1]], [-1], res.farkas)


def test_redundant_rows():
    A = [[1, 1, 0], [2, 2, 0], [0, 1, 1]]
    b = [2, 4, 3]
    res = solve_lp(A, b, c=[1, 0, 0])
    assert res.status == "optimal"
    assert res.x == (2, 0, 3)
    assert res.objective == 2


def test_unbounded():
    assert solve_lp([[1, -1]], [0], c=[1, 0]).status == "unbounded"


def test_exact_fractions():
    res = solve_lp([[3, 0], [0, 7]], [1, 2])
    assert res.x == (Fraction(1, 3), Fraction(2, 7))


@pytest.mark.parametrize("seed", range(60))
def test_matches_float_oracle(seed):
    rng = random.Random(seed)
    m, n = rng.randint(1, 4), rng.randint(1, 6)
    A = [[rng.randint(-3, 3) for _ in range(n)] for _ in range(m)]
    b = [rng.randint(-3, 3) for _ in range(m)]
    c = [rng.randint(-2, 2) for _ in range(n)]
    ours = solve_lp(A, b, c)
    ref = linprog(-np.array(c, float), A_eq=np.array(A, float), b_eq=np.array(b, float),
                  bounds=[(0, None)] * n, method="highs")
    if ref.status == 2:
        assert ours.status == "infeasible"
        assert check_farkas(A, b, ours.farkas)
    elif ref.status == 3:
        assert ours.status == "unbounded"
    else:
        assert ours.status == "optimal"
        x = ours.x
        assert all(v >= 0 for v in x)
        assert all(sum(Fraction(a) * v for a, v in zip(row, x)) == bi for row, bi in zip(A, b))
        assert float(ours.objective) == pytest.approx(-ref.fun, abs=1e-9)
