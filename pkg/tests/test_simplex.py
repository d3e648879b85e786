import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from distlearn.opt.simplex import InfeasibleError, LinearProgram, UnboundedError, simplex_solve
from helpers import random_feasible_lp, random_lp
from oracles import vertex_enumeration


def test_one_dimensional():
    sol = simplex_solve(LinearProgram([[1.0]], [1.0], [1.0], 0.0, 2.0))
    assert sol.x[0] == pytest.approx(1.0) and sol.objective == pytest.approx(1.0)


def test_symmetric_corner():
    lp = LinearProgram([[1, 0], [0, 1], [1, 1]], [0, 0, 1], [1, 1], 0, 10)
    assert simplex_solve(lp).objective == pytest.approx(1.0)


def test_random_instance_matches_enumeration():
    lp = random_feasible_lp(20, 5, seed=0)
    x, z = vertex_enumeration(lp.A, lp.b, lp.g, lp.lo, lp.hi)
    assert simplex_solve(lp).objective == pytest.approx(z, rel=1e-9, abs=1e-12)


def test_infeasible():
    lp = LinearProgram([[1.0], [-1.0]], [2.0, -1.0], [1.0], -5, 5)
    with pytest.raises(InfeasibleError):
        simplex_solve(lp)


def test_unbounded():
    lp = LinearProgram([[1.0, 1.0]], [0.0], [-1.0, 0.0], [-np.inf, 0.0], [np.inf, 1.0])
    with pytest.raises(UnboundedError):
        simplex_solve(lp)


def test_infinite_box_with_bounded_optimum():
    lp = LinearProgram([[1.0, 0.0], [0.0, 1.0]], [1.0, 2.0], [1.0, 1.0], -np.inf, np.inf)
    assert simplex_solve(lp).objective == pytest.approx(3.0)


def test_no_rows():
    sol = simplex_solve(LinearProgram(np.zeros((0, 2)), [], [1.0, -1.0], 0, 1))
    assert np.allclose(sol.x, [0, 1])


def test_degenerate_vertex_terminates():
    # many rows through the same optimal vertex
    A = np.array([[1, 0], [0, 1], [1, 1], [2, 1], [1, 2], [3, 3]], dtype=float)
    b = np.array([0, 0, 0, 0, 0, 0], dtype=float)
    sol = simplex_solve(LinearProgram(A, b, [1, 1], -1, 1))
    assert sol.objective == pytest.approx(0.0)


def test_deterministic():
    lp = random_feasible_lp(25, 4, seed=9)
    a, b = simplex_solve(lp), simplex_solve(lp)
    assert np.array_equal(a.x, b.x) and a.basis == b.basis


def test_shape_validation():
    with pytest.raises(ValueError):
        LinearProgram([[1.0, 2.0]], [1.0], [1.0], 0, 1)
    with pytest.raises(ValueError):
        LinearProgram([[1.0]], [1.0], [1.0], 1, 0)


@given(st.integers(0, 2**32 - 1), st.integers(1, 30), st.integers(1, 4))
def test_agrees_with_vertex_enumeration(seed, n, d):
    lp = random_lp(n, d, seed)
    ref = vertex_enumeration(lp.A, lp.b, lp.g, lp.lo, lp.hi)
    if ref is None:
        with pytest.raises(InfeasibleError):
            simplex_solve(lp)
        return
    sol = simplex_solve(lp)
    assert sol.objective == pytest.approx(ref[1], rel=1e-9, abs=1e-9)
    assert np.min(lp.slacks(sol.x)) >= -1e-9
    assert np.all(sol.x >= lp.lo - 1e-9) and np.all(sol.x <= lp.hi + 1e-9)
