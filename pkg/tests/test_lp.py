import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import lp_feasible_scipy
from stochgame.errors import DimensionMismatch
from stochgame.lp import LpProblem, lp_feasibility


def test_box_with_equality_is_feasible():
    res = lp_feasibility(LpProblem(1, A_eq=[[1.0]], b_eq=[0.5], bounds=[(0.0, 1.0)]))
    assert res.feasible
    assert res.x[0] == pytest.approx(0.5, abs=1e-12)


def test_contradictory_bounds_are_infeasible():
    res = lp_feasibility(LpProblem(1, A_ub=[[1.0]], b_ub=[0.0], bounds=[(1.0, None)]))
    assert not res.feasible and res.x is None


def test_free_variables_are_supported():
    res = lp_feasibility(LpProblem(2, A_eq=[[1.0, 1.0]], b_eq=[-3.0], bounds=[(None, None), (None, -1.0)]))
    assert res.feasible
    assert res.x.sum() == pytest.approx(-3.0) and res.x[1] <= -1.0 + 1e-9


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        LpProblem(2, A_ub=[[1.0]], b_ub=[1.0])
    with pytest.raises(DimensionMismatch):
        LpProblem(1, A_ub=[[np.inf]], b_ub=[1.0])


@settings(max_examples=60)
@given(st.integers(0, 2**32 - 1))
def test_planted_point_is_found(seed):
    rng = np.random.default_rng(seed)
    n, m, k = rng.integers(1, 6), rng.integers(0, 8), rng.integers(0, 3)
    x0 = rng.uniform(0.1, 2.0, n)
    A = rng.normal(size=(m, n))
    b = A @ x0 + rng.uniform(0, 0.5, m)
    E = rng.normal(size=(k, n))
    prob = LpProblem(n, A, b, E, E @ x0, bounds=[(0.0, 3.0)] * n)
    res = lp_feasibility(prob)
    assert res.feasible
    assert prob.violation(res.x) <= 1e-8


@settings(max_examples=80)
@given(st.integers(0, 2**32 - 1))
def test_agrees_with_reference_solver(seed):
    rng = np.random.default_rng(seed)
    n, m = rng.integers(1, 5), rng.integers(1, 7)
    A = rng.normal(size=(m, n))
    b = rng.normal(size=m)
    eq = rng.random() < 0.3
    E = rng.normal(size=(1, n)) if eq else None
    f = rng.normal(size=1) if eq else None
    bounds = [(-2.0, 2.0)] * n
    prob = LpProblem(n, A, b, E, f, bounds)
    assert lp_feasibility(prob).feasible == lp_feasible_scipy(prob)
