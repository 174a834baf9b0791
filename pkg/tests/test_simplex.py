import itertools

import numpy as np
import pytest

from ckomega.errors import InputError
from ckomega.simplex import INFEASIBLE, OPTIMAL, UNBOUNDED, LinearProgram, solve


def test_spec_examples():
    s = solve(LinearProgram(np.array([1.0]), lhs_ineq=[[1.0]], rhs_ineq=[1.0]))
    assert s.status == OPTIMAL and s.optimum == pytest.approx(1.0, abs=1e-12)

    s = solve(LinearProgram(np.array([1.0])))
    assert s.status == UNBOUNDED

    s = solve(
        LinearProgram(
            np.array([1.0, 1.0]),
            lhs_ineq=[[1, 1], [1, 0], [0, 1], [-1, 0], [0, -1]],
            rhs_ineq=[2, 1, 1, 0, 0],
        )
    )
    assert s.status == OPTIMAL and s.optimum == pytest.approx(2.0, abs=1e-12)


def test_infeasible():
    s = solve(LinearProgram(np.array([1.0]), lhs_ineq=[[1.0], [-1.0]], rhs_ineq=[-1.0, -2.0]))
    assert s.status == INFEASIBLE


def test_equality_rows_and_min_sense():
    s = solve(
        LinearProgram(
            np.array([1.0, 2.0]),
            lhs_ineq=[[-1, 0], [0, -1]],
            rhs_ineq=[0, 0],
            lhs_eq=[[1, 1]],
            rhs_eq=[1],
        )
    )
    assert s.status == OPTIMAL and s.optimum == pytest.approx(2.0)
    assert s.x == pytest.approx([0.0, 1.0])

    s = solve(LinearProgram(np.array([1.0]), lhs_ineq=[[-1.0]], rhs_ineq=[-3.0], sense="min"))
    assert s.status == OPTIMAL and s.optimum == pytest.approx(3.0)


def test_dimension_mismatch_rejected():
    with pytest.raises(InputError):
        LinearProgram(np.array([1.0, 2.0]), lhs_ineq=[[1.0, 0.0]], rhs_ineq=[1.0, 2.0])


def _random_bounded_lp(rng, nv):
    """Random feasible bounded LP: box plus a few random cuts through a point."""
    m_extra = int(rng.integers(1, 6))
    A = [np.eye(nv), -np.eye(nv)]
    b = [np.full(nv, 2.0), np.full(nv, 2.0)]
    x0 = rng.uniform(-1, 1, nv)
    Ax = rng.normal(size=(m_extra, nv))
    b_extra = Ax @ x0 + rng.uniform(0.1, 2.0, m_extra)
    A.append(Ax)
    b.append(b_extra)
    return np.vstack(A), np.concatenate(b), rng.normal(size=nv)


def _vertex_enumerate(A, b, c):
    """Brute-force optimum over vertices of {Ax <= b} (independent oracle)."""
    m, nv = A.shape
    best = None
    for rows in itertools.combinations(range(m), nv):
        sub = A[list(rows)]
        if abs(np.linalg.det(sub)) < 1e-10:
            continue
        v = np.linalg.solve(sub, b[list(rows)])
        if np.all(A @ v <= b + 1e-9):
            val = c @ v
            if best is None or val > best:
                best = val
    return best


def test_random_lps_match_vertex_enumeration():
    rng = np.random.default_rng(2024)
    for _ in range(120):
        nv = int(rng.integers(2, 4))
        A, b, c = _random_bounded_lp(rng, nv)
        s = solve(LinearProgram(c, lhs_ineq=A, rhs_ineq=b))
        assert s.status == OPTIMAL
        oracle = _vertex_enumerate(A, b, c)
        assert oracle is not None
        assert s.optimum == pytest.approx(oracle, abs=1e-8)
        assert s.feasibility_residual <= 1e-9
        assert s.duality_gap <= 1e-7 * (1 + abs(s.optimum))
        assert s.complementarity_residual <= 1e-7 * (1 + abs(s.optimum))


def test_determinism_bitwise():
    rng = np.random.default_rng(5)
    A, b, c = _random_bounded_lp(rng, 3)
    s1 = solve(LinearProgram(c, lhs_ineq=A, rhs_ineq=b))
    s2 = solve(LinearProgram(c.copy(), lhs_ineq=A.copy(), rhs_ineq=b.copy()))
    assert s1.optimum == s2.optimum
    assert np.array_equal(s1.x, s2.x)
    assert s1.iterations == s2.iterations
    assert np.array_equal(s1.dual_ineq, s2.dual_ineq)


def test_duals_reproduce_objective():
    rng = np.random.default_rng(6)
    for _ in range(40):
        A, b, c = _random_bounded_lp(rng, 3)
        s = solve(LinearProgram(c, lhs_ineq=A, rhs_ineq=b))
        assert s.dual_ineq is not None
        assert np.all(s.dual_ineq >= -1e-9)
        assert b @ s.dual_ineq == pytest.approx(s.optimum, abs=1e-7 * (1 + abs(s.optimum)))


def test_degenerate_equality_redundant_rows():
    # x + y = 1 stated twice; max x s.t. x, y >= 0
    s = solve(
        LinearProgram(
            np.array([1.0, 0.0]),
            lhs_ineq=[[-1, 0], [0, -1]],
            rhs_ineq=[0, 0],
            lhs_eq=[[1, 1], [1, 1]],
            rhs_eq=[1, 1],
        )
    )
    assert s.status == OPTIMAL and s.optimum == pytest.approx(1.0)
