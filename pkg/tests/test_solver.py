"""Sparse solve, blended evaluation, and the 1-norm condition estimate."""

import numpy as np
import pytest
import scipy.sparse
from numpy.testing import assert_allclose

from rbfpum.assembly import GlobalSystem, assemble
from rbfpum.errors import CoverageError, SolveError
from rbfpum.geometry import build_covering, make_initial_points
from rbfpum.kernels import Matern6
from rbfpum.problems import make_problem
from rbfpum.solver import RESIDUAL_RTOL, estimate_condition, evaluate, local_values, solve


def u1_system(n_side=7, per_axis=2):
    prob = make_problem("u1")
    ps = make_initial_points(n_side)
    cov = build_covering(ps, per_axis)
    return assemble(ps, cov, Matern6(3.0), prob.source, prob.dirichlet), prob


# ---------------------------------------------------------------------------
# condition estimate


def test_condition_of_identity_is_one():
    assert estimate_condition(scipy.sparse.eye(30, format="csc")) == 1.0


def test_condition_of_diagonal_matrix():
    m = scipy.sparse.diags([1.0, 1e6, 10.0]).tocsc()
    assert_allclose(estimate_condition(m), 1e6, rtol=1e-12)


def test_condition_close_to_exact_on_dense_samples():
    # the 1-norm estimate is attainable (never above) and rarely far below
    rng = np.random.default_rng(300)
    for _ in range(20):
        m = rng.standard_normal((25, 25)) + 5.0 * np.eye(25)
        exact = np.linalg.norm(m, 1) * np.linalg.norm(np.linalg.inv(m), 1)
        est = estimate_condition(scipy.sparse.csc_matrix(m))
        assert est <= exact * (1.0 + 1e-10)
        assert est >= 0.25 * exact


def test_condition_of_singular_matrix_is_inf():
    m = scipy.sparse.csc_matrix((4, 4))
    assert estimate_condition(m) == np.inf


def test_condition_reuses_factorization():
    system, _ = u1_system()
    m = scipy.sparse.csc_matrix(system.matrix)
    lu = scipy.sparse.linalg.splu(m)
    assert estimate_condition(m, lu=lu) == estimate_condition(m)


# ---------------------------------------------------------------------------
# solve


def test_solve_residual_within_bound():
    system, _ = u1_system()
    sol = solve(system)
    residual = np.abs(system.matrix @ sol.nodal - system.rhs).max()
    norm_inf = np.abs(system.matrix).sum(axis=1).max()
    bound = RESIDUAL_RTOL * (norm_inf * np.abs(sol.nodal).max() + np.abs(system.rhs).max())
    assert residual <= bound
    assert np.isfinite(sol.condition) and sol.condition > 1.0


def test_solve_is_linear_in_rhs():
    system, _ = u1_system()
    doubled = GlobalSystem(
        system.matrix,
        2.0 * system.rhs,
        system.points,
        system.covering,
        system.kernel,
        system.local_systems,
    )
    a = solve(system, with_condition=False)
    b = solve(doubled, with_condition=False)
    assert_allclose(b.nodal, 2.0 * a.nodal, rtol=1e-12)
    assert np.isnan(a.condition)


def test_solve_reproduces_nodal_values():
    # the blended approximant interpolates its own nodal data
    prob = make_problem("u1")
    ps = make_initial_points(11)
    cov = build_covering(ps, 4)
    system = assemble(ps, cov, Matern6(3.0), prob.source, prob.dirichlet)
    sol = solve(system, with_condition=False)
    assert np.abs(evaluate(sol, ps.all_points()) - sol.nodal).max() <= 1e-8


def test_solve_approximates_exact_solution():
    system, prob = u1_system()
    sol = solve(system, with_condition=False)
    pts = np.random.default_rng(1).uniform(0.05, 0.95, size=(200, 2))
    assert np.abs(evaluate(sol, pts) - prob.exact(pts)).max() < 0.15


def test_solve_boundary_rows_hit_dirichlet_data():
    system, prob = u1_system()
    sol = solve(system, with_condition=False)
    n_int = system.points.n_interior
    assert_allclose(sol.nodal[n_int:], prob.exact(system.points.boundary), rtol=1e-12)


def test_solve_singular_matrix_raises():
    system, _ = u1_system()
    broken = GlobalSystem(
        scipy.sparse.csr_matrix(system.matrix.shape),
        system.rhs,
        system.points,
        system.covering,
        system.kernel,
        system.local_systems,
    )
    with pytest.raises(SolveError, match="factorization"):
        solve(broken)


def test_solve_nonfinite_rhs_raises():
    system, _ = u1_system()
    bad_rhs = system.rhs.copy()
    bad_rhs[0] = np.inf
    broken = GlobalSystem(
        system.matrix,
        bad_rhs,
        system.points,
        system.covering,
        system.kernel,
        system.local_systems,
    )
    with pytest.raises(SolveError, match="non-finite"):
        solve(broken)


# ---------------------------------------------------------------------------
# evaluation


def test_local_values_interpolate_members():
    system, _ = u1_system()
    sol = solve(system, with_condition=False)
    for patch in sol.covering.patches:
        nodes = sol.points.all_points()[patch.members]
        assert_allclose(
            local_values(sol, patch.index, nodes), sol.nodal[patch.members], atol=1e-9
        )


def test_single_patch_evaluate_equals_local_interpolant():
    prob = make_problem("u1")
    ps = make_initial_points(5)
    cov = build_covering(ps, 1, overlap=1.5)
    system = assemble(ps, cov, Matern6(3.0), prob.source, prob.dirichlet)
    sol = solve(system, with_condition=False)
    pts = np.random.default_rng(2).uniform(0.1, 0.9, size=(50, 2))
    assert_allclose(evaluate(sol, pts), local_values(sol, 0, pts), rtol=1e-14)


def test_evaluate_outside_covering_raises():
    system, _ = u1_system()
    sol = solve(system, with_condition=False)
    with pytest.raises(CoverageError, match="no patch"):
        evaluate(sol, [[0.5, 0.5], [3.0, 3.0]])
