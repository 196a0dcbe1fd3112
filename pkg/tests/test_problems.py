"""Poisson test problems: f must equal -laplacian(u) for each exact solution."""

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from rbfpum.problems import PROBLEMS, PoissonProblem, make_problem


def fd_minus_laplacian(fn, pts, h=1e-3):
    """Richardson-extrapolated five-point stencil for -laplacian(fn)."""

    def five_point(step):
        return (
            fn(pts + (step, 0.0))
            + fn(pts - (step, 0.0))
            + fn(pts + (0.0, step))
            + fn(pts - (0.0, step))
            - 4.0 * fn(pts)
        ) / (step * step)

    return -(4.0 * five_point(h / 2.0) - five_point(h)) / 3.0


@pytest.mark.parametrize("name", sorted(PROBLEMS))
def test_source_is_minus_laplacian_of_exact(name):
    prob = make_problem(name)
    pts = np.random.default_rng(400).uniform(0.05, 0.95, size=(300, 2))
    f = prob.source(pts)
    fd = fd_minus_laplacian(prob.exact, pts)
    assert np.max(np.abs(f - fd) / (1.0 + np.abs(f))) < 1e-6


def test_u1_spot_values():
    p = make_problem("u1")
    assert_allclose(p.exact(np.array([[0.3, 0.7]]))[0], 0.04440636938643484, rtol=1e-15)
    assert_allclose(p.source(np.array([[0.3, 0.7]]))[0], 2.0708306067051705, rtol=1e-15)
    assert_allclose(p.exact(np.array([[0.5, 0.5]]))[0], 0.026134057570201378, rtol=1e-15)
    assert_allclose(p.source(np.array([[0.5, 0.5]]))[0], 5.608962498263335, rtol=1e-15)


def test_u2_spot_values():
    p = make_problem("u2")
    assert_allclose(p.exact(np.array([[0.3, 0.7]]))[0], 0.4095423187492794, rtol=1e-15)
    assert_allclose(p.source(np.array([[0.3, 0.7]]))[0], 6.79132897774827, rtol=1e-15)
    assert_allclose(p.exact(np.array([[0.5, 0.5]]))[0], 0.3453322672946759, rtol=1e-15)
    assert_allclose(p.source(np.array([[0.5, 0.5]]))[0], 15.202584984475882, rtol=1e-15)


def test_dirichlet_defaults_to_exact_trace():
    for name in PROBLEMS:
        p = make_problem(name)
        edge = np.array([[0.0, 0.3], [1.0, 0.8], [0.25, 0.0], [0.5, 1.0]])
        assert_array_equal(p.dirichlet(edge), p.exact(edge))


def test_dirichlet_override():
    g = lambda pts: np.zeros(np.atleast_2d(pts).shape[0])
    p = PoissonProblem("homog", _zero, _zero, dirichlet=g)
    assert p.dirichlet is g


def _zero(pts):
    return np.zeros(np.atleast_2d(pts).shape[0])


def test_functions_are_vectorized():
    p = make_problem("u2")
    pts = np.random.default_rng(401).uniform(0, 1, size=(17, 2))
    batched = p.exact(pts)
    assert batched.shape == (17,)
    singles = np.array([p.exact(row[None, :])[0] for row in pts])
    assert_array_equal(batched, singles)


def test_make_problem_lookup():
    assert make_problem("U1") is PROBLEMS["u1"]
    with pytest.raises(ValueError, match="unknown problem"):
        make_problem("u3")
