"""Direct solve of the collocation system, evaluation and condition estimate."""

from dataclasses import dataclass

import numpy as np
import scipy.sparse
import scipy.sparse.linalg

from .errors import CoverageError, SolveError
from .kernels import Wendland2

RESIDUAL_RTOL = 1e-8


def _hager_inverse_norm(solve_fn, solve_t_fn, n, max_sweeps=5):
    """Lower-bound estimate of ||M^{-1}||_1 from solves with M and M^T.

    Hager's power iteration on the 1-norm, capped at ``max_sweeps`` sweeps,
    finished with Higham's alternating-parity start as a safeguard; both
    produce attainable values, so the result never exceeds the true norm.
    """
    x = np.full(n, 1.0 / n)
    estimate = 0.0
    for sweep in range(max_sweeps):
        y = solve_fn(x)
        current = np.abs(y).sum()
        if sweep > 0 and current <= estimate:
            break
        estimate = current
        xi = np.where(y >= 0.0, 1.0, -1.0)
        z = solve_t_fn(xi)
        j = int(np.argmax(np.abs(z)))
        if np.abs(z).max() <= z @ x:
            break
        x = np.zeros(n)
        x[j] = 1.0
    parity = np.where(np.arange(n) % 2 == 0, 1.0, -1.0)
    scale = 1.0 + np.arange(n) / max(n - 1, 1)
    b = parity * scale
    estimate = max(estimate, 2.0 * np.abs(solve_fn(b)).sum() / (3.0 * n))
    return estimate


def estimate_condition(matrix, lu=None, max_sweeps=5):
    """1-norm condition estimate of a (sparse) matrix, condest-style.

    Reuses an existing SuperLU factorization when given; otherwise factors
    the matrix.  Returns inf for a singular matrix.
    """
    matrix = scipy.sparse.csc_matrix(matrix)
    if lu is None:
        try:
            lu = scipy.sparse.linalg.splu(matrix)
        except RuntimeError:
            return np.inf
    norm1 = np.abs(matrix).sum(axis=0).max() if matrix.nnz else 0.0
    inv_norm = _hager_inverse_norm(
        lambda v: lu.solve(v),
        lambda v: lu.solve(v, trans="T"),
        matrix.shape[0],
        max_sweeps,
    )
    return float(norm1 * inv_norm)


@dataclass
class Solution:
    """Nodal solution plus per-patch interpolation coefficients."""

    points: object
    covering: object
    kernel: object
    nodal: np.ndarray
    local_systems: list
    coefficients: list
    condition: float

    def patch_generator(self, patch):
        return Wendland2(1.0 / patch.radius)


def solve(system, with_condition=True):
    """Solve the assembled system by sparse LU and attach local coefficients.

    Raises SolveError if the factorization fails or the residual exceeds
    RESIDUAL_RTOL * (||L||_inf ||z||_inf + ||rhs||_inf).
    """
    matrix = scipy.sparse.csc_matrix(system.matrix)
    try:
        lu = scipy.sparse.linalg.splu(matrix)
        nodal = lu.solve(system.rhs)
    except RuntimeError as exc:
        raise SolveError(f"global factorization failed: {exc}") from exc
    if not np.isfinite(nodal).all():
        raise SolveError("solution contains non-finite entries")
    residual = np.abs(matrix @ nodal - system.rhs).max()
    norm_inf = np.abs(matrix).sum(axis=1).max() if matrix.nnz else 0.0
    bound = RESIDUAL_RTOL * (
        norm_inf * np.abs(nodal).max() + np.abs(system.rhs).max()
    )
    if residual > bound:
        raise SolveError(f"residual {residual:.3e} exceeds bound {bound:.3e}")
    condition = estimate_condition(matrix, lu=lu) if with_condition else np.nan
    coefficients = [
        loc.solve_coefficients(nodal[loc.patch.members])
        for loc in system.local_systems
    ]
    return Solution(
        system.points,
        system.covering,
        system.kernel,
        nodal,
        system.local_systems,
        coefficients,
        condition,
    )


def local_values(solution, patch_index, pts):
    """Local RBF interpolant of the solution on one patch, at ``pts``."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    patch = solution.covering.patches[patch_index]
    nodes = solution.points.all_points()[patch.members]
    dx = pts[:, None, :] - nodes[None, :, :]
    r = np.sqrt(np.einsum("ijk,ijk->ij", dx, dx))
    return solution.kernel.value(r) @ solution.coefficients[patch_index]


def evaluate(solution, pts):
    """Global approximant: Shepard blend of the local interpolants.

    Accumulates generator-weighted local values and normalizes by the
    generator sum, which equals the weighted blend without forming weights
    per patch.  Raises CoverageError for points inside no patch.
    """
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    active = solution.covering.active_mask(pts)
    if not active.any(axis=1).all():
        k = int(np.nonzero(~active.any(axis=1))[0][0])
        raise CoverageError(f"point {tuple(pts[k])} lies in no patch")
    points_all = solution.points.all_points()
    num = np.zeros(pts.shape[0])
    den = np.zeros(pts.shape[0])
    for patch, coef in zip(solution.covering.patches, solution.coefficients):
        idx = np.nonzero(active[:, patch.index])[0]
        if idx.size == 0:
            continue
        sub = pts[idx]
        offset = sub - patch.center
        rho = np.sqrt(np.einsum("ij,ij->i", offset, offset))
        psi = solution.patch_generator(patch).value(rho)
        dx = sub[:, None, :] - points_all[patch.members][None, :, :]
        r = np.sqrt(np.einsum("ijk,ijk->ij", dx, dx))
        num[idx] += psi * (solution.kernel.value(r) @ coef)
        den[idx] += psi
    return num / den
