"""Local differentiation systems and the global collocation matrix.

Per patch j the kernel matrices A, A_gx, A_gy, A_lap are built on the patch
members, the local operator is

    L_bar_j = -(W_lap A + 2 (W_gx A_gx + W_gy A_gy) + W A_lap) A^{-1}

with W* the diagonal weight matrices of the patch at its own members.  The
sign makes interior rows discretize -Laplacian, so the right-hand side uses
the source term directly.  Rows of L_bar_j for interior members are scattered
into the global matrix through the member index map; boundary rows of the
global system are identity rows.
"""

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse

from .errors import LocalConditioningError
from .pum_weights import member_weights

PIVOT_RTOL = 1e-14


@dataclass
class LocalSystem:
    """Kernel matrices, weight diagonals and the local operator of one patch."""

    patch: object
    a: np.ndarray
    a_grad_x: np.ndarray
    a_grad_y: np.ndarray
    a_lap: np.ndarray
    w: np.ndarray
    w_grad_x: np.ndarray
    w_grad_y: np.ndarray
    w_lap: np.ndarray
    l_bar: np.ndarray
    lu: tuple

    def solve_coefficients(self, nodal_values):
        """Interpolation coefficients A^{-1} v for nodal values on the patch."""
        return scipy.linalg.lu_solve(self.lu, nodal_values)


def kernel_matrices(kernel, centers_pts, source_pts):
    """A, A_gx, A_gy, A_lap with rows at ``centers_pts``, columns at sources."""
    dx = centers_pts[:, None, :] - source_pts[None, :, :]
    r = np.sqrt(np.einsum("ijk,ijk->ij", dx, dx))
    a = kernel.value(r)
    d_over_r = kernel.d_over_r(r)
    return a, d_over_r * dx[:, :, 0], d_over_r * dx[:, :, 1], kernel.laplacian(r)


def build_local_system(patch, points_all, kernel, weights):
    """Local operator for one patch given its weight columns at the members."""
    nodes = points_all[patch.members]
    a, a_gx, a_gy, a_lap = kernel_matrices(kernel, nodes, nodes)
    try:
        with warnings.catch_warnings():
            # the pivot check below turns singularity into a typed error
            warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
            lu, piv = scipy.linalg.lu_factor(a)
    except scipy.linalg.LinAlgError as exc:
        raise LocalConditioningError(patch.index, str(exc)) from exc
    pivot_floor = PIVOT_RTOL * np.linalg.norm(a, 1)
    if np.abs(np.diag(lu)).min() < pivot_floor:
        raise LocalConditioningError(
            patch.index,
            f"kernel matrix pivot below {pivot_floor:.3e}; nodes too close or "
            "shape parameter too small",
        )
    w, w_lap = weights["w"], weights["lap"]
    w_gx, w_gy = weights["grad"][:, 0], weights["grad"][:, 1]
    b = (
        w_lap[:, None] * a
        + 2.0 * (w_gx[:, None] * a_gx + w_gy[:, None] * a_gy)
        + w[:, None] * a_lap
    )
    l_bar = -scipy.linalg.lu_solve((lu, piv), b.T, trans=1).T
    return LocalSystem(
        patch, a, a_gx, a_gy, a_lap, w, w_gx, w_gy, w_lap, l_bar, (lu, piv)
    )


def build_local_systems(points, covering, kernel):
    """Local systems for every patch of the covering, in patch order."""
    points_all = points.all_points()
    columns = member_weights(covering, points_all)
    return [
        build_local_system(patch, points_all, kernel, cols)
        for patch, cols in zip(covering.patches, columns)
    ]


@dataclass
class GlobalSystem:
    """Assembled collocation system plus the pieces needed to evaluate."""

    matrix: scipy.sparse.csr_matrix
    rhs: np.ndarray
    points: object
    covering: object
    kernel: object
    local_systems: list


def assemble(points, covering, kernel, source, dirichlet):
    """Global system: -Laplacian rows at interior points, identity at boundary.

    ``source`` and ``dirichlet`` are vectorized callables on (n, 2) arrays.
    """
    local_systems = build_local_systems(points, covering, kernel)
    n_int, n = points.n_interior, points.n_total
    rows, cols, vals = [], [], []
    for loc in local_systems:
        members = loc.patch.members
        at_interior = np.nonzero(members < n_int)[0]
        if at_interior.size == 0:
            continue
        m = members.shape[0]
        rows.append(np.repeat(members[at_interior], m))
        cols.append(np.tile(members, at_interior.size))
        vals.append(loc.l_bar[at_interior, :].ravel())
    rows.append(np.arange(n_int, n))
    cols.append(np.arange(n_int, n))
    vals.append(np.ones(n - n_int))
    matrix = scipy.sparse.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n, n),
    ).tocsr()
    rhs = np.concatenate(
        [source(points.interior), dirichlet(points.boundary)]
        if points.n_boundary
        else [source(points.interior)]
    )
    return GlobalSystem(matrix, rhs, points, covering, kernel, local_systems)
