"""Point sets, Halton draws, patch coverings and neighbor queries on [0,1]^2.

Collocation points live in a global ordering with interior points first and
boundary points appended after them; patch member indices refer to that
ordering.  Neighbor queries (fixed radius, nearest point) go through a
uniform background cell grid instead of a tree.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CoveringError

SEPARATION_DEFAULT = 1e-4


# ---------------------------------------------------------------------------
# point sets


@dataclass
class PointSet:
    """Interior and boundary collocation points on the unit square."""

    interior: np.ndarray
    boundary: np.ndarray

    def __post_init__(self):
        self.interior = np.atleast_2d(np.asarray(self.interior, dtype=float))
        self.boundary = np.atleast_2d(np.asarray(self.boundary, dtype=float))
        if self.interior.size == 0:
            self.interior = np.empty((0, 2))
        if self.boundary.size == 0:
            self.boundary = np.empty((0, 2))
        if self.interior.shape[1] != 2 or self.boundary.shape[1] != 2:
            raise ValueError("points must have shape (n, 2)")
        if self.interior.size and not (
            (self.interior > 0.0).all() and (self.interior < 1.0).all()
        ):
            raise ValueError("interior points must lie strictly inside (0,1)^2")
        if self.boundary.size:
            on_edge = (self.boundary == 0.0) | (self.boundary == 1.0)
            inside = (self.boundary >= 0.0) & (self.boundary <= 1.0)
            if not (on_edge.any(axis=1) & inside.all(axis=1)).all():
                raise ValueError("boundary points must lie on the perimeter")

    @property
    def n_interior(self):
        return self.interior.shape[0]

    @property
    def n_boundary(self):
        return self.boundary.shape[0]

    @property
    def n_total(self):
        return self.n_interior + self.n_boundary

    def all_points(self):
        """Stacked (n_total, 2) array, interior first."""
        return np.vstack([self.interior, self.boundary])


def boundary_count(n_interior):
    """Number of boundary ring points paired with ``n_interior`` nodes.

    Evaluates 4*ceil(sqrt(N_i) + 2) - 4 in exact integer arithmetic.
    """
    if n_interior < 1:
        raise ValueError("need at least one interior point")
    ceil_sqrt = math.isqrt(n_interior - 1) + 1 if n_interior > 1 else 1
    return 4 * ceil_sqrt + 4


def boundary_ring(count):
    """``count`` equispaced points on the unit-square perimeter.

    Starts at (0,0) and walks counterclockwise; the four corners are hit
    exactly whenever ``count`` is a multiple of 4 (always true for counts
    from :func:`boundary_count`).
    """
    if count < 4:
        raise ValueError("a boundary ring needs at least 4 points")
    t = 4.0 * np.arange(count) / count
    pts = np.empty((count, 2))
    for k, tk in enumerate(t):
        side, s = int(tk), tk - int(tk)
        if side == 0:
            pts[k] = (s, 0.0)
        elif side == 1:
            pts[k] = (1.0, s)
        elif side == 2:
            pts[k] = (1.0 - s, 1.0)
        else:
            pts[k] = (0.0, 1.0 - s)
    return pts


def radical_inverse(n, base):
    """Van der Corput radical inverse of integer n >= 0 in the given base."""
    inv, f = 0.0, 1.0 / base
    while n > 0:
        n, digit = divmod(n, base)
        inv += f * digit
        f /= base
    return inv


class HaltonStream:
    """Halton (2,3) sequence with an explicit cursor, skipping the origin.

    The cursor starts at index 1, whose point is (1/2, 1/3); drawing advances
    it, so consecutive draws never repeat points.
    """

    bases = (2, 3)

    def __init__(self, start_index=1):
        if start_index < 1:
            raise ValueError("start index must be >= 1")
        self.cursor = int(start_index)

    def draw(self, count):
        """Return the next ``count`` points as a (count, 2) array."""
        if count < 0:
            raise ValueError("count must be nonnegative")
        pts = np.empty((count, 2))
        for k in range(count):
            n = self.cursor + k
            pts[k] = (radical_inverse(n, 2), radical_inverse(n, 3))
        self.cursor += count
        return pts


def unit_grid(n_side):
    """Full n_side x n_side uniform grid on [0,1]^2 including edges."""
    g = np.linspace(0.0, 1.0, n_side)
    xx, yy = np.meshgrid(g, g, indexing="xy")
    return np.column_stack([xx.ravel(), yy.ravel()])


def make_initial_points(n_side, mode="grid"):
    """Initial collocation set for an (n_side x n_side)-equivalent density.

    ``mode="grid"`` places the (n_side-2)^2 interior points of the uniform
    n_side grid; ``mode="halton"`` draws the same count from a fresh Halton
    stream.  Boundary points always form the equispaced ring of size
    ``boundary_count(N_i)``.
    """
    if n_side < 3:
        raise ValueError("n_side must be at least 3")
    n_int = (n_side - 2) ** 2
    if mode == "grid":
        g = np.linspace(0.0, 1.0, n_side)[1:-1]
        xx, yy = np.meshgrid(g, g, indexing="xy")
        interior = np.column_stack([xx.ravel(), yy.ravel()])
    elif mode == "halton":
        interior = HaltonStream().draw(n_int)
    else:
        raise ValueError(f"unknown mode {mode!r}, expected 'grid' or 'halton'")
    return PointSet(interior, boundary_ring(boundary_count(n_int)))


# ---------------------------------------------------------------------------
# background cell grid


class CellGrid:
    """Uniform cell grid over a point cloud for radius and nearest queries."""

    def __init__(self, points, cell_size):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if cell_size <= 0.0:
            raise ValueError("cell size must be positive")
        self.points = points
        self.cell_size = float(cell_size)
        self.cells = {}
        keys = np.floor(points / self.cell_size).astype(np.int64)
        for idx, (ix, iy) in enumerate(keys):
            self.cells.setdefault((ix, iy), []).append(idx)
        if len(keys):
            self.key_lo = keys.min(axis=0)
            self.key_hi = keys.max(axis=0)
        else:
            self.key_lo = self.key_hi = np.zeros(2, dtype=np.int64)

    def in_ball(self, center, radius):
        """Sorted indices of points with |p - center|_2 <= radius."""
        cx, cy = float(center[0]), float(center[1])
        lo_x = math.floor((cx - radius) / self.cell_size)
        hi_x = math.floor((cx + radius) / self.cell_size)
        lo_y = math.floor((cy - radius) / self.cell_size)
        hi_y = math.floor((cy + radius) / self.cell_size)
        hits = []
        for ix in range(lo_x, hi_x + 1):
            for iy in range(lo_y, hi_y + 1):
                hits.extend(self.cells.get((ix, iy), ()))
        if not hits:
            return np.empty(0, dtype=np.int64)
        cand = np.asarray(hits, dtype=np.int64)
        d = self.points[cand] - (cx, cy)
        keep = cand[np.einsum("ij,ij->i", d, d) <= radius * radius]
        return np.sort(keep)

    def nearest(self, query):
        """Index of the closest point; ties resolved to the smallest index.

        Scans cells ring by ring outward from the query's cell and stops once
        no unexplored cell could hold a closer point.
        """
        if self.points.shape[0] == 0:
            raise ValueError("grid holds no points")
        qx, qy = float(query[0]), float(query[1])
        qix = math.floor(qx / self.cell_size)
        qiy = math.floor(qy / self.cell_size)
        # After this many rings every occupied cell has been scanned.
        last_ring = int(
            max(
                abs(qix - self.key_lo[0]),
                abs(qix - self.key_hi[0]),
                abs(qiy - self.key_lo[1]),
                abs(qiy - self.key_hi[1]),
            )
        )
        # Rings closer than the occupied cell box hold no points; skip them.
        first_ring = int(
            max(
                0,
                self.key_lo[0] - qix,
                qix - self.key_hi[0],
                self.key_lo[1] - qiy,
                qiy - self.key_hi[1],
            )
        )
        best_d2, best_idx = np.inf, -1
        for ring in range(first_ring, last_ring + 1):
            # Any point in a ring-r cell is at least (r-1)*cell away; stop
            # once that lower bound strictly exceeds the best distance.
            bound = (ring - 1) * self.cell_size
            if best_idx >= 0 and bound > 0 and bound * bound > best_d2:
                break
            for ix, iy in self._ring_cells(qix, qiy, ring):
                for idx in self.cells.get((ix, iy), ()):
                    d = self.points[idx] - (qx, qy)
                    d2 = float(d @ d)
                    if d2 < best_d2 or (d2 == best_d2 and idx < best_idx):
                        best_d2, best_idx = d2, idx
        return best_idx

    @staticmethod
    def _ring_cells(qix, qiy, ring):
        """Cells at Chebyshev distance exactly ``ring`` from (qix, qiy)."""
        if ring == 0:
            yield qix, qiy
            return
        for ix in range(qix - ring, qix + ring + 1):
            yield ix, qiy - ring
            yield ix, qiy + ring
        for iy in range(qiy - ring + 1, qiy + ring):
            yield qix - ring, iy
            yield qix + ring, iy


def nearest_point_index(query, points, grid=None):
    """Index into ``points`` of the point closest to ``query``."""
    if grid is None:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if points.shape[0] == 0:
            raise ValueError("no points to search")
        d = points - np.asarray(query, dtype=float)
        d2 = np.einsum("ij,ij->i", d, d)
        return int(np.argmin(d2))
    return int(grid.nearest(query))


def min_separation(points):
    """Exact minimum pairwise distance, block-wise to bound memory."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    n = points.shape[0]
    if n < 2:
        return np.inf
    best = np.inf
    block = 512
    for start in range(0, n, block):
        chunk = points[start : start + block]
        rest = points[start:]
        d2 = (
            np.sum(chunk * chunk, axis=1)[:, None]
            - 2.0 * chunk @ rest.T
            + np.sum(rest * rest, axis=1)[None, :]
        )
        m = chunk.shape[0]
        cols = np.arange(rest.shape[0])[None, :]
        rows = np.arange(m)[:, None]
        d2[cols <= rows] = np.inf
        local = d2.min()
        if local < best:
            best = local
    return math.sqrt(max(best, 0.0))


def separation_ok(points, delta):
    """True when all pairwise distances are >= delta (cell-grid check)."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    n = points.shape[0]
    if n < 2:
        return True
    grid = CellGrid(points, max(delta, 1e-12))
    d2min = delta * delta
    for idx in range(n):
        near = grid.in_ball(points[idx], delta)
        for j in near:
            if j != idx:
                d = points[idx] - points[j]
                if float(d @ d) < d2min:
                    return False
    return True


# ---------------------------------------------------------------------------
# patch coverings


@dataclass
class Patch:
    """Circular patch: center, radius and sorted member indices."""

    index: int
    center: np.ndarray
    radius: float
    members: np.ndarray

    @property
    def n_members(self):
        return self.members.shape[0]


@dataclass
class Covering:
    """Cell-centered grid of equal-radius circular patches over [0,1]^2."""

    per_axis: int
    overlap: float
    radius: float
    centers: np.ndarray
    patches: list = field(default_factory=list)

    @property
    def n_patches(self):
        return len(self.patches)

    def active_mask(self, pts):
        """Boolean (n_pts, n_patches) mask of strict containment |x-c| < r."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        diff = pts[:, None, :] - self.centers[None, :, :]
        d2 = np.einsum("pjk,pjk->pj", diff, diff)
        return d2 < self.radius * self.radius


def covering_radius(per_axis, overlap):
    """Patch radius: overlap times the half-diagonal of one grid cell."""
    return overlap * math.sqrt(2.0) / (2.0 * per_axis)


def patch_centers(per_axis):
    """Cell-centered (per_axis^2, 2) patch centers, x varying fastest."""
    g = (np.arange(per_axis) + 0.5) / per_axis
    xx, yy = np.meshgrid(g, g, indexing="xy")
    return np.column_stack([xx.ravel(), yy.ravel()])


# A domain corner sits sqrt(10)/2 ~ 1.5811 cell widths from its second
# nearest patch center; overlap 2.25 puts the radius (1.5910 cell widths)
# just past that, so every point of the square lies in at least two patches
# and interpolant-disagreement indicators have no blind spots.
OVERLAP_DEFAULT = 2.25


def default_patches_per_axis(n_total):
    """Patch grid resolution targeting a few dozen points per patch."""
    return max(2, round(math.sqrt(n_total) / 2.4))


def build_covering(points, per_axis, overlap=OVERLAP_DEFAULT):
    """Cover [0,1]^2 with per_axis^2 circular patches and assign members.

    ``points`` may be a PointSet or an (n, 2) array in global ordering.
    Membership is |x - c| <= radius.  Raises CoveringError if any patch ends
    up with fewer than 3 members.
    """
    if per_axis < 1:
        raise ValueError("patches_per_axis must be >= 1")
    if overlap < 1.0:
        raise ValueError("overlap must be >= 1 to cover the square")
    pts = points.all_points() if isinstance(points, PointSet) else np.asarray(points, dtype=float)
    radius = covering_radius(per_axis, overlap)
    centers = patch_centers(per_axis)
    grid = CellGrid(pts, radius)
    patches = []
    for j, center in enumerate(centers):
        members = grid.in_ball(center, radius)
        if members.shape[0] < 3:
            raise CoveringError(
                f"patch {j} at {tuple(center)} has {members.shape[0]} member(s); "
                "reduce patches_per_axis"
            )
        patches.append(Patch(j, center, radius, members))
    return Covering(per_axis, overlap, radius, centers, patches)
