"""Shepard partition-of-unity weights over a patch covering.

Each patch j carries a Wendland C2 generator psi_j(x) = W2(|x - c_j|) scaled
so its support is exactly the patch ball.  The weights are w_j = psi_j / S
with S = sum_k psi_k; first and second derivatives follow the quotient rule

    grad w_j = (grad psi_j - w_j grad S) / S
    lap  w_j = (lap psi_j - 2 grad w_j . grad S - w_j lap S) / S

so the partition sums to one with vanishing gradient and Laplacian sums by
construction.
"""

from dataclasses import dataclass

import numpy as np

from .errors import CoverageError
from .kernels import Wendland2


@dataclass
class WeightEvaluation:
    """Weights of the patches active at one point (strict containment)."""

    indices: np.ndarray
    values: np.ndarray
    gradients: np.ndarray
    laplacians: np.ndarray


def generator_parts(covering, patch, pts):
    """Generator psi_j with gradient and Laplacian at the given points."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    w2 = Wendland2(1.0 / patch.radius)
    dx = pts - patch.center
    r = np.sqrt(np.einsum("ij,ij->i", dx, dx))
    psi = w2.value(r)
    grad = w2.d_over_r(r)[:, None] * dx
    lap = w2.laplacian(r)
    return psi, grad, lap


def _accumulate_sums(covering, pts, active):
    """S, grad S and lap S at ``pts``; ``active`` is a (n, P) bool mask."""
    n = pts.shape[0]
    s = np.zeros(n)
    s_grad = np.zeros((n, 2))
    s_lap = np.zeros(n)
    parts = []
    for patch in covering.patches:
        idx = np.nonzero(active[:, patch.index])[0]
        if idx.size == 0:
            parts.append((idx, None, None, None))
            continue
        psi, grad, lap = generator_parts(covering, patch, pts[idx])
        s[idx] += psi
        s_grad[idx] += grad
        s_lap[idx] += lap
        parts.append((idx, psi, grad, lap))
    return s, s_grad, s_lap, parts


def weight_table(covering, pts):
    """Per-patch weight columns at ``pts`` for every active (point, patch) pair.

    Returns (table, s) where table[j] is either None (patch j touches none of
    the points) or a dict with keys ``idx`` (indices into pts), ``w``,
    ``grad`` (n_idx, 2) and ``lap``.  Raises CoverageError if some point is
    inside no patch.
    """
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    active = covering.active_mask(pts)
    uncovered = ~active.any(axis=1)
    if uncovered.any():
        k = int(np.nonzero(uncovered)[0][0])
        raise CoverageError(f"point {tuple(pts[k])} lies in no patch")
    s, s_grad, s_lap, parts = _accumulate_sums(covering, pts, active)
    table = []
    for idx, psi, grad, lap in parts:
        if idx.size == 0:
            table.append(None)
            continue
        sj = s[idx]
        w = psi / sj
        w_grad = (grad - w[:, None] * s_grad[idx]) / sj[:, None]
        w_lap = (
            lap - 2.0 * np.einsum("ij,ij->i", w_grad, s_grad[idx]) - w * s_lap[idx]
        ) / sj
        table.append({"idx": idx, "w": w, "grad": w_grad, "lap": w_lap})
    return table, s


def evaluate_weights(x, covering):
    """Weights, gradients and Laplacians of all patches active at ``x``."""
    x = np.asarray(x, dtype=float).reshape(1, 2)
    table, _ = weight_table(covering, x)
    indices, values, grads, laps = [], [], [], []
    for j, col in enumerate(table):
        if col is not None and col["idx"].size:
            indices.append(j)
            values.append(col["w"][0])
            grads.append(col["grad"][0])
            laps.append(col["lap"][0])
    return WeightEvaluation(
        np.asarray(indices, dtype=np.int64),
        np.asarray(values),
        np.asarray(grads),
        np.asarray(laps),
    )


def member_weights(covering, points_all):
    """Weight columns aligned with each patch's member list.

    Unlike :func:`weight_table` this evaluates at the patch members, where
    membership uses distance <= radius; a member exactly on the patch edge
    gets an exact zero weight with zero derivatives.
    """
    points_all = np.asarray(points_all, dtype=float)
    n = points_all.shape[0]
    s = np.zeros(n)
    s_grad = np.zeros((n, 2))
    s_lap = np.zeros(n)
    raw = []
    for patch in covering.patches:
        psi, grad, lap = generator_parts(covering, patch, points_all[patch.members])
        np.add.at(s, patch.members, psi)
        np.add.at(s_grad, patch.members, grad)
        np.add.at(s_lap, patch.members, lap)
        raw.append((psi, grad, lap))
    if not (s > 0.0).all():
        k = int(np.nonzero(~(s > 0.0))[0][0])
        raise CoverageError(f"collocation point {tuple(points_all[k])} lies in no patch")
    columns = []
    for patch, (psi, grad, lap) in zip(covering.patches, raw):
        sj = s[patch.members]
        w = psi / sj
        w_grad = (grad - w[:, None] * s_grad[patch.members]) / sj[:, None]
        w_lap = (
            lap
            - 2.0 * np.einsum("ij,ij->i", w_grad, s_grad[patch.members])
            - w * s_lap[patch.members]
        ) / sj
        columns.append({"w": w, "grad": w_grad, "lap": w_lap})
    return columns
