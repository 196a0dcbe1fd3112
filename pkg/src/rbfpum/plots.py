"""Figure rendering for the report path (headless, files only)."""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def points_figure(path, points, tests=None):
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.scatter(points.interior[:, 0], points.interior[:, 1], s=6, c="tab:blue", label="interior")
    ax.scatter(
        points.boundary[:, 0], points.boundary[:, 1], s=10, c="k", marker="s", label="boundary"
    )
    if tests is not None and len(tests):
        ax.scatter(tests[:, 0], tests[:, 1], s=3, c="tab:orange", alpha=0.4, label="test")
    ax.set_xlim(-0.02, 1.02)
    ax.set_ylim(-0.02, 1.02)
    ax.set_aspect("equal")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.legend(loc="upper right", fontsize=8)
    ax.set_title(f"collocation points (N = {points.n_total})")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def solution_figure(path, grid, values):
    n = int(round(np.sqrt(grid.shape[0])))
    xx = grid[:, 0].reshape(n, n)
    yy = grid[:, 1].reshape(n, n)
    zz = values.reshape(n, n)
    fig = plt.figure(figsize=(6, 5))
    ax = fig.add_subplot(projection="3d")
    ax.plot_surface(xx, yy, zz, cmap="viridis", linewidth=0, antialiased=True)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_title("approximant on the evaluation grid")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def history_figure(path, records):
    ks = [rec.k for rec in records]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.semilogy(ks, [rec.mae for rec in records], "o-", label="MAE")
    ax.semilogy(ks, [rec.rmse for rec in records], "s-", label="RMSE")
    ax.set_xlabel("iteration")
    ax.set_ylabel("error")
    ax.legend(loc="upper left", fontsize=8)
    ax2 = ax.twinx()
    ax2.plot(ks, [rec.n_total for rec in records], "k--", alpha=0.6)
    ax2.set_ylabel("N total")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def convergence_figure(path, rows):
    fig, ax = plt.subplots(figsize=(6, 4))
    sides = [row.side for row in rows]
    ax.semilogy(sides, [row.mae for row in rows], "o-", label="MAE")
    ax.semilogy(sides, [row.rmse for row in rows], "s-", label="RMSE")
    ax.set_xlabel("grid side")
    ax.set_ylabel("error")
    ax.legend(fontsize=8)
    ax.set_title("fixed-grid convergence")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
