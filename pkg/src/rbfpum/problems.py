"""Dirichlet Poisson test problems -lap u = f on (0,1)^2 with known solutions."""

from dataclasses import dataclass, field
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class PoissonProblem:
    """A Poisson problem with exact solution, source f = -lap u and trace g."""

    name: str
    exact: Callable
    source: Callable
    dirichlet: Callable = field(default=None)

    def __post_init__(self):
        if self.dirichlet is None:
            object.__setattr__(self, "dirichlet", self.exact)


def _split(pts):
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    return pts[:, 0], pts[:, 1]


def _u1_exact(pts):
    x, y = _split(pts)
    return 0.05 * np.exp(4.0 * x) * np.cos(2.0 * x + y)


def _u1_source(pts):
    x, y = _split(pts)
    theta = 2.0 * x + y
    return 0.05 * np.exp(4.0 * x) * (16.0 * np.sin(theta) - 11.0 * np.cos(theta))


def _u2_exact(pts):
    x, y = _split(pts)
    q = 4.0 * x * x + y * y - 1.0
    return 0.5 * y * np.cos(q) ** 4 + 0.25 * x


def _u2_source(pts):
    x, y = _split(pts)
    q = 4.0 * x * x + y * y - 1.0
    c, s = np.cos(q), np.sin(q)
    return 28.0 * y * c ** 3 * s + 8.0 * y * (16.0 * x * x + y * y) * (
        c ** 4 - 3.0 * c ** 2 * s ** 2
    )


PROBLEMS = {
    "u1": PoissonProblem("u1", _u1_exact, _u1_source),
    "u2": PoissonProblem("u2", _u2_exact, _u2_source),
}


def make_problem(name):
    """Look up a built-in problem by name ("u1" or "u2")."""
    try:
        return PROBLEMS[name.lower()]
    except KeyError:
        raise ValueError(f"unknown problem {name!r}, expected one of {sorted(PROBLEMS)}")
