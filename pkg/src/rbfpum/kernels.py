"""Radial basis kernels with analytic derivatives.

Each kernel is a radial function ``phi(r)`` with a shape parameter
``epsilon``.  Besides the value we expose ``phi'(r)/r`` (the quantity that
multiplies the offset vector in the gradient) and the 2D Laplacian
``phi''(r) + phi'(r)/r``.  Both are implemented with their analytic ``r -> 0``
limits, so no small-radius thresholding is needed anywhere.
"""

import numpy as np


class RadialKernel:
    """Base class: a radial function of ``r = |x - y|`` with shape epsilon."""

    def __init__(self, epsilon):
        epsilon = float(epsilon)
        if not epsilon > 0.0:
            raise ValueError(f"shape parameter must be positive, got {epsilon}")
        self.epsilon = epsilon

    def __repr__(self):
        return f"{type(self).__name__}(epsilon={self.epsilon})"

    def value(self, r):
        raise NotImplementedError

    def d_over_r(self, r):
        """phi'(r) / r, continued analytically to r = 0."""
        raise NotImplementedError

    def laplacian(self, r):
        """2D Laplacian of x -> phi(|x|) evaluated at radius r."""
        raise NotImplementedError

    def gradient(self, dx):
        """Gradient of x -> phi(|x|) at offset(s) ``dx`` with shape (..., 2).

        Uses grad phi = phi'(r)/r * dx, which is finite at dx = 0 because
        phi'(0) = 0 for both kernels here.
        """
        dx = np.asarray(dx, dtype=float)
        r = np.sqrt(np.sum(dx * dx, axis=-1))
        return self.d_over_r(r)[..., None] * dx


class Matern6(RadialKernel):
    """Matern kernel phi(r) = exp(-e r) (e^3 r^3 + 6 e^2 r^2 + 15 e r + 15).

    C6 smooth, globally supported, positive definite in 2D.
    """

    def value(self, r):
        s = self.epsilon * np.asarray(r, dtype=float)
        return np.exp(-s) * (s ** 3 + 6.0 * s ** 2 + 15.0 * s + 15.0)

    def d_over_r(self, r):
        # phi'(r) = -e exp(-s) s (s^2 + 3 s + 3), so phi'(r)/r has limit
        # -3 e^2 at r = 0.
        s = self.epsilon * np.asarray(r, dtype=float)
        return -self.epsilon ** 2 * np.exp(-s) * (s ** 2 + 3.0 * s + 3.0)

    def laplacian(self, r):
        s = self.epsilon * np.asarray(r, dtype=float)
        return self.epsilon ** 2 * np.exp(-s) * (s ** 3 - s ** 2 - 6.0 * s - 6.0)


class Wendland2(RadialKernel):
    """Wendland C2 kernel phi(r) = (1 - e r)_+^4 (4 e r + 1).

    Compactly supported on r <= 1/epsilon; value 1 at the origin and zero,
    with zero first and second derivatives, at the support edge.
    """

    def value(self, r):
        s = self.epsilon * np.asarray(r, dtype=float)
        base = np.maximum(1.0 - s, 0.0)
        return base ** 4 * (4.0 * s + 1.0)

    def d_over_r(self, r):
        # phi'(r) = -20 e s (1 - s)_+^3, so phi'(r)/r = -20 e^2 (1 - s)_+^3.
        s = self.epsilon * np.asarray(r, dtype=float)
        base = np.maximum(1.0 - s, 0.0)
        return -20.0 * self.epsilon ** 2 * base ** 3

    def laplacian(self, r):
        s = self.epsilon * np.asarray(r, dtype=float)
        base = np.maximum(1.0 - s, 0.0)
        return 20.0 * self.epsilon ** 2 * base ** 2 * (5.0 * s - 2.0)


KERNELS = {"matern6": Matern6, "wendland2": Wendland2}


def make_kernel(name, epsilon):
    """Construct a kernel by name ("matern6" or "wendland2")."""
    try:
        cls = KERNELS[name.lower()]
    except KeyError:
        raise ValueError(f"unknown kernel {name!r}, expected one of {sorted(KERNELS)}")
    return cls(epsilon)
