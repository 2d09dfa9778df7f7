"""L2-orthonormal polynomial basis on the reference triangle.

The basis is the classical warped tensor-product (Koornwinder) family,
orthonormalized for the plain Lebesgue measure on conv{(0,0),(1,0),(0,1)}.
Evaluation never divides by the collapsed coordinate: the Legendre factor
is computed through the scaled three-term recurrence

    R_m(u, t) = t^m P_m(u / t),

which is polynomial in (u, t), so values, gradients and second
derivatives are well defined up to and including the apex.
"""

from functools import lru_cache

import numpy as np
from scipy.special import eval_jacobi


def _scaled_legendre(mmax, u, t):
    """R_m(u,t) = t^m P_m(u/t) and its u/t partials, m = 0..mmax.

    Returns six arrays of shape (mmax+1,) + u.shape: values, d/du, d/dt,
    d2/du2, d2/dudt, d2/dt2.
    """
    shape = (mmax + 1,) + np.shape(u)
    R = np.zeros(shape)
    Ru = np.zeros(shape)
    Rt = np.zeros(shape)
    Ruu = np.zeros(shape)
    Rut = np.zeros(shape)
    Rtt = np.zeros(shape)
    R[0] = 1.0
    if mmax == 0:
        return R, Ru, Rt, Ruu, Rut, Rtt
    R[1] = u
    Ru[1] = 1.0
    tt = t * t
    for m in range(1, mmax):
        c1 = (2 * m + 1) / (m + 1)
        c2 = m / (m + 1)
        R[m + 1] = c1 * u * R[m] - c2 * tt * R[m - 1]
        Ru[m + 1] = c1 * (R[m] + u * Ru[m]) - c2 * tt * Ru[m - 1]
        Rt[m + 1] = c1 * u * Rt[m] - c2 * (2 * t * R[m - 1] + tt * Rt[m - 1])
        Ruu[m + 1] = c1 * (2 * Ru[m] + u * Ruu[m]) - c2 * tt * Ruu[m - 1]
        Rut[m + 1] = (c1 * (Rt[m] + u * Rut[m])
                      - c2 * (2 * t * Ru[m - 1] + tt * Rut[m - 1]))
        Rtt[m + 1] = c1 * u * Rtt[m] - c2 * (
            2.0 * R[m - 1] + 4.0 * t * Rt[m - 1] + tt * Rtt[m - 1])
    return R, Ru, Rt, Ruu, Rut, Rtt


def _jacobi(n, alpha, z):
    return eval_jacobi(n, alpha, 0.0, z)


def _jacobi_d1(n, alpha, z):
    if n == 0:
        return np.zeros_like(z)
    return 0.5 * (n + alpha + 1) * eval_jacobi(n - 1, alpha + 1, 1.0, z)


def _jacobi_d2(n, alpha, z):
    if n < 2:
        return np.zeros_like(z)
    c = 0.25 * (n + alpha + 1) * (n + alpha + 2)
    return c * eval_jacobi(n - 2, alpha + 2, 2.0, z)


class LocalBasis:
    """Orthonormal basis of P_p on the reference triangle.

    Attributes
    ----------
    degree : int
        Polynomial degree p >= 0.
    dim : int
        Number of functions, (p+1)(p+2)/2.
    """

    def __init__(self, degree):
        if degree < 0:
            raise ValueError("degree must be >= 0")
        self.degree = degree
        self.dim = (degree + 1) * (degree + 2) // 2
        # (m, n) pairs ordered by total degree, then by m
        self.index = [(m, d - m) for d in range(degree + 1) for m in range(d + 1)]
        self._scale = np.array(
            [np.sqrt(2.0 * (2 * m + 1) * (m + n + 1)) for m, n in self.index])

    def eval(self, points):
        """Values and gradients at reference points of shape (npts, 2).

        Returns (vals, grads) with shapes (dim, npts) and (dim, npts, 2).
        """
        vals, grads, _ = self._tables(points, hessian=False)
        return vals, grads

    def eval_all(self, points):
        """Like eval but also second derivatives (dim, npts, 3) as xx, xy, yy."""
        return self._tables(points, hessian=True)

    def _tables(self, points, hessian):
        pts = np.asarray(points, dtype=float)
        x = pts[:, 0]
        y = pts[:, 1]
        u = 2.0 * x - 1.0 + y
        t = 1.0 - y
        z = 2.0 * y - 1.0
        R, Ru, Rt, Ruu, Rut, Rtt = _scaled_legendre(self.degree, u, t)
        npts = len(x)
        vals = np.empty((self.dim, npts))
        grads = np.empty((self.dim, npts, 2))
        hess = np.empty((self.dim, npts, 3)) if hessian else None
        for i, (m, n) in enumerate(self.index):
            alpha = 2 * m + 1
            A = R[m]
            Ax = 2.0 * Ru[m]
            Ay = Ru[m] - Rt[m]
            B = _jacobi(n, alpha, z)
            By = 2.0 * _jacobi_d1(n, alpha, z)
            c = self._scale[i]
            vals[i] = c * A * B
            grads[i, :, 0] = c * Ax * B
            grads[i, :, 1] = c * (Ay * B + A * By)
            if hessian:
                Axx = 4.0 * Ruu[m]
                Axy = 2.0 * (Ruu[m] - Rut[m])
                Ayy = Ruu[m] - 2.0 * Rut[m] + Rtt[m]
                Byy = 4.0 * _jacobi_d2(n, alpha, z)
                hess[i, :, 0] = c * Axx * B
                hess[i, :, 1] = c * (Axy * B + Ax * By)
                hess[i, :, 2] = c * (Ayy * B + 2.0 * Ay * By + A * Byy)
        return vals, grads, hess


@lru_cache(maxsize=None)
def basis(degree):
    """Cached LocalBasis of the given degree."""
    return LocalBasis(degree)


def space_dim(degree):
    return (degree + 1) * (degree + 2) // 2
