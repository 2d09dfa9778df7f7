"""Quadrature rules on the reference triangle and the unit interval.

Triangle rules are collapsed tensor products: Gauss-Legendre in the first
direction and Gauss-Jacobi (weight 1-b) in the second, mapped from the
square onto conv{(0,0),(1,0),(0,1)}.  This gives interior points and
positive weights for any requested polynomial exactness, which matters
because data integrals may need very high order on coarse meshes.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi

#: largest polynomial exactness served before UnsupportedDegreeError
MAX_DEGREE = 500


class UnsupportedDegreeError(Exception):
    """Requested exactness outside the supported range."""


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights with a guaranteed polynomial exactness."""

    points: np.ndarray
    weights: np.ndarray
    exactness: int


def _check_degree(exactness):
    if exactness < 0 or exactness > MAX_DEGREE:
        raise UnsupportedDegreeError(
            f"exactness {exactness} outside [0, {MAX_DEGREE}]")


def _freeze(a):
    a.flags.writeable = False
    return a


@lru_cache(maxsize=None)
def triangle_rule(exactness):
    """Rule on the reference triangle exact for total degree <= exactness.

    Returns a QuadratureRule with points (n, 2) strictly inside the
    triangle and positive weights summing to the reference area 1/2.
    """
    _check_degree(exactness)
    n = exactness // 2 + 1
    a, wa = np.polynomial.legendre.leggauss(n)
    b, wb = roots_jacobi(n, 1.0, 0.0)
    A, B = np.meshgrid(a, b, indexing="ij")
    x = (1.0 + A) * (1.0 - B) / 4.0
    y = (1.0 + B) / 2.0
    w = np.outer(wa, wb) / 8.0
    pts = np.column_stack([x.ravel(), y.ravel()])
    return QuadratureRule(_freeze(pts), _freeze(w.ravel()), exactness)


@lru_cache(maxsize=None)
def edge_rule(exactness):
    """Gauss-Legendre rule on [0, 1] exact for degree <= exactness."""
    _check_degree(exactness)
    n = exactness // 2 + 1
    t, w = np.polynomial.legendre.leggauss(n)
    return QuadratureRule(_freeze((t + 1.0) / 2.0), _freeze(w / 2.0), exactness)
