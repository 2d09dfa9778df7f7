"""Elementwise polynomial fields: evaluation, edge traces, projection.

A DgSolution is a flat complex coefficient vector over per-element
orthonormal bases.  All evaluators take reference coordinates (or an
edge parameter t in [0, 1] running along the sorted global edge
direction) and return physical-frame quantities; jump orientation is
side 0 minus side 1, i.e. from the lower-indexed adjacent element.
"""

from dataclasses import dataclass

import numpy as np

from .basis import basis
from .mesh import edge_reference_points
from .quadrature import triangle_rule


@dataclass
class DgSolution:
    coeffs: np.ndarray
    mesh: object
    degrees: object
    layout: object
    problem: object = None

    def local(self, k):
        """Coefficient block of element k."""
        return self.coeffs[self.layout.block(k)]

    def value(self, k, ref_pts):
        vals, _ = basis(int(self.degrees.degrees[k])).eval(ref_pts)
        return self.local(k) @ vals

    def gradient(self, k, ref_pts):
        """Physical gradient, shape (npts, 2)."""
        _, grads = basis(int(self.degrees.degrees[k])).eval(ref_pts)
        ref = np.einsum("n,nqd->qd", self.local(k), grads)
        return ref @ self.mesh.inv_jac[k]

    def laplacian(self, k, ref_pts):
        """Physical Laplacian from exact second derivatives."""
        _, _, hess = basis(int(self.degrees.degrees[k])).eval_all(ref_pts)
        h = np.einsum("n,nqc->qc", self.local(k), hess)  # (npts, [xx, xy, yy])
        M = self.mesh.inv_jac[k]
        mmt = M @ M.T
        return mmt[0, 0] * h[:, 0] + 2.0 * mmt[0, 1] * h[:, 1] \
            + mmt[1, 1] * h[:, 2]

    # ---- edge quantities --------------------------------------------

    def _side(self, e, side, t):
        k = int(self.mesh.edge_tris[e, side])
        if k < 0:
            raise ValueError(f"edge {e} has no side {side}")
        loc = int(self.mesh.edge_loc[e, side])
        flip = bool(self.mesh.edge_flip[e, side])
        ref = edge_reference_points(loc, flip, t)
        return k, ref

    def edge_value(self, e, side, t):
        k, ref = self._side(e, side, t)
        return self.value(k, ref)

    def edge_gradient(self, e, side, t):
        k, ref = self._side(e, side, t)
        return self.gradient(k, ref)

    def edge_jump(self, e, t):
        """Scalar jump across an interior edge (side 0 minus side 1)."""
        return self.edge_value(e, 0, t) - self.edge_value(e, 1, t)

    def edge_mean(self, e, t):
        return 0.5 * (self.edge_value(e, 0, t) + self.edge_value(e, 1, t))

    def edge_normal_grad(self, e, side, t):
        n = self.mesh.edge_normal[e]
        return self.edge_gradient(e, side, t) @ n

    def edge_normal_grad_jump(self, e, t):
        """Jump of the normal derivative across an interior edge."""
        return self.edge_normal_grad(e, 0, t) - self.edge_normal_grad(e, 1, t)

    def edge_mean_grad(self, e, t):
        return 0.5 * (self.edge_gradient(e, 0, t)
                      + self.edge_gradient(e, 1, t))


def project(mesh, degrees, fun, problem=None, quad_order=None):
    """Elementwise L2 projection of a callable onto the dG space.

    The local Gram systems are solved at the data quadrature order (the
    reference Gram is identity up to roundoff for the orthonormal basis,
    but the solve keeps the projection exact whatever the basis).
    """
    from .assemble import dof_layout
    from .problem import element_data_orders

    layout = dof_layout(degrees)
    coeffs = np.zeros(layout.total, dtype=complex)
    p = degrees.degrees
    if problem is not None:
        orders = element_data_orders(problem, mesh, degrees, quad_order)
    elif quad_order is not None:
        orders = np.maximum(2 * p + 2, int(quad_order))
    else:
        orders = 2 * p + 4
        orders = np.broadcast_to(orders, p.shape)
    for k in range(mesh.n_triangles):
        pk = int(p[k])
        rule = triangle_rule(int(orders[k]))
        vals, _ = basis(pk).eval(rule.points)
        pts = mesh.map_to_physical([k], rule.points)[0]
        fv = np.asarray(fun(pts[:, 0], pts[:, 1]), dtype=complex)
        fv = np.broadcast_to(fv, (len(rule.points),))
        gram = (vals * rule.weights) @ vals.T
        moments = (vals * rule.weights) @ fv
        coeffs[layout.block(k)] = np.linalg.solve(gram, moments)
    return DgSolution(coeffs, mesh, degrees, layout, problem)
