"""Residual a posteriori error estimators and data oscillations.

Per element K with width h_K and degree p_K, for a discrete solution v:

    eta_R_K = (h_K/p_K) ||lap v + k^2 v + f||_K
    eta_E_K = { 1/2 ||sqrt(beta h_e/p_e) [[grad v]]_N||^2 over interior
                edges of K
              + ||sqrt(h_e) (g - dn v - i k v)||^2 over boundary edges
              }^(1/2)
    eta_J_K = (1/sqrt 2) ||sqrt(alpha p_e^2/h_e) [[v]]||  (interior edges)
    eta_K^2 = eta_R_K^2 + eta_E_K^2 + eta_J_K^2

Interior edges are shared, so each contributes half of its squared
integral to both neighbors and exactly once to the global square sum.
The boundary weight is sqrt(h_e), deliberately without a 1/p factor.

The practical estimator drops the jump term and scales the interior
gradient-jump part by the element degree:

    check_eta_K^2 = eta_R_K^2
                  + (p_K/2) ||sqrt(beta h_e/p_e) [[grad v]]_N||^2
                  + ||sqrt(h_e) (g - (dn + ik) v)||^2

so for p = 1 it coincides with eta_R^2 + eta_E^2.  Data oscillations
measure the distance of f and g to elementwise and edgewise L2
projections of matching degree,

    osc_K^2 = ||(h_K/p_K)(f - f_T)||_K^2 + ||sqrt(h_e)(g - g_e)||^2,

and the modified estimator tilde-eta repeats eta with the projected
data.  Global values are root sums of squares over all elements.
"""

from dataclasses import dataclass

import numpy as np

from .assemble import _group_rows, _trace_tables, dof_layout
from .basis import basis
from .mesh import mesh_data
from .problem import edge_data_orders, element_data_orders
from .quadrature import edge_rule, triangle_rule

__all__ = [
    "EstimatorReport", "estimate", "internal_residual", "edge_residual",
    "trace_residual", "practical_estimator", "oscillations",
    "modified_estimator", "project_element_data", "project_edge_data",
    "write_estimator_csv",
]


@dataclass
class EstimatorReport:
    """Per-element estimator components and their global aggregates.

    All arrays have one entry per element and hold nonnegative finite
    reals.  eta is the full estimator, eta_check the practical one used
    for marking, eta_mod the full estimator with projected data, osc the
    data oscillations.  singular flags elements whose closure touches a
    declared singular point of f; their volume terms are quadrature
    values of non-convergent integrals and should be read with care.
    """

    eta_r: np.ndarray
    eta_e: np.ndarray
    eta_j: np.ndarray
    eta: np.ndarray
    eta_check: np.ndarray
    eta_r_mod: np.ndarray
    eta_e_mod: np.ndarray
    eta_mod: np.ndarray
    osc: np.ndarray
    singular: np.ndarray
    kh_over_p: float

    def _rss(self, a):
        return float(np.sqrt(np.sum(np.square(a))))

    @property
    def eta_global(self):
        return self._rss(self.eta)

    @property
    def eta_check_global(self):
        return self._rss(self.eta_check)

    @property
    def eta_mod_global(self):
        return self._rss(self.eta_mod)

    @property
    def osc_global(self):
        return self._rss(self.osc)


def _legendre_table(p, t):
    """Orthonormal Legendre values on [0, 1]: (p+1, len(t))."""
    tt = 2.0 * np.asarray(t) - 1.0
    out = np.empty((p + 1, len(tt)))
    out[0] = 1.0
    if p >= 1:
        out[1] = tt
    for m in range(1, p):
        out[m + 1] = ((2 * m + 1) * tt * out[m] - m * out[m - 1]) / (m + 1)
    return out * np.sqrt(2.0 * np.arange(p + 1) + 1.0)[:, None]


def project_element_data(prob, mesh, degrees, quad_order=None, p_override=None):
    """Elementwise L2 projection of f onto local polynomials.

    Returns (coeffs list, orders): coefficients of f in each element's
    orthonormal reference basis at degree p_K (or p_override), computed
    with the data quadrature.  Exposed separately so degree-0 plateaus
    can be inspected even though assembled problems require p >= 1.
    """
    orders = element_data_orders(prob, mesh, degrees, quad_order)
    p = (degrees.degrees if p_override is None
         else np.full(mesh.n_triangles, p_override, dtype=np.int64))
    coeffs = [None] * mesh.n_triangles
    for (pk, order), elems in _group_rows(p, orders):
        rule = triangle_rule(int(order))
        vals, _ = basis(int(pk)).eval(rule.points)
        pts = mesh.map_to_physical(elems, rule.points)
        fv = np.asarray(prob.f(pts[..., 0], pts[..., 1]), dtype=complex)
        fv = np.broadcast_to(fv, pts.shape[:2])
        block = np.einsum("eq,nq,q->en", fv, vals, rule.weights)
        for row, el in enumerate(elems):
            coeffs[el] = block[row]
    return coeffs, orders


def project_edge_data(prob, mesh, degrees, quad_order=None):
    """Edgewise L2 projection of g on boundary edges.

    Returns (coeffs list indexed by edge id, orders); entries for
    interior edges stay None.
    """
    orders = edge_data_orders(prob, mesh, degrees, quad_order)
    p_edge = degrees.edge_degrees(mesh)
    coeffs = [None] * mesh.n_edges
    be = mesh.boundary_edges
    for (pe, order), rows in _group_rows(p_edge[be], orders[be]):
        edges = be[rows]
        rule = edge_rule(int(order))
        leg = _legendre_table(int(pe), rule.points)
        a = mesh.vertices[mesh.edges[edges, 0]]
        b = mesh.vertices[mesh.edges[edges, 1]]
        pts = a[:, None, :] + rule.points[None, :, None] * (b - a)[:, None, :]
        nrm = mesh.edge_normal[edges]
        gv = np.asarray(
            prob.g(pts[..., 0], pts[..., 1], nrm[:, None, 0],
                   nrm[:, None, 1]), dtype=complex)
        gv = np.broadcast_to(gv, pts.shape[:2])
        block = np.einsum("eq,nq,q->en", gv, leg, rule.weights)
        for row, e in enumerate(edges):
            coeffs[e] = block[row]
    return coeffs, orders


def estimate(sol, prob=None, quad_order=None):
    """Full estimator report for a discrete solution."""
    prob = sol.problem if prob is None else prob
    if prob is None:
        raise ValueError("no problem data attached to the solution")
    mesh = sol.mesh
    degrees = sol.degrees
    p = degrees.degrees
    nt = mesh.n_triangles

    r2 = np.zeros(nt)          # squared volume residuals
    r2_mod = np.zeros(nt)
    osc2 = np.zeros(nt)
    e2_int = np.zeros(nt)      # interior part of eta_E squared, half per side
    e2_bnd = np.zeros(nt)
    e2_bnd_mod = np.zeros(nt)
    check_int = np.zeros(nt)   # practical interior part
    j2 = np.zeros(nt)
    hp = mesh.diameter / np.maximum(p, 1)

    d_elem = element_data_orders(prob, mesh, degrees, quad_order)
    d_edge = edge_data_orders(prob, mesh, degrees, quad_order)
    kconst = prob.constant_k

    for (pk, order), elems in _group_rows(p, d_elem):
        rule = triangle_rule(int(order))
        vals, _, hess = basis(int(pk)).eval_all(rule.points)
        pts = mesh.map_to_physical(elems, rule.points)
        x, y = pts[..., 0], pts[..., 1]
        kk = (np.full(x.shape, kconst) if kconst is not None
              else prob.k_at(x, y))
        fv = np.broadcast_to(
            np.asarray(prob.f(x, y), dtype=complex), x.shape)
        C = np.stack([sol.local(el) for el in elems])
        mmt = np.einsum("ecd,efd->ecf", mesh.inv_jac[elems],
                        mesh.inv_jac[elems])
        hterm = (mmt[:, None, None, 0, 0] * hess[None, :, :, 0]
                 + 2.0 * mmt[:, None, None, 0, 1] * hess[None, :, :, 1]
                 + mmt[:, None, None, 1, 1] * hess[None, :, :, 2])
        lap = np.einsum("en,enq->eq", C, hterm)
        vv = np.einsum("en,nq->eq", C, vals)
        resid = lap + kk * kk * vv
        fproj = np.einsum("eq,nq,q->en", fv, vals, rule.weights)
        fpv = np.einsum("en,nq->eq", fproj, vals)
        det = mesh.det[elems]
        w = rule.weights
        r2[elems] = det * np.einsum(
            "eq,q->e", np.abs(resid + fv) ** 2, w) * hp[elems] ** 2
        r2_mod[elems] = det * np.einsum(
            "eq,q->e", np.abs(resid + fpv) ** 2, w) * hp[elems] ** 2
        osc2[elems] = det * np.einsum(
            "eq,q->e", np.abs(fv - fpv) ** 2, w) * hp[elems] ** 2

    ie = mesh.interior_edges
    if len(ie):
        t0 = mesh.edge_tris[ie, 0]
        t1 = mesh.edge_tris[ie, 1]
        keys = (p[t0], p[t1], mesh.edge_loc[ie, 0], mesh.edge_flip[ie, 0],
                mesh.edge_loc[ie, 1], mesh.edge_flip[ie, 1])
        for (p0, p1, l0, f0, l1, f1), rows in _group_rows(*keys):
            order = 2 * max(int(p0), int(p1)) + 2
            rule = edge_rule(order)
            w = rule.weights
            V0, G0 = _trace_tables(int(p0), int(l0), bool(f0), order)
            V1, G1 = _trace_tables(int(p1), int(l1), bool(f1), order)
            e = ie[rows]
            e0, e1 = t0[rows], t1[rows]
            nrm = mesh.edge_normal[e]
            he = mesh.edge_length[e]
            pe = float(min(p0, p1))
            C0 = np.stack([sol.local(el) for el in e0])
            C1 = np.stack([sol.local(el) for el in e1])
            v0 = np.einsum("en,nq->eq", C0, V0)
            v1 = np.einsum("en,nq->eq", C1, V1)
            ng0 = np.einsum("ecd,nqc,ed->enq", mesh.inv_jac[e0], G0, nrm)
            ng1 = np.einsum("ecd,nqc,ed->enq", mesh.inv_jac[e1], G1, nrm)
            dn0 = np.einsum("en,enq->eq", C0, ng0)
            dn1 = np.einsum("en,enq->eq", C1, ng1)
            gjump2 = he * np.einsum("eq,q->e", np.abs(dn0 - dn1) ** 2, w)
            vjump2 = he * np.einsum("eq,q->e", np.abs(v0 - v1) ** 2, w)
            wgt = prob.beta * he / pe
            for et in (e0, e1):
                np.add.at(e2_int, et, 0.5 * wgt * gjump2)
                np.add.at(check_int, et, 0.5 * p[et] * wgt * gjump2)
                np.add.at(j2, et,
                          0.5 * (prob.alpha * pe * pe / he) * vjump2)

    g_proj, _ = project_edge_data(prob, mesh, degrees, quad_order)
    be = mesh.boundary_edges
    if len(be):
        t0 = mesh.edge_tris[be, 0]
        keys = (p[t0], mesh.edge_loc[be, 0], mesh.edge_flip[be, 0],
                d_edge[be])
        for (p0, l0, f0, order), rows in _group_rows(*keys):
            e = be[rows]
            rule = edge_rule(int(order))
            w = rule.weights
            V0, G0 = _trace_tables(int(p0), int(l0), bool(f0), int(order))
            e0 = t0[rows]
            nrm = mesh.edge_normal[e]
            he = mesh.edge_length[e]
            a = mesh.vertices[mesh.edges[e, 0]]
            b = mesh.vertices[mesh.edges[e, 1]]
            pts = (a[:, None, :]
                   + rule.points[None, :, None] * (b - a)[:, None, :])
            x, y = pts[..., 0], pts[..., 1]
            kk = (np.full(x.shape, kconst) if kconst is not None
                  else prob.k_at(x, y))
            gv = np.broadcast_to(np.asarray(
                prob.g(x, y, nrm[:, None, 0], nrm[:, None, 1]),
                dtype=complex), x.shape)
            leg = _legendre_table(int(p0), rule.points)
            gpv = np.einsum("en,nq->eq", np.stack([g_proj[ed] for ed in e]),
                            leg)
            C0 = np.stack([sol.local(el) for el in e0])
            v0 = np.einsum("en,nq->eq", C0, V0)
            dn0 = np.einsum("en,enq->eq",
                            C0, np.einsum("ecd,nqc,ed->enq",
                                          mesh.inv_jac[e0], G0, nrm))
            trace = dn0 + 1j * kk * v0
            b2 = he * he * np.einsum("eq,q->e", np.abs(gv - trace) ** 2, w)
            b2_mod = he * he * np.einsum(
                "eq,q->e", np.abs(gpv - trace) ** 2, w)
            gosc2 = he * he * np.einsum("eq,q->e", np.abs(gv - gpv) ** 2, w)
            np.add.at(e2_bnd, e0, b2)
            np.add.at(e2_bnd_mod, e0, b2_mod)
            np.add.at(osc2, e0, gosc2)

    eta_r = np.sqrt(r2)
    eta_e = np.sqrt(e2_int + e2_bnd)
    eta_j = np.sqrt(j2)
    eta = np.sqrt(r2 + e2_int + e2_bnd + j2)
    eta_check = np.sqrt(r2 + check_int + e2_bnd)
    eta_r_mod = np.sqrt(r2_mod)
    eta_e_mod = np.sqrt(e2_int + e2_bnd_mod)
    eta_mod = np.sqrt(r2_mod + e2_int + e2_bnd_mod + j2)

    singular = np.zeros(nt, dtype=bool)
    if prob.singular_points:
        a = mesh.vertices[mesh.triangles[:, 0]]
        b = mesh.vertices[mesh.triangles[:, 1]]
        c = mesh.vertices[mesh.triangles[:, 2]]
        det = ((b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1])
               - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0]))
        # a point lies in the closure iff all barycentric weights are >= 0
        for sx, sy in prob.singular_points:
            l1 = ((sx - a[:, 0]) * (c[:, 1] - a[:, 1])
                  - (sy - a[:, 1]) * (c[:, 0] - a[:, 0])) / det
            l2 = ((b[:, 0] - a[:, 0]) * (sy - a[:, 1])
                  - (b[:, 1] - a[:, 1]) * (sx - a[:, 0])) / det
            singular |= ((l1 >= -1e-12) & (l2 >= -1e-12)
                         & (l1 + l2 <= 1.0 + 1e-12))

    return EstimatorReport(
        eta_r=eta_r, eta_e=eta_e, eta_j=eta_j, eta=eta,
        eta_check=eta_check, eta_r_mod=eta_r_mod, eta_e_mod=eta_e_mod,
        eta_mod=eta_mod, osc=np.sqrt(osc2), singular=singular,
        kh_over_p=mesh_data(mesh, degrees, prob.k).kh_over_p)


def internal_residual(sol, element, prob=None, quad_order=None):
    """(h_K/p_K) ||lap v + k^2 v + f|| on one element."""
    return float(estimate(sol, prob, quad_order).eta_r[element])


def edge_residual(sol, element, prob=None, quad_order=None):
    """Gradient-jump and boundary-misfit residual of one element."""
    return float(estimate(sol, prob, quad_order).eta_e[element])


def trace_residual(sol, element, prob=None, quad_order=None):
    """Solution-jump residual of one element."""
    return float(estimate(sol, prob, quad_order).eta_j[element])


def practical_estimator(sol, element, prob=None, quad_order=None):
    """The marking quantity check_eta for one element."""
    return float(estimate(sol, prob, quad_order).eta_check[element])


def oscillations(prob, mesh, degrees, element, quad_order=None):
    """osc_K for one element (volume f part plus its boundary edges)."""
    from .solution import DgSolution
    layout = dof_layout(degrees)
    zero = DgSolution(coeffs=np.zeros(layout.total, dtype=complex),
                      mesh=mesh, degrees=degrees, layout=layout,
                      problem=prob)
    return float(estimate(zero, prob, quad_order).osc[element])


def modified_estimator(sol, prob=None, quad_order=None):
    """Report whose tilde-eta fields repeat eta with projected data."""
    return estimate(sol, prob, quad_order)


def write_estimator_csv(report, path):
    """One row per element: id and the six local quantities."""
    with open(path, "w") as fh:
        fh.write("element,eta_r,eta_e,eta_j,eta,eta_check,osc\n")
        for i in range(len(report.eta)):
            fh.write(f"{i},{report.eta_r[i]:.12g},{report.eta_e[i]:.12g},"
                     f"{report.eta_j[i]:.12g},{report.eta[i]:.12g},"
                     f"{report.eta_check[i]:.12g},{report.osc[i]:.12g}\n")
