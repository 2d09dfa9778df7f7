"""Error and stability norms for discrete and manufactured fields.

The experiment norm is ||v||_{H;T} = ||k v|| + ||grad_T v||, a sum of
the two L2 quantities, not a square root of a sum.  The mesh-dependent
dG norm of a discrete field is

    ||v||_dG^2 = ||grad_T v||^2
               + ||sqrt(beta h/p) [[grad_T v]]_N||^2   (interior skeleton)
               + ||sqrt(alpha p^2/h) [[v]]||^2         (interior skeleton)
               + ||sqrt(delta h/p) dn v||^2            (boundary)
               + ||sqrt(k (1 - delta k h/p)) v||^2     (boundary)
               + ||k v||^2

and the dG+ norm adds ||(alpha p^2/h)^(-1/2) {grad_T v}||^2 on the
interior skeleton.  The boundary mass weight k(1 - delta k h/p) turns
negative exactly when the solvability margin fails, in which case the
norm is not a norm; the result then carries defined=False and a nan
value instead of raising, so histories can still be recorded.
"""

from dataclasses import dataclass

import numpy as np

from .assemble import _group_rows, _trace_tables
from .basis import basis
from .problem import edge_data_orders, element_data_orders
from .quadrature import edge_rule, triangle_rule

__all__ = ["HtError", "DgNorm", "ht_error", "ht_norm", "dg_norm"]


@dataclass
class HtError:
    absolute: float
    relative: float
    exact_norm: float


@dataclass
class DgNorm:
    value: float
    defined: bool


def _element_groups(sol, prob, quad_order):
    mesh, degrees = sol.mesh, sol.degrees
    orders = element_data_orders(prob, mesh, degrees, quad_order)
    kconst = prob.constant_k
    for (pk, order), elems in _group_rows(degrees.degrees, orders):
        rule = triangle_rule(int(order))
        vals, grads = basis(int(pk)).eval(rule.points)
        pts = mesh.map_to_physical(elems, rule.points)
        x, y = pts[..., 0], pts[..., 1]
        kk = (np.full(x.shape, kconst) if kconst is not None
              else prob.k_at(x, y))
        C = np.stack([sol.local(el) for el in elems])
        uT = np.einsum("en,nq->eq", C, vals)
        gp = np.einsum("ecd,nqc->enqd", mesh.inv_jac[elems], grads)
        gT = np.einsum("en,enqd->eqd", C, gp)
        yield elems, rule.weights, mesh.det[elems], x, y, kk, uT, gT


def ht_error(sol, exact, prob=None, quad_order=None):
    """||u - u_T||_{H;T} against a manufactured solution, with the
    relative value scaled by ||u||_{H;T}."""
    prob = sol.problem if prob is None else prob
    k2_err = g2_err = k2_ex = g2_ex = 0.0
    for elems, w, det, x, y, kk, uT, gT in _element_groups(
            sol, prob, quad_order):
        ue = np.broadcast_to(np.asarray(exact.u(x, y), dtype=complex),
                             x.shape)
        ge = np.asarray(exact.grad(x, y), dtype=complex)
        k2_err += float(np.einsum(
            "eq,q,e->", np.abs(kk * (ue - uT)) ** 2, w, det))
        g2_err += float(np.einsum(
            "eqd,q,e->", np.abs(ge - gT) ** 2, w, det))
        k2_ex += float(np.einsum("eq,q,e->", np.abs(kk * ue) ** 2, w, det))
        g2_ex += float(np.einsum("eqd,q,e->", np.abs(ge) ** 2, w, det))
    absolute = np.sqrt(k2_err) + np.sqrt(g2_err)
    exact_norm = np.sqrt(k2_ex) + np.sqrt(g2_ex)
    relative = absolute / exact_norm if exact_norm > 0 else np.inf
    return HtError(absolute=float(absolute), relative=float(relative),
                   exact_norm=float(exact_norm))


def ht_norm(sol, prob=None, quad_order=None):
    """||k u_T|| + ||grad_T u_T|| of a discrete field."""
    prob = sol.problem if prob is None else prob
    k2 = g2 = 0.0
    for elems, w, det, x, y, kk, uT, gT in _element_groups(
            sol, prob, quad_order):
        k2 += float(np.einsum("eq,q,e->", np.abs(kk * uT) ** 2, w, det))
        g2 += float(np.einsum("eqd,q,e->", np.abs(gT) ** 2, w, det))
    return float(np.sqrt(k2) + np.sqrt(g2))


def dg_norm(sol, prob=None, plus=False, quad_order=None):
    """Mesh-dependent dG norm of a discrete field; see module docstring."""
    prob = sol.problem if prob is None else prob
    mesh, degrees = sol.mesh, sol.degrees
    p = degrees.degrees
    total = 0.0
    for elems, w, det, x, y, kk, uT, gT in _element_groups(
            sol, prob, quad_order):
        total += float(np.einsum("eq,q,e->", np.abs(kk * uT) ** 2, w, det))
        total += float(np.einsum("eqd,q,e->", np.abs(gT) ** 2, w, det))

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
            g0 = np.einsum("en,ecd,nqc->eqd", C0, mesh.inv_jac[e0], G0)
            g1 = np.einsum("en,ecd,nqc->eqd", C1, mesh.inv_jac[e1], G1)
            dn0 = np.einsum("eqd,ed->eq", g0, nrm)
            dn1 = np.einsum("eqd,ed->eq", g1, nrm)
            gj2 = he * np.einsum("eq,q->e", np.abs(dn0 - dn1) ** 2, w)
            vj2 = he * np.einsum("eq,q->e", np.abs(v0 - v1) ** 2, w)
            total += float(np.sum(prob.beta * (he / pe) * gj2))
            total += float(np.sum(prob.alpha * (pe * pe / he) * vj2))
            if plus:
                mean2 = he * np.einsum(
                    "eqd,q->e", np.abs(0.5 * (g0 + g1)) ** 2, w)
                total += float(np.sum(
                    (he / (prob.alpha * pe * pe)) * mean2))

    defined = True
    be = mesh.boundary_edges
    if len(be):
        t0 = mesh.edge_tris[be, 0]
        d_edge = edge_data_orders(prob, mesh, degrees, quad_order)
        kconst = prob.constant_k
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
            kk = (np.full(pts.shape[:2], kconst) if kconst is not None
                  else prob.k_at(pts[..., 0], pts[..., 1]))
            C0 = np.stack([sol.local(el) for el in e0])
            v0 = np.einsum("en,nq->eq", C0, V0)
            dn0 = np.einsum("en,ecd,nqc,ed->eq", C0, mesh.inv_jac[e0],
                            G0, nrm)
            total += float(np.sum(
                prob.delta * (he / p0) * he
                * np.einsum("eq,q->e", np.abs(dn0) ** 2, w)))
            wgt = kk * (1.0 - prob.delta * kk * (he / p0)[:, None])
            if wgt.min() < 0.0:
                defined = False
            total += float(np.sum(
                he * np.einsum("eq,q->e", wgt * np.abs(v0) ** 2, w)))
    if not defined:
        return DgNorm(value=float("nan"), defined=False)
    return DgNorm(value=float(np.sqrt(total)), defined=True)
