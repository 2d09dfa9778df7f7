"""Assembly of the dG system for the Helmholtz Robin problem.

The variational form acts on elementwise polynomials.  With (u, v)
denoting integrals of u times conj(v), jumps [[.]] oriented from the
lower-indexed element, means {.} arithmetic averages, n the unit normal
(outward on the boundary), h/p the local edge or element width and
degree, and alpha/beta/delta the penalty constants, the form is

    a(u,v) = (grad u, grad v) - (k^2 u, v)
           - ([[u]] n, {grad v})_I - ({grad u}, [[v]] n)_I
           - (delta (k h/p) u, dn v)_B - (delta (k h/p) dn u, v)_B
           + i (beta (h/p) [[dn u]], [[dn v]])_I
           + i (delta (h/p) dn u, dn v)_B
           + i (alpha (p^2/h) [[u]], [[v]])_I
           + i (k (1 - delta k h/p) u, v)_B

with _I running over interior edges (each counted once) and _B over the
boundary, and the load functional is

    F(v) = (f, v) + i (delta (h/p) g, dn v)_B + ((1 - delta k h/p) g, v)_B.

Rows of the assembled matrix are test functions: A[i, j] = a(phi_j,
phi_i).  The basis is real, so conjugation only touches the complex
weights written above.

Discrete integrands use rules exact to 2p+2; anything involving problem
data (f, g, variable k, analytic solutions) uses the elevated data
order from the problem module.  Assembly is single-threaded and runs in
a fixed element/edge order, so results are bit-reproducible.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .basis import basis, space_dim
from .mesh import edge_reference_points
from .problem import edge_data_orders, element_data_orders
from .quadrature import edge_rule, triangle_rule

#: below this many DOFs the solve falls back to a dense factorization
DENSE_CUTOFF = 400


class AssemblyError(Exception):
    pass


class SingularSystemError(Exception):
    pass


class ResidualTooLargeError(Exception):
    pass


@dataclass
class DofLayout:
    """Contiguous per-element coefficient blocks."""

    offsets: np.ndarray
    sizes: np.ndarray
    total: int

    def block(self, k):
        return slice(self.offsets[k], self.offsets[k] + self.sizes[k])


def dof_layout(degrees):
    sizes = (degrees.degrees + 1) * (degrees.degrees + 2) // 2
    offsets = np.r_[0, np.cumsum(sizes)[:-1]]
    return DofLayout(offsets=offsets, sizes=sizes, total=int(sizes.sum()))


@dataclass
class DgSystem:
    matrix: sp.csr_matrix
    rhs: np.ndarray
    layout: DofLayout
    mesh: object
    degrees: object
    problem: object


def _group_rows(*cols):
    """Indices grouped by identical key tuples, in sorted key order."""
    arr = np.stack([np.asarray(c) for c in cols], axis=1)
    uniq, inv = np.unique(arr, axis=0, return_inverse=True)
    return [(tuple(int(v) for v in u), np.flatnonzero(inv == i))
            for i, u in enumerate(uniq)]


def _trace_tables(p, loc, flip, order, _cache={}):
    """Basis values/reference gradients along a local edge, cached."""
    key = (p, loc, flip, order)
    hit = _cache.get(key)
    if hit is None:
        rule = edge_rule(order)
        pts = edge_reference_points(loc, flip, rule.points)
        hit = basis(p).eval(pts)
        _cache[key] = hit
    return hit


class _Triplets:
    def __init__(self):
        self.rows = []
        self.cols = []
        self.vals = []

    def add(self, row_off, col_off, block):
        """row_off, col_off: (ne,) offsets; block: (ne, ni, nj)."""
        ne, ni, nj = block.shape
        r = row_off[:, None, None] + np.arange(ni)[None, :, None]
        c = col_off[:, None, None] + np.arange(nj)[None, None, :]
        self.rows.append(np.broadcast_to(r, block.shape).ravel())
        self.cols.append(np.broadcast_to(c, block.shape).ravel())
        self.vals.append(block.ravel())

    def matrix(self, n):
        rows = np.concatenate(self.rows)
        cols = np.concatenate(self.cols)
        vals = np.concatenate([v.astype(complex) for v in self.vals])
        return sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()


def assemble(prob, mesh, degrees, quad_order=None):
    """Build the dG matrix and right-hand side.

    quad_order overrides the data-order policy (never dropping below the
    2p+2 needed for the discrete terms); the discrete stiffness, mass
    and penalty integrals keep their exact rules either way.
    """
    if degrees.min_degree < 1:
        raise AssemblyError("problem-level degrees must satisfy p >= 1")
    if mesh.n_triangles == 0:
        raise AssemblyError("empty mesh")
    layout = dof_layout(degrees)
    trip = _Triplets()
    rhs = np.zeros(layout.total, dtype=complex)
    kconst = prob.constant_k
    p = degrees.degrees
    off = layout.offsets
    d_elem = element_data_orders(prob, mesh, degrees, quad_order)
    d_edge = edge_data_orders(prob, mesh, degrees, quad_order)

    # ---- volume: stiffness, mass, source -----------------------------
    for (pk,), elems in _group_rows(p):
        rule = triangle_rule(2 * pk + 2)
        vals, grads = basis(pk).eval(rule.points)
        det = mesh.det[elems]
        gp = np.einsum("ecd,nqc->enqd", mesh.inv_jac[elems], grads)
        stiff = np.einsum("enqd,emqd,q->enm", gp, gp, rule.weights)
        stiff *= det[:, None, None]
        if kconst is not None:
            m0 = np.einsum("nq,mq,q->nm", vals, vals, rule.weights)
            block = stiff - (kconst ** 2) * det[:, None, None] * m0
            trip.add(off[elems], off[elems], block)
        else:
            trip.add(off[elems], off[elems], stiff)

    if kconst is None:
        # variable wavenumber: the k^2 mass needs the data order
        for (pk, dord), elems in _group_rows(p, d_elem):
            rule = triangle_rule(dord)
            vals, _ = basis(pk).eval(rule.points)
            pts = mesh.map_to_physical(elems, rule.points)
            kk = prob.k_at(pts[..., 0], pts[..., 1])
            block = -np.einsum("eq,nq,mq,q->enm", kk ** 2, vals, vals,
                               rule.weights)
            block *= mesh.det[elems][:, None, None]
            trip.add(off[elems], off[elems], block)

    for (pk, dord), elems in _group_rows(p, d_elem):
        rule = triangle_rule(dord)
        vals, _ = basis(pk).eval(rule.points)
        pts = mesh.map_to_physical(elems, rule.points)
        fv = np.asarray(prob.f(pts[..., 0], pts[..., 1]), dtype=complex)
        fv = np.broadcast_to(fv, pts.shape[:2])
        load = np.einsum("eq,nq,q->en", fv, vals, rule.weights)
        load *= mesh.det[elems][:, None]
        np.add.at(rhs, off[elems][:, None] + np.arange(space_dim(pk)), load)

    # ---- interior edges ----------------------------------------------
    ie = mesh.interior_edges
    if len(ie):
        t0 = mesh.edge_tris[ie, 0]
        t1 = mesh.edge_tris[ie, 1]
        keys = (p[t0], p[t1], mesh.edge_loc[ie, 0], mesh.edge_flip[ie, 0],
                mesh.edge_loc[ie, 1], mesh.edge_flip[ie, 1])
        for (p0, p1, l0, f0, l1, f1), rows in _group_rows(*keys):
            e = ie[rows]
            order = 2 * max(p0, p1) + 2
            rule = edge_rule(order)
            w = rule.weights
            V0, G0 = _trace_tables(p0, l0, f0, order)
            V1, G1 = _trace_tables(p1, l1, f1, order)
            e0, e1 = t0[rows], t1[rows]
            nrm = mesh.edge_normal[e]
            he = mesh.edge_length[e]
            pe = float(min(p0, p1))
            ng0 = np.einsum("ecd,nqc,ed->enq", mesh.inv_jac[e0], G0, nrm)
            ng1 = np.einsum("ecd,nqc,ed->enq", mesh.inv_jac[e1], G1, nrm)
            wb = w * 1.0  # ds = h_e dt applied per edge below
            cb = 1j * prob.beta * (he / pe)          # gradient-jump weight
            ca = 1j * prob.alpha * (pe * pe / he)    # value-jump weight
            sides = ((0, V0, ng0, e0, 1.0), (1, V1, ng1, e1, -1.0))
            for _, Va, nga, ea, sa in sides:        # test side a
                for _, Vb, ngb, eb, sb in sides:    # trial side b
                    mixed_vn = np.einsum("jq,eiq,q->eij", Vb, nga, wb)
                    mixed_nv = np.einsum("ejq,iq,q->eij", ngb, Va, wb)
                    grad_jump = np.einsum("ejq,eiq,q->eij", ngb, nga, wb)
                    val_jump = np.einsum("jq,iq,q->ij", Vb, Va, wb)
                    block = (
                        (-0.5 * sb) * mixed_vn + (-0.5 * sa) * mixed_nv
                        + (sa * sb) * cb[:, None, None] * grad_jump
                        + (sa * sb) * ca[:, None, None]
                        * val_jump[None, :, :].astype(complex))
                    block = block * he[:, None, None]
                    trip.add(off[ea], off[eb], block)

    # ---- boundary edges ----------------------------------------------
    be = mesh.boundary_edges
    if len(be):
        t0 = mesh.edge_tris[be, 0]
        disc_order = 2 * p[t0] + 2
        if kconst is None:
            disc_order = np.maximum(disc_order, d_edge[be])
        keys = (p[t0], mesh.edge_loc[be, 0], mesh.edge_flip[be, 0], disc_order)
        for (p0, l0, f0, order), rows in _group_rows(*keys):
            e = be[rows]
            rule = edge_rule(order)
            w = rule.weights
            V0, G0 = _trace_tables(p0, l0, f0, order)
            e0 = t0[rows]
            nrm = mesh.edge_normal[e]
            he = mesh.edge_length[e]
            pe = float(p0)
            ng0 = np.einsum("ecd,nqc,ed->enq", mesh.inv_jac[e0], G0, nrm)
            if kconst is not None:
                kk = np.full((len(e), len(w)), kconst)
            else:
                a = mesh.vertices[mesh.edges[e, 0]]
                b = mesh.vertices[mesh.edges[e, 1]]
                pts = a[:, None, :] + rule.points[None, :, None] * (
                    b - a)[:, None, :]
                kk = prob.k_at(pts[..., 0], pts[..., 1])
            khp = prob.delta * kk * (he / pe)[:, None]       # delta k h/p
            uv_w = 1j * kk * (1.0 - khp)                     # boundary mass
            un_w = -khp                                      # u times dn v
            nn_w = 1j * prob.delta * (he / pe)[:, None] * np.ones_like(kk)
            m_uv = np.einsum("eq,jq,iq,q->eij", uv_w, V0, V0, w)
            m_un = np.einsum("eq,jq,eiq,q->eij", un_w, V0, ng0, w)
            m_nu = np.einsum("eq,ejq,iq,q->eij", un_w, ng0, V0, w)
            m_nn = np.einsum("eq,ejq,eiq,q->eij", nn_w, ng0, ng0, w)
            block = (m_uv + m_un + m_nu + m_nn) * he[:, None, None]
            trip.add(off[e0], off[e0], block)

        # Robin data enters at the data order
        keys = (p[t0], mesh.edge_loc[be, 0], mesh.edge_flip[be, 0], d_edge[be])
        for (p0, l0, f0, order), rows in _group_rows(*keys):
            e = be[rows]
            rule = edge_rule(order)
            w = rule.weights
            V0, G0 = _trace_tables(p0, l0, f0, order)
            e0 = t0[rows]
            nrm = mesh.edge_normal[e]
            he = mesh.edge_length[e]
            pe = float(p0)
            ng0 = np.einsum("ecd,nqc,ed->enq", mesh.inv_jac[e0], G0, nrm)
            a = mesh.vertices[mesh.edges[e, 0]]
            b = mesh.vertices[mesh.edges[e, 1]]
            pts = a[:, None, :] + rule.points[None, :, None] * (b - a)[:, None, :]
            if kconst is not None:
                kk = np.full((len(e), len(w)), kconst)
            else:
                kk = prob.k_at(pts[..., 0], pts[..., 1])
            gv = np.asarray(
                prob.g(pts[..., 0], pts[..., 1],
                       np.broadcast_to(nrm[:, None, 0], pts.shape[:2]),
                       np.broadcast_to(nrm[:, None, 1], pts.shape[:2])),
                dtype=complex)
            gv = np.broadcast_to(gv, pts.shape[:2])
            khp = prob.delta * kk * (he / pe)[:, None]
            load_v = np.einsum("eq,iq,q->ei", (1.0 - khp) * gv, V0, w)
            load_n = np.einsum("eq,eiq,q->ei",
                               (1j * prob.delta) * (he / pe)[:, None] * gv,
                               ng0, w)
            load = (load_v + load_n) * he[:, None]
            np.add.at(rhs, off[e0][:, None] + np.arange(space_dim(p0)), load)

    A = trip.matrix(layout.total)
    return DgSystem(matrix=A, rhs=rhs, layout=layout, mesh=mesh,
                    degrees=degrees, problem=prob)


def apply_form(prob, mesh, degrees, u, grad_u, quad_order=None):
    """a(u, phi_i) for an analytic field u, against every basis function.

    u(x, y) -> complex values; grad_u(x, y) -> (..., 2) complex.  All
    integrals run at the data order.  Interior jump terms are computed
    from honest two-sided evaluations (which cancel exactly for a
    single-valued u, as they must).
    """
    layout = dof_layout(degrees)
    out = np.zeros(layout.total, dtype=complex)
    p = degrees.degrees
    off = layout.offsets
    kconst = prob.constant_k
    d_elem = element_data_orders(prob, mesh, degrees, quad_order)
    d_edge = edge_data_orders(prob, mesh, degrees, quad_order)

    for (pk, dord), elems in _group_rows(p, d_elem):
        rule = triangle_rule(dord)
        vals, grads = basis(pk).eval(rule.points)
        pts = mesh.map_to_physical(elems, rule.points)
        x, y = pts[..., 0], pts[..., 1]
        uv = np.broadcast_to(np.asarray(u(x, y), dtype=complex), x.shape)
        gv = np.asarray(grad_u(x, y), dtype=complex)
        kk = (np.full(x.shape, kconst) if kconst is not None
              else prob.k_at(x, y))
        gp = np.einsum("ecd,nqc->enqd", mesh.inv_jac[elems], grads)
        loc = np.einsum("eqd,enqd,q->en", gv, gp, rule.weights)
        loc -= np.einsum("eq,eq,nq,q->en", kk ** 2, uv, vals, rule.weights)
        loc *= mesh.det[elems][:, None]
        np.add.at(out, off[elems][:, None] + np.arange(space_dim(pk)), loc)

    def edge_eval(e, rule):
        a = mesh.vertices[mesh.edges[e, 0]]
        b = mesh.vertices[mesh.edges[e, 1]]
        pts = a[:, None, :] + rule.points[None, :, None] * (b - a)[:, None, :]
        x, y = pts[..., 0], pts[..., 1]
        uv = np.broadcast_to(np.asarray(u(x, y), dtype=complex), x.shape)
        gv = np.asarray(grad_u(x, y), dtype=complex)
        return x, y, uv, gv

    ie = mesh.interior_edges
    if len(ie):
        t0 = mesh.edge_tris[ie, 0]
        t1 = mesh.edge_tris[ie, 1]
        keys = (p[t0], p[t1], mesh.edge_loc[ie, 0], mesh.edge_flip[ie, 0],
                mesh.edge_loc[ie, 1], mesh.edge_flip[ie, 1], d_edge[ie])
        for (p0, p1, l0, f0, l1, f1, order), rows in _group_rows(*keys):
            e = ie[rows]
            rule = edge_rule(order)
            w = rule.weights
            V0, G0 = _trace_tables(p0, l0, f0, order)
            V1, G1 = _trace_tables(p1, l1, f1, order)
            e0, e1 = t0[rows], t1[rows]
            nrm = mesh.edge_normal[e]
            he = mesh.edge_length[e]
            _, _, _, gv = edge_eval(e, rule)
            nu = np.einsum("eqd,ed->eq", gv, nrm)
            # A single-valued field has zero value and flux jumps, so the
            # penalty terms and the {grad phi}[[u]] term drop out; only the
            # mean-flux term {grad u}.n [[phi]] survives on interior edges.
            for V, G, et, sa in ((V0, G0, e0, 1.0), (V1, G1, e1, -1.0)):
                loc = np.einsum("eq,nq,q->en", -sa * nu, V, w)
                loc *= he[:, None]
                np.add.at(out, off[et][:, None] + np.arange(len(V)), loc)

    be = mesh.boundary_edges
    if len(be):
        t0 = mesh.edge_tris[be, 0]
        keys = (p[t0], mesh.edge_loc[be, 0], mesh.edge_flip[be, 0], d_edge[be])
        for (p0, l0, f0, order), rows in _group_rows(*keys):
            e = be[rows]
            rule = edge_rule(order)
            w = rule.weights
            V0, G0 = _trace_tables(p0, l0, f0, order)
            e0 = t0[rows]
            nrm = mesh.edge_normal[e]
            he = mesh.edge_length[e]
            pe = float(p0)
            x, y, uv, gv = edge_eval(e, rule)
            nu = np.einsum("eqd,ed->eq", gv, nrm)
            kk = (np.full(x.shape, kconst) if kconst is not None
                  else prob.k_at(x, y))
            ng = np.einsum("ecd,nqc,ed->enq", mesh.inv_jac[e0], G0, nrm)
            khp = prob.delta * kk * (he / pe)[:, None]
            loc = np.einsum("eq,enq,q->en", -khp * uv, ng, w)
            loc += np.einsum("eq,nq,q->en", -khp * nu, V0, w)
            loc += np.einsum("eq,enq,q->en",
                             1j * prob.delta * (he / pe)[:, None] * nu, ng, w)
            loc += np.einsum("eq,nq,q->en", 1j * kk * (1.0 - khp) * uv, V0, w)
            loc *= he[:, None]
            np.add.at(out, off[e0][:, None] + np.arange(len(V0)), loc)
    return out


def consistency_residual(prob, exact, mesh, degrees, quad_order=None):
    """max_i |a(u, phi_i) - F(phi_i)| / scale for an analytic solution u.

    The executable form of consistency: for the exact solution of the
    boundary value problem the discrete equations are satisfied up to
    quadrature error.  scale is the larger of the two vectors' maximum
    moduli, so the result is relative.
    """
    w = apply_form(prob, mesh, degrees, exact.u, exact.grad, quad_order)
    b = assemble(prob, mesh, degrees, quad_order).rhs
    scale = max(np.abs(w).max(), np.abs(b).max(), np.finfo(float).tiny)
    return float(np.abs(w - b).max() / scale)


@dataclass
class SolvabilityReport:
    """sup of delta*k*h/p over boundary edges against the 1/2 threshold.

    Below 1/2 the discrete problem is provably uniquely solvable; at or
    above, the solver still attempts the factorization but guaranteed
    is False.
    """

    value: float
    guaranteed: bool


def solvability_check(prob, mesh, degrees):
    be = mesh.boundary_edges
    p_edge = degrees.edge_degrees(mesh)[be].astype(float)
    mid = 0.5 * (mesh.vertices[mesh.edges[be, 0]]
                 + mesh.vertices[mesh.edges[be, 1]])
    kk = prob.k_at(mid[:, 0], mid[:, 1])
    value = float(np.max(prob.delta * kk * mesh.edge_length[be] / p_edge))
    return SolvabilityReport(value=value, guaranteed=value < 0.5)


def solve(system, tol=1e-10):
    """Direct factorization; returns a DgSolution.

    Dense LAPACK below DENSE_CUTOFF DOFs, sparse LU above.  The relative
    residual must meet tol, with one step of iterative refinement
    allowed before giving up.
    """
    from .solution import DgSolution

    A, b = system.matrix, system.rhs
    n = system.layout.total
    nb = np.linalg.norm(b)
    if nb == 0.0:
        return DgSolution(np.zeros(n, dtype=complex), system.mesh,
                          system.degrees, system.layout, system.problem)
    try:
        if n < DENSE_CUTOFF:
            dense = A.toarray()
            c = np.linalg.solve(dense, b)
            resid = b - dense @ c
            if np.linalg.norm(resid) > tol * nb:
                c += np.linalg.solve(dense, resid)
        else:
            lu = spla.splu(A.tocsc())
            c = lu.solve(b)
            resid = b - A @ c
            if np.linalg.norm(resid) > tol * nb:
                c += lu.solve(resid)
    except (np.linalg.LinAlgError, RuntimeError) as exc:
        raise SingularSystemError(str(exc)) from exc
    if not np.isfinite(c).all():
        raise SingularSystemError("factorization produced non-finite values")
    rel = np.linalg.norm(b - A @ c) / nb
    if rel > tol:
        raise ResidualTooLargeError(f"relative residual {rel:.3e} > {tol:.1e}")
    return DgSolution(c, system.mesh, system.degrees, system.layout,
                      system.problem)
