"""Conforming triangle meshes, degree maps and bisection refinement.

A mesh is a flat array structure (vertices, triangles, derived edge
tables) in the spirit of array-based FEM codes: no element objects, all
incidence data precomputed in numpy arrays.  Triangles are stored
counterclockwise.  Global edges are sorted vertex pairs ordered
lexicographically, which fixes a deterministic edge numbering; on
interior edges the side-0 element is the one with the lower element
index, and jump orientation follows that convention throughout.

Refinement is bisection across the longest edge (ties broken by the
lexicographically smallest vertex pair), with iterative closure so the
result is again conforming.  Children inherit the parent's polynomial
degree.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree


class MeshError(Exception):
    """Base class for mesh construction and refinement failures."""


class DegenerateTriangleError(MeshError):
    pass


class DuplicateTriangleError(MeshError):
    pass


class NonManifoldEdgeError(MeshError):
    pass


class HangingNodeError(MeshError):
    pass


class ClosureError(MeshError):
    """Bisection closure failed to terminate within the safety bound."""


class DegreeComparabilityError(MeshError):
    pass


class NonpositiveWavenumberError(ValueError):
    pass


_PAIR_SHIFT = np.int64(1) << 32


def _pair_key(a, b):
    """Collision-free int64 key for a sorted vertex pair."""
    return a.astype(np.int64) * _PAIR_SHIFT + b.astype(np.int64)


@dataclass
class Mesh:
    """Conforming triangulation with precomputed incidence and geometry.

    Fields are numpy arrays; see build_mesh for how they are derived.
    Edge slot 0 always holds the lower adjacent element index, and
    edge_normal points out of that element (out of the domain on the
    boundary).
    """

    vertices: np.ndarray          # (nv, 2) float
    triangles: np.ndarray         # (nt, 3) int, counterclockwise
    edges: np.ndarray             # (ne, 2) int, sorted pairs, lexicographic
    tri_edges: np.ndarray         # (nt, 3) int, local edge l = (v_l, v_{l+1})
    edge_tris: np.ndarray         # (ne, 2) int, -1 in slot 1 on the boundary
    edge_loc: np.ndarray          # (ne, 2) int, local edge index per side
    edge_flip: np.ndarray         # (ne, 2) bool, side traversal vs sorted pair
    edge_length: np.ndarray       # (ne,)
    edge_normal: np.ndarray       # (ne, 2), outward from side 0
    tri_area: np.ndarray          # (nt,)
    diameter: np.ndarray          # (nt,) longest edge
    incircle: np.ndarray          # (nt,) inscribed circle diameter
    jac: np.ndarray               # (nt, 2, 2) affine map columns v1-v0, v2-v0
    inv_jac: np.ndarray           # (nt, 2, 2)
    det: np.ndarray               # (nt,) = 2 * area
    interior_edges: np.ndarray    # indices into edges
    boundary_edges: np.ndarray
    _vert_ptr: np.ndarray = field(repr=False)   # CSR vertex->triangle incidence
    _vert_tri: np.ndarray = field(repr=False)

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_triangles(self):
        return len(self.triangles)

    @property
    def n_edges(self):
        return len(self.edges)

    @property
    def h_max(self):
        return float(self.diameter.max())

    @property
    def h_min_edge(self):
        return float(self.edge_length.min())

    def vertex_triangles(self, v):
        """Indices of triangles containing vertex v."""
        return self._vert_tri[self._vert_ptr[v]:self._vert_ptr[v + 1]]

    def map_to_physical(self, elems, ref_pts):
        """Affine image of reference points; (len(elems), npts, 2)."""
        v0 = self.vertices[self.triangles[elems, 0]]
        return v0[:, None, :] + np.einsum(
            "kab,pb->kpa", self.jac[elems], ref_pts)

    def map_to_reference(self, elem, phys_pts):
        """Pull physical points back into element elem's reference frame."""
        v0 = self.vertices[self.triangles[elem, 0]]
        return (phys_pts - v0) @ self.inv_jac[elem].T


def build_mesh(vertices, triangles, validate=True):
    """Assemble the incidence tables and validate conformity.

    Parameters
    ----------
    vertices : (nv, 2) array_like
    triangles : (nt, 3) array_like of vertex indices
    validate : bool
        Run the full conformity checks (duplicate elements, manifold
        edges, hanging nodes).  Degeneracy and orientation are always
        checked.  Refinement output is conforming by construction and is
        built with validate=False internally.
    """
    verts = np.ascontiguousarray(np.asarray(vertices, dtype=float))
    tris = np.ascontiguousarray(np.asarray(triangles, dtype=np.int64))
    if verts.ndim != 2 or verts.shape[1] != 2:
        raise MeshError("vertices must have shape (nv, 2)")
    if tris.ndim != 2 or tris.shape[1] != 3:
        raise MeshError("triangles must have shape (nt, 3)")
    if len(tris) == 0:
        raise MeshError("mesh needs at least one triangle")
    if tris.min() < 0 or tris.max() >= len(verts):
        raise MeshError("triangle vertex index out of range")

    # orient counterclockwise; reject degenerate elements
    p0 = verts[tris[:, 0]]
    d1 = verts[tris[:, 1]] - p0
    d2 = verts[tris[:, 2]] - p0
    cross = d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]
    tris = tris.copy()
    neg = cross < 0.0
    tris[neg] = tris[neg][:, [0, 2, 1]]
    lengths2 = np.stack(
        [((verts[tris[:, (l + 1) % 3]] - verts[tris[:, l]]) ** 2).sum(axis=1)
         for l in range(3)], axis=1)
    scale2 = lengths2.max(axis=1)
    bad = np.abs(cross) <= 1e-14 * scale2
    if bad.any():
        raise DegenerateTriangleError(
            f"degenerate triangle(s) at indices {np.flatnonzero(bad).tolist()}")

    if validate:
        triples = np.sort(tris, axis=1)
        _, first, counts = np.unique(
            triples, axis=0, return_index=True, return_counts=True)
        if (counts > 1).any():
            dup = first[counts > 1]
            raise DuplicateTriangleError(
                f"duplicate triangle(s), e.g. index {int(dup[0])}")

    nt = len(tris)
    local_pairs = np.stack(
        [tris[:, [0, 1]], tris[:, [1, 2]], tris[:, [2, 0]]], axis=1)
    flat = local_pairs.reshape(-1, 2)
    flat_sorted = np.sort(flat, axis=1)
    edges, inverse, counts = np.unique(
        flat_sorted, axis=0, return_inverse=True, return_counts=True)
    if (counts > 2).any():
        e = int(np.flatnonzero(counts > 2)[0])
        raise NonManifoldEdgeError(
            f"edge {tuple(edges[e])} shared by more than two triangles")
    ne = len(edges)
    tri_edges = inverse.reshape(nt, 3)

    # slot assignment: ascending element index per edge
    flat_tri = np.repeat(np.arange(nt), 3)
    flat_loc = np.tile(np.arange(3), nt)
    order = np.lexsort((flat_tri, inverse))
    e_sorted = inverse[order]
    slot = np.ones(len(order), dtype=np.int64)
    starts = np.r_[True, e_sorted[1:] != e_sorted[:-1]]
    slot[starts] = 0
    edge_tris = np.full((ne, 2), -1, dtype=np.int64)
    edge_loc = np.full((ne, 2), -1, dtype=np.int64)
    edge_flip = np.zeros((ne, 2), dtype=bool)
    edge_tris[e_sorted, slot] = flat_tri[order]
    edge_loc[e_sorted, slot] = flat_loc[order]
    edge_flip[e_sorted, slot] = flat[order, 0] != edges[e_sorted, 0]

    vec = verts[edges[:, 1]] - verts[edges[:, 0]]
    edge_length = np.hypot(vec[:, 0], vec[:, 1])
    # outward normal of the side-0 element: rotate its traversal by -90 deg
    tangent = vec / edge_length[:, None]
    normal = np.column_stack([tangent[:, 1], -tangent[:, 0]])
    normal[edge_flip[:, 0]] *= -1.0

    interior = np.flatnonzero(edge_tris[:, 1] >= 0)
    boundary = np.flatnonzero(edge_tris[:, 1] < 0)

    if validate:
        _check_hanging_nodes(verts, tris, edges, edge_length)

    area = 0.5 * np.abs(cross)
    lengths = np.sqrt(lengths2)
    diameter = lengths.max(axis=1)
    perimeter = lengths.sum(axis=1)
    incircle = 4.0 * area / perimeter

    p0 = verts[tris[:, 0]]
    jac = np.empty((nt, 2, 2))
    jac[:, :, 0] = verts[tris[:, 1]] - p0
    jac[:, :, 1] = verts[tris[:, 2]] - p0
    det = jac[:, 0, 0] * jac[:, 1, 1] - jac[:, 0, 1] * jac[:, 1, 0]
    inv_jac = np.empty_like(jac)
    inv_jac[:, 0, 0] = jac[:, 1, 1]
    inv_jac[:, 1, 1] = jac[:, 0, 0]
    inv_jac[:, 0, 1] = -jac[:, 0, 1]
    inv_jac[:, 1, 0] = -jac[:, 1, 0]
    inv_jac /= det[:, None, None]

    vt_order = np.argsort(tris.ravel(), kind="stable")
    vert_tri = np.repeat(np.arange(nt), 3)[vt_order]
    vert_counts = np.bincount(tris.ravel(), minlength=len(verts))
    vert_ptr = np.r_[0, np.cumsum(vert_counts)]

    return Mesh(
        vertices=verts, triangles=tris, edges=edges, tri_edges=tri_edges,
        edge_tris=edge_tris, edge_loc=edge_loc, edge_flip=edge_flip,
        edge_length=edge_length, edge_normal=normal, tri_area=area,
        diameter=diameter, incircle=incircle, jac=jac, inv_jac=inv_jac,
        det=det, interior_edges=interior, boundary_edges=boundary,
        _vert_ptr=vert_ptr, _vert_tri=vert_tri)


def _check_hanging_nodes(verts, tris, edges, edge_length):
    """A vertex in the relative interior of somebody's edge is hanging."""
    if len(verts) < 4:
        return
    tree = cKDTree(verts)
    mid = 0.5 * (verts[edges[:, 0]] + verts[edges[:, 1]])
    radii = 0.5 * edge_length * (1.0 + 1e-9)
    hits = tree.query_ball_point(mid, radii)
    for e, cand in enumerate(hits):
        a, b = edges[e]
        pa = verts[a]
        d = verts[b] - pa
        L2 = edge_length[e] ** 2
        for v in cand:
            if v == a or v == b:
                continue
            w = verts[v] - pa
            s = (w @ d) / L2
            if s <= 1e-9 or s >= 1.0 - 1e-9:
                continue
            off = w - s * d
            if off @ off <= (1e-9 * edge_length[e]) ** 2:
                raise HangingNodeError(
                    f"vertex {v} lies inside edge ({a}, {b})")


def shape_regularity(mesh):
    """max over elements of diameter / inscribed-circle diameter."""
    return float((mesh.diameter / mesh.incircle).max())


def patch(mesh, element=None, edge=None):
    """Triangle indices of the vertex patch around an element or an edge.

    For an element K this is every triangle sharing at least one vertex
    with K (K itself included).  For an edge it is every triangle whose
    closure meets the edge, which in a conforming mesh means every
    triangle containing one of its endpoints.
    """
    if (element is None) == (edge is None):
        raise ValueError("pass exactly one of element, edge")
    vs = mesh.triangles[element] if element is not None else mesh.edges[edge]
    out = np.unique(np.concatenate([mesh.vertex_triangles(v) for v in vs]))
    return out


@dataclass
class DegreeMap:
    """Per-element polynomial degrees."""

    degrees: np.ndarray

    def __post_init__(self):
        self.degrees = np.asarray(self.degrees, dtype=np.int64)
        if (self.degrees < 0).any():
            raise ValueError("degrees must be nonnegative")

    def edge_degrees(self, mesh):
        """Per-edge degree: minimum over the adjacent elements."""
        p = self.degrees[mesh.edge_tris[:, 0]]
        other = mesh.edge_tris[:, 1]
        inner = other >= 0
        p = p.copy()
        p[inner] = np.minimum(p[inner], self.degrees[other[inner]])
        return p

    @property
    def max_degree(self):
        return int(self.degrees.max())

    @property
    def min_degree(self):
        return int(self.degrees.min())


def uniform_degrees(mesh, p):
    return DegreeMap(np.full(mesh.n_triangles, p, dtype=np.int64))


def check_degree_comparability(mesh, degrees, rho=None):
    """Degrees of touching elements must be comparable up to the factor rho.

    Touching means sharing at least a vertex.  Raises
    DegreeComparabilityError on violation, returns rho otherwise.
    """
    if rho is None:
        rho = shape_regularity(mesh)
    p1 = degrees.degrees + 1.0
    for v in range(mesh.n_vertices):
        inc = mesh.vertex_triangles(v)
        if len(inc) < 2:
            continue
        local = p1[inc]
        if local.max() > rho * local.min() * (1.0 + 1e-12):
            raise DegreeComparabilityError(
                f"degrees {degrees.degrees[inc].tolist()} around vertex {v} "
                f"exceed comparability factor {rho:.3f}")
    return rho


def _wavenumber_samples(mesh, k):
    """k at element centroids and edge midpoints (one sample each)."""
    centroids = mesh.vertices[mesh.triangles].mean(axis=1)
    midpoints = 0.5 * (mesh.vertices[mesh.edges[:, 0]]
                       + mesh.vertices[mesh.edges[:, 1]])
    if callable(k):
        ke = np.broadcast_to(
            np.real(k(centroids[:, 0], centroids[:, 1])), (mesh.n_triangles,)
        ).astype(float)
        kf = np.broadcast_to(
            np.real(k(midpoints[:, 0], midpoints[:, 1])), (mesh.n_edges,)
        ).astype(float)
    else:
        ke = np.full(mesh.n_triangles, float(k))
        kf = np.full(mesh.n_edges, float(k))
    return ke, kf


@dataclass
class MeshData:
    """Mesh width and degree fields plus the resolution measure.

    kh_over_p is the sup of k*h/p over elements and edges, the quantity
    the solvability threshold and the error theory are phrased in.
    """

    h_elem: np.ndarray
    p_elem: np.ndarray
    h_edge: np.ndarray
    p_edge: np.ndarray
    k_elem: np.ndarray
    k_edge: np.ndarray
    kh_over_p: float


def mesh_data(mesh, degrees, k):
    """Evaluate h/p fields and sup k*h/p for a (possibly varying) wavenumber.

    k may be a scalar or a callable of (x, y); it is sampled at element
    centroids and edge midpoints, which is exact for piecewise-constant
    wavenumbers away from sample points.  Nonpositive samples raise
    NonpositiveWavenumberError; samples below 1 only warn, since the
    method itself merely needs positivity.
    """
    ke, kf = _wavenumber_samples(mesh, k)
    kmin = min(ke.min(), kf.min())
    if kmin <= 0.0:
        raise NonpositiveWavenumberError(f"wavenumber sample {kmin} <= 0")
    if kmin < 1.0:
        warnings.warn("wavenumber below 1; resolution measures assume k >= 1",
                      stacklevel=2)
    p_elem = degrees.degrees.astype(float)
    p_edge = degrees.edge_degrees(mesh).astype(float)
    m_elem = (ke * mesh.diameter / np.maximum(p_elem, 1.0)).max()
    m_edge = (kf * mesh.edge_length / np.maximum(p_edge, 1.0)).max()
    return MeshData(
        h_elem=mesh.diameter, p_elem=degrees.degrees,
        h_edge=mesh.edge_length, p_edge=degrees.edge_degrees(mesh),
        k_elem=ke, k_edge=kf, kh_over_p=float(max(m_elem, m_edge)))


def edge_reference_points(loc, flip, t):
    """Reference coordinates of edge points parametrized by the global edge.

    t runs from the lower-numbered to the higher-numbered edge vertex;
    loc is the local edge index in the adjacent triangle and flip tells
    whether the triangle traverses the edge against that direction.
    Local edge l connects local vertices l and l+1 (mod 3).
    """
    t = np.asarray(t, dtype=float)
    s = 1.0 - t if flip else t
    z = np.zeros_like(s)
    if loc == 0:
        return np.column_stack([s, z])
    if loc == 1:
        return np.column_stack([1.0 - s, s])
    if loc == 2:
        return np.column_stack([z, 1.0 - s])
    raise ValueError("loc must be 0, 1 or 2")


# ----------------------------------------------------------------------
# refinement


def _longest_local_edge(verts, tris):
    """Per-triangle local index of the longest edge, deterministic ties.

    Ties (exactly equal squared lengths) go to the lexicographically
    smallest sorted vertex pair, which matches the global edge ordering.
    """
    lengths2 = np.stack(
        [((verts[tris[:, (l + 1) % 3]] - verts[tris[:, l]]) ** 2).sum(axis=1)
         for l in range(3)], axis=1)
    keys = np.stack(
        [_pair_key(np.minimum(tris[:, l], tris[:, (l + 1) % 3]),
                   np.maximum(tris[:, l], tris[:, (l + 1) % 3]))
         for l in range(3)], axis=1)
    is_max = lengths2 == lengths2.max(axis=1, keepdims=True)
    keys = np.where(is_max, keys, np.iinfo(np.int64).max)
    return np.argmin(keys, axis=1)


def refine(mesh, degrees, marked):
    """Bisect the marked triangles and close the mesh.

    Every marked triangle is bisected across its longest edge; triangles
    that end up with a midpoint vertex on one of their edges are then
    bisected the same way until no hanging nodes remain.  Children
    inherit the parent degree.

    Returns (new_mesh, new_degrees, children) where children maps every
    input triangle index to the list of its descendants' indices in the
    new mesh (a singleton for untouched triangles).
    """
    marked = np.unique(np.asarray(list(marked), dtype=np.int64))
    if len(marked) and (marked.min() < 0 or marked.max() >= mesh.n_triangles):
        raise ValueError("marked element index out of range")
    if len(marked) == 0:
        children = {k: [k] for k in range(mesh.n_triangles)}
        return mesh, DegreeMap(degrees.degrees.copy()), children

    nv = mesh.n_vertices
    varr = np.empty((2 * nv + 16, 2))
    varr[:nv] = mesh.vertices
    tris = mesh.triangles.copy()
    root = np.arange(mesh.n_triangles)
    degs = degrees.degrees.copy()
    alive = np.ones(mesh.n_triangles, dtype=bool)
    midpoint = {}
    reg_keys = []

    pending = marked
    budget = 200 * (mesh.n_triangles + len(marked)) + 10_000
    done = 0
    while len(pending):
        done += len(pending)
        if done > budget:
            raise ClosureError("bisection closure exceeded the safety bound")
        sub = tris[pending]
        lidx = _longest_local_edge(varr[:nv], sub)
        # (a, b, c) with (a, b) the bisected edge, orientation preserved
        a = sub[np.arange(len(sub)), lidx]
        b = sub[np.arange(len(sub)), (lidx + 1) % 3]
        c = sub[np.arange(len(sub)), (lidx + 2) % 3]
        lo = np.minimum(a, b)
        hi = np.maximum(a, b)
        uniq, inv = np.unique(_pair_key(lo, hi), return_inverse=True)
        uniq_mid = np.empty(len(uniq), dtype=np.int64)
        for i, kk in enumerate(uniq.tolist()):
            m = midpoint.get(kk)
            if m is None:
                m = nv
                if nv == len(varr):
                    varr = np.vstack([varr, np.empty_like(varr)])
                va, vb = divmod(kk, int(_PAIR_SHIFT))
                varr[nv] = 0.5 * (varr[va] + varr[vb])
                nv += 1
                midpoint[kk] = m
                reg_keys.append(kk)
            uniq_mid[i] = m
        mids = uniq_mid[inv]
        kids = np.empty((2 * len(sub), 3), dtype=np.int64)
        kids[0::2, 0] = a
        kids[0::2, 1] = mids
        kids[0::2, 2] = c
        kids[1::2, 0] = mids
        kids[1::2, 1] = b
        kids[1::2, 2] = c
        alive[pending] = False
        alive = np.r_[alive, np.ones(len(kids), dtype=bool)]
        tris = np.vstack([tris, kids])
        root = np.r_[root, np.repeat(root[pending], 2)]
        degs = np.r_[degs, np.repeat(degs[pending], 2)]

        # closure sweep: any live triangle with a split edge gets bisected
        live = np.flatnonzero(alive)
        t = tris[live]
        reg = np.asarray(reg_keys)
        keys = np.stack(
            [_pair_key(np.minimum(t[:, l], t[:, (l + 1) % 3]),
                       np.maximum(t[:, l], t[:, (l + 1) % 3]))
             for l in range(3)], axis=1)
        hanging = np.isin(keys, reg).any(axis=1)
        pending = live[hanging]

    live = np.flatnonzero(alive)
    new_mesh = build_mesh(varr[:nv], tris[live], validate=False)
    new_degrees = DegreeMap(degs[live])
    children = {k: [] for k in range(mesh.n_triangles)}
    for new_idx, r in enumerate(root[live]):
        children[int(r)].append(new_idx)
    return new_mesh, new_degrees, children


# ----------------------------------------------------------------------
# generators and ASCII I/O


def square_mesh(n, lo=0.0, hi=1.0):
    """Structured n x n mesh of the square (lo, hi)^2, two triangles per cell."""
    if n < 1:
        raise ValueError("n must be >= 1")
    s = np.linspace(lo, hi, n + 1)
    X, Y = np.meshgrid(s, s, indexing="xy")
    verts = np.column_stack([X.ravel(), Y.ravel()])

    def vid(i, j):
        return j * (n + 1) + i

    tris = []
    for j in range(n):
        for i in range(n):
            v00, v10 = vid(i, j), vid(i + 1, j)
            v01, v11 = vid(i, j + 1), vid(i + 1, j + 1)
            tris.append((v00, v10, v11))
            tris.append((v00, v11, v01))
    return build_mesh(verts, np.asarray(tris))


def unit_square_mesh(n=1):
    return square_mesh(n, 0.0, 1.0)


def l_shape_mesh(n=2):
    """(-1,1)^2 minus the closed quadrant [0,1] x [-1,0].

    n is the number of cells per axis over (-1, 1) and must be even so
    the reentrant corner at the origin is a mesh vertex.
    """
    if n < 2 or n % 2:
        raise ValueError("n must be an even number >= 2")
    s = np.linspace(-1.0, 1.0, n + 1)
    X, Y = np.meshgrid(s, s, indexing="xy")
    verts = np.column_stack([X.ravel(), Y.ravel()])

    def vid(i, j):
        return j * (n + 1) + i

    h = 2.0 / n
    tris = []
    for j in range(n):
        for i in range(n):
            xc = -1.0 + (i + 0.5) * h
            yc = -1.0 + (j + 0.5) * h
            if xc > 0.0 and yc < 0.0:
                continue
            v00, v10 = vid(i, j), vid(i + 1, j)
            v01, v11 = vid(i, j + 1), vid(i + 1, j + 1)
            tris.append((v00, v10, v11))
            tris.append((v00, v11, v01))
    tris = np.asarray(tris)
    used = np.unique(tris)
    remap = -np.ones(len(verts), dtype=np.int64)
    remap[used] = np.arange(len(used))
    return build_mesh(verts[used], remap[tris])


def write_mesh(mesh, path):
    """Plain-text mesh: vertex count, 'i x y' lines, triangle count,
    'i a b c' lines, all 0-based."""
    with open(path, "w") as f:
        f.write(f"{mesh.n_vertices}\n")
        for i, (x, y) in enumerate(mesh.vertices):
            f.write(f"{i} {x:.17g} {y:.17g}\n")
        f.write(f"{mesh.n_triangles}\n")
        for i, (a, b, c) in enumerate(mesh.triangles):
            f.write(f"{i} {a} {b} {c}\n")


def read_mesh(path, validate=True):
    """Inverse of write_mesh."""
    with open(path) as f:
        tokens = f.read().split()
    pos = 0

    def take(n):
        nonlocal pos
        if pos + n > len(tokens):
            raise ValueError(f"{path}: truncated mesh file")
        out = tokens[pos:pos + n]
        pos += n
        return out

    nv = int(take(1)[0])
    verts = np.empty((nv, 2))
    for i in range(nv):
        idx, x, y = take(3)
        if int(idx) != i:
            raise ValueError(f"{path}: vertex indices must be 0..{nv - 1}")
        verts[i] = (float(x), float(y))
    nt = int(take(1)[0])
    tris = np.empty((nt, 3), dtype=np.int64)
    for i in range(nt):
        idx, a, b, c = take(4)
        if int(idx) != i:
            raise ValueError(f"{path}: triangle indices must be 0..{nt - 1}")
        tris[i] = (int(a), int(b), int(c))
    if pos != len(tokens):
        raise ValueError(f"{path}: trailing data")
    return build_mesh(verts, tris, validate=validate)
