"""Readers for the solver's output files.

Three formats, all produced by the helmdg command line tool:

* the refinement history CSV, one row per step,
* plain text mesh snapshots,
* per-element estimator CSVs matching each snapshot.

These are pure parsers.  Nothing here recomputes errors or estimators;
the solver is the single source of truth and the numbers come back
exactly as written.
"""

import numpy as np

HISTORY_HEADER = ("step,nelems,ndofs,hmax,hmin,rho,mkhp,eta_check,eta,"
                  "osc,err_ht,solvable,seconds")
ESTIMATE_HEADER = "element,eta_r,eta_e,eta_j,eta,eta_check,osc"

_HISTORY_INT = ("step", "nelems", "ndofs")


class SchemaMismatch(ValueError):
    """A CSV input does not match the documented schema."""


class ParseError(ValueError):
    """A mesh snapshot file is malformed."""


class History:
    """Columns of one run's history CSV, one numpy array per column.

    Integer columns (step, nelems, ndofs) come back as int64 and the
    rest as float64.  err_ht is nan for runs without a reference
    solution.  nsteps is the number of data rows.
    """

    def __init__(self, columns):
        self.nsteps = len(columns["step"])
        for name, vals in columns.items():
            setattr(self, name, vals)


class Estimate:
    """Per-element estimator table for one refinement step."""

    def __init__(self, columns):
        self.nelems = len(columns["element"])
        for name, vals in columns.items():
            setattr(self, name, vals)


class MeshData:
    """Vertices (n, 2) float and triangles (m, 3) int of one snapshot."""

    def __init__(self, vertices, triangles):
        self.vertices = vertices
        self.triangles = triangles
        self.n_vertices = len(vertices)
        self.n_triangles = len(triangles)


def _csv_rows(path, header):
    with open(path) as fh:
        lines = [ln for ln in (raw.strip() for raw in fh) if ln]
    if not lines:
        raise SchemaMismatch(f"{path}: empty file")
    if lines[0] != header:
        raise SchemaMismatch(
            f"{path}: header {lines[0]!r} does not match {header!r}")
    if len(lines) == 1:
        raise SchemaMismatch(f"{path}: no data rows")
    names = header.split(",")
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        fields = line.split(",")
        if len(fields) != len(names):
            raise SchemaMismatch(f"{path}:{lineno}: expected {len(names)} "
                                 f"fields, got {len(fields)}")
        try:
            rows.append([float(tok) for tok in fields])
        except ValueError:
            raise SchemaMismatch(
                f"{path}:{lineno}: non-numeric field in {line!r}") from None
    return names, np.asarray(rows, dtype=float)


def read_history(path):
    """Parse a history CSV, validating the exact header."""
    names, data = _csv_rows(path, HISTORY_HEADER)
    columns = {}
    for j, name in enumerate(names):
        col = data[:, j]
        columns[name] = col.astype(np.int64) if name in _HISTORY_INT else col
    return History(columns)


def read_estimate(path):
    """Parse a per-element estimator CSV for one step."""
    names, data = _csv_rows(path, ESTIMATE_HEADER)
    columns = {}
    for j, name in enumerate(names):
        col = data[:, j]
        columns[name] = col.astype(np.int64) if name == "element" else col
    elems = columns["element"]
    if not np.array_equal(elems, np.arange(len(elems))):
        raise SchemaMismatch(f"{path}: element ids must run 0..n-1 in order")
    return Estimate(columns)


def _int_token(tok, path):
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"{path}: expected an integer, got {tok!r}") from None


def _float_token(tok, path):
    try:
        return float(tok)
    except ValueError:
        raise ParseError(
            f"{path}: expected a coordinate, got {tok!r}") from None


def read_mesh(path):
    """Parse a plain text mesh snapshot.

    Layout: vertex count, one 'i x y' line per vertex, triangle count,
    one 'i a b c' line per triangle, all ids 0-based and in order.
    """
    with open(path) as fh:
        tokens = fh.read().split()
    pos = 0

    def take(n):
        nonlocal pos
        if pos + n > len(tokens):
            raise ParseError(f"{path}: truncated mesh file")
        chunk = tokens[pos:pos + n]
        pos += n
        return chunk

    nv = _int_token(take(1)[0], path)
    if nv < 0:
        raise ParseError(f"{path}: negative vertex count")
    verts = np.empty((nv, 2))
    for i in range(nv):
        idx, x, y = take(3)
        if _int_token(idx, path) != i:
            raise ParseError(f"{path}: vertex ids must run 0..{nv - 1}")
        verts[i] = (_float_token(x, path), _float_token(y, path))
    nt = _int_token(take(1)[0], path)
    if nt < 0:
        raise ParseError(f"{path}: negative triangle count")
    tris = np.empty((nt, 3), dtype=np.int64)
    for i in range(nt):
        idx, a, b, c = take(4)
        if _int_token(idx, path) != i:
            raise ParseError(f"{path}: triangle ids must run 0..{nt - 1}")
        tris[i] = (_int_token(a, path), _int_token(b, path),
                   _int_token(c, path))
    if pos != len(tokens):
        raise ParseError(f"{path}: trailing data")
    if nt and (tris.min() < 0 or tris.max() >= nv):
        raise ParseError(f"{path}: triangle references a missing vertex")
    return MeshData(verts, tris)
