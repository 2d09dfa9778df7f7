"""Tests for the dG system assembly, load functional, and solver."""

import numpy as np
import pytest

from helmdg.assemble import (apply_form, assemble, consistency_residual,
                             dof_layout, solvability_check, solve)
from helmdg.mesh import (DegreeMap, build_mesh, square_mesh, uniform_degrees)
from helmdg.problem import ProblemSpec
from helmdg.solution import project

from oracles import battery_meshes, form_vector


def reference_triangle():
    return build_mesh(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]),
                      np.array([[0, 1, 2]]))


def plane_wave_problem(k):
    def f(x, y):
        return k * k * np.exp(1j * k * (x + y))

    def g(x, y, nx, ny):
        u = np.exp(1j * k * (x + y))
        return 1j * k * u * (nx + ny) + 1j * k * u

    return ProblemSpec(k=k, f=f, g=g)


class PlaneWave:
    def __init__(self, k):
        self.k = k

    def u(self, x, y):
        return np.exp(1j * self.k * (x + y))

    def grad(self, x, y):
        du = 1j * self.k * np.exp(1j * self.k * (x + y))
        return np.stack([du, du], axis=-1)


class AffineField:
    def __init__(self, a0, a1, a2):
        self.a0, self.a1, self.a2 = a0, a1, a2

    def u(self, x, y):
        return self.a0 + self.a1 * x + self.a2 * y

    def grad(self, x, y):
        gx = np.broadcast_to(self.a1, np.shape(x)).astype(complex)
        gy = np.broadcast_to(self.a2, np.shape(x)).astype(complex)
        return np.stack([gx, gy], axis=-1)


def affine_problem(k, a0, a1, a2):
    def f(x, y):
        return -k * k * (a0 + a1 * x + a2 * y)

    def g(x, y, nx, ny):
        return a1 * nx + a2 * ny + 1j * k * (a0 + a1 * x + a2 * y)

    return ProblemSpec(k=k, f=f, g=g)


@pytest.mark.parametrize("name,mesh", battery_meshes())
@pytest.mark.parametrize("p", [1, 2, 3, "mixed"])
def test_assembly_matches_direct_quadrature(name, mesh, p):
    """A @ c equals term-by-term quadrature of a(u_c, phi_i)."""
    if p == "mixed":
        degs = 1 + (np.arange(mesh.n_triangles) % 3)
        degrees = DegreeMap(degrees=degs.astype(np.int64))
    else:
        degrees = uniform_degrees(mesh, p)
    prob = ProblemSpec(k=2.5)
    system = assemble(prob, mesh, degrees)
    A = system.matrix
    rng = np.random.default_rng(sum(map(ord, name)) + 17)
    for _ in range(5):
        c = rng.normal(size=A.shape[0]) + 1j * rng.normal(size=A.shape[0])
        got = A @ c
        want = form_vector(prob, mesh, degrees, c)
        scale = max(np.abs(want).max(), 1.0)
        assert np.abs(got - want).max() <= 1e-10 * scale


def test_assembly_matches_oracle_variable_k():
    """Same cross-check with a spatially varying polynomial wavenumber."""
    mesh = square_mesh(2)
    degrees = uniform_degrees(mesh, 2)
    prob = ProblemSpec(k=lambda x, y: 2.0 + 0.3 * x + 0.2 * y)
    A = assemble(prob, mesh, degrees).matrix
    rng = np.random.default_rng(3)
    for _ in range(5):
        c = rng.normal(size=A.shape[0]) + 1j * rng.normal(size=A.shape[0])
        want = form_vector(prob, mesh, degrees, c)
        scale = max(np.abs(want).max(), 1.0)
        assert np.abs(A @ c - want).max() <= 1e-10 * scale


def test_hand_value_constant_on_reference_triangle():
    """a(1,1) = -1/2 + (1+sqrt(2)) i on the reference triangle, k=1."""
    mesh = reference_triangle()
    degrees = uniform_degrees(mesh, 1)
    prob = ProblemSpec(k=1.0, delta=0.25)
    system = assemble(prob, mesh, degrees)
    c = project(mesh, degrees, lambda x, y: np.ones_like(x)).coeffs
    val = np.conj(c) @ (system.matrix @ c)
    want = -0.5 + (1.0 + np.sqrt(2.0)) * 1j
    assert abs(val - want) <= 1e-12


def test_load_of_constant_is_area():
    """f = 1, g = 0 on the reference triangle: F(1) = |K| = 1/2."""
    mesh = reference_triangle()
    degrees = uniform_degrees(mesh, 1)
    prob = ProblemSpec(k=1.0, f=lambda x, y: np.ones_like(x, dtype=complex),
                       g=None)
    system = assemble(prob, mesh, degrees)
    c = project(mesh, degrees, lambda x, y: np.ones_like(x)).coeffs
    assert abs(np.conj(c) @ system.rhs - 0.5) <= 1e-12


def test_continuous_field_has_no_penalty_contribution():
    """Doubling either penalty leaves A @ c unchanged for continuous u.

    The alpha term sees the value jump and the beta term the flux jump,
    and both vanish for the interpolant of a global linear.
    """
    mesh = square_mesh(2)
    degrees = uniform_degrees(mesh, 2)
    c = project(mesh, degrees, lambda x, y: 2.0 * x + 3.0 * y - 1.0).coeffs
    base = assemble(ProblemSpec(k=2.0), mesh, degrees)
    bumped = assemble(ProblemSpec(k=2.0, alpha=60.0,
                                  beta=2.0), mesh, degrees)
    diff = np.abs((bumped.matrix - base.matrix) @ c)
    assert diff.max() <= 1e-12 * max(np.abs(base.matrix @ c).max(), 1.0)


def test_matrix_sparsity_is_neighbor_local():
    mesh = square_mesh(2)
    degrees = uniform_degrees(mesh, 1)
    layout = dof_layout(degrees)
    A = assemble(ProblemSpec(k=2.0), mesh, degrees).matrix
    elem_of = np.repeat(np.arange(mesh.n_triangles), layout.sizes)
    neighbors = {el: {el} for el in range(mesh.n_triangles)}
    for e in mesh.interior_edges:
        a, b = mesh.edge_tris[e]
        neighbors[a].add(b)
        neighbors[b].add(a)
    coo = A.tocoo()
    for i, j, v in zip(coo.row, coo.col, coo.data):
        if v != 0:
            assert elem_of[j] in neighbors[elem_of[i]]


def test_solvability_check_examples():
    prob = ProblemSpec(k=10.0, delta=0.25)
    fine = square_mesh(10)
    rep = solvability_check(prob, fine, uniform_degrees(fine, 1))
    assert rep.guaranteed
    assert abs(rep.value - 0.25) <= 1e-12

    coarse = square_mesh(1, lo=0.0, hi=0.4)
    rep = solvability_check(prob, coarse, uniform_degrees(coarse, 1))
    assert not rep.guaranteed
    assert abs(rep.value - 1.0) <= 1e-12


def test_zero_data_gives_zero_solution():
    mesh = square_mesh(4)
    degrees = uniform_degrees(mesh, 2)
    prob = ProblemSpec(k=2.0)
    sol = solve(assemble(prob, mesh, degrees))
    assert np.all(sol.coeffs == 0)


@pytest.mark.parametrize("n,p", [(5, 2), (6, 2)])
def test_solve_residual_and_determinism(n, p):
    """Both the dense and sparse code paths hit the residual target."""
    mesh = square_mesh(n)
    degrees = uniform_degrees(mesh, p)
    prob = plane_wave_problem(5.0)
    system = assemble(prob, mesh, degrees)
    sol = solve(system)
    res = np.linalg.norm(system.matrix @ sol.coeffs - system.rhs)
    assert res <= 1e-10 * np.linalg.norm(system.rhs)
    again = solve(assemble(prob, mesh, degrees))
    assert np.array_equal(sol.coeffs, again.coeffs)


@pytest.mark.parametrize("k,p,n", [(4.0, 1, 4), (19.0, 3, 2)])
def test_polynomial_solution_reproduced_exactly(k, p, n):
    """u* = x has polynomial data, so the solver returns it exactly."""
    def f(x, y):
        return -k * k * x + 0j

    def g(x, y, nx, ny):
        return nx + 1j * k * x

    prob = ProblemSpec(k=k, f=f, g=g)
    mesh = square_mesh(n)
    degrees = uniform_degrees(mesh, p)
    sol = solve(assemble(prob, mesh, degrees))
    want = project(mesh, degrees, lambda x, y: x + 0j).coeffs
    assert np.abs(sol.coeffs - want).max() <= 1e-8


def test_consistency_polynomial_and_affine():
    mesh = square_mesh(2)
    degrees = uniform_degrees(mesh, 2)
    k = 3.0
    lin = AffineField(0.0, 1.0, 0.0)
    prob = affine_problem(k, 0.0, 1.0, 0.0)
    assert consistency_residual(prob, lin, mesh, degrees) <= 1e-12

    rng = np.random.default_rng(11)
    a = rng.normal(size=3) + 1j * rng.normal(size=3)
    prob = affine_problem(k, *a)
    assert consistency_residual(prob, AffineField(*a), mesh, degrees) <= 1e-12


@pytest.mark.parametrize("p", [1, 2, 3])
@pytest.mark.parametrize("n", [1, 2])
def test_consistency_plane_wave(p, n):
    mesh = square_mesh(n)
    degrees = uniform_degrees(mesh, p)
    r = consistency_residual(plane_wave_problem(5.0), PlaneWave(5.0),
                             mesh, degrees)
    assert r <= 1e-8


def test_galerkin_orthogonality():
    """a(u - u_T, v_h) vanishes for every discrete test function."""
    mesh = square_mesh(3)
    degrees = uniform_degrees(mesh, 2)
    prob = plane_wave_problem(5.0)
    exact = PlaneWave(5.0)
    system = assemble(prob, mesh, degrees)
    sol = solve(system)
    w = apply_form(prob, mesh, degrees, exact.u, exact.grad)
    resid = np.abs(w - system.matrix @ sol.coeffs)
    scale = max(np.abs(w).max(), np.abs(system.rhs).max())
    assert resid.max() <= 1e-8 * scale


def test_single_element_mesh_assembles_and_solves():
    """All three edges on the boundary: no interior skeleton at all."""
    mesh = reference_triangle()
    degrees = uniform_degrees(mesh, 2)
    prob = plane_wave_problem(2.0)
    sol = solve(assemble(prob, mesh, degrees))
    assert np.all(np.isfinite(sol.coeffs))


def test_quad_order_override_never_lowers_accuracy():
    mesh = square_mesh(2)
    degrees = uniform_degrees(mesh, 2)
    prob = plane_wave_problem(5.0)
    r = consistency_residual(prob, PlaneWave(5.0), mesh, degrees,
                             quad_order=40)
    assert r <= 1e-10
