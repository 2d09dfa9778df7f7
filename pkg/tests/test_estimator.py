"""Tests for the residual error estimator and data oscillations."""

import numpy as np
import pytest

from helmdg.assemble import assemble, dof_layout, solve
from helmdg.estimator import (estimate, internal_residual, edge_residual,
                              oscillations, practical_estimator,
                              project_element_data, trace_residual,
                              write_estimator_csv)
from helmdg.mesh import build_mesh, l_shape_mesh, square_mesh, uniform_degrees
from helmdg.problem import ProblemSpec
from helmdg.quadrature import triangle_rule
from helmdg.solution import DgSolution, project


def reference_triangle():
    return build_mesh(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]),
                      np.array([[0, 1, 2]]))


def unit_interior_edge_mesh():
    """Two triangles sharing the unit-length edge (0,0)-(1,0)."""
    verts = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, 1.0], [0.5, -1.0]])
    tris = np.array([[0, 1, 2], [1, 0, 3]])
    return build_mesh(verts, tris)


def zero_solution(mesh, degrees, prob):
    layout = dof_layout(degrees)
    return DgSolution(coeffs=np.zeros(layout.total, dtype=complex),
                      mesh=mesh, degrees=degrees, layout=layout,
                      problem=prob)


def indicator_solution(mesh, degrees, prob, element):
    """Field equal to 1 on one element and 0 elsewhere."""
    layout = dof_layout(degrees)
    c = np.zeros(layout.total, dtype=complex)
    cone = project(mesh, degrees, lambda x, y: np.ones_like(x)).coeffs
    c[layout.block(element)] = cone[layout.block(element)]
    return DgSolution(coeffs=c, mesh=mesh, degrees=degrees, layout=layout,
                      problem=prob)


def test_internal_residual_hand_value():
    """v = 0, f = 1 on the reference triangle, h = sqrt(2), p = 1:
    eta_R = sqrt(2) * sqrt(1/2) = 1."""
    mesh = reference_triangle()
    degrees = uniform_degrees(mesh, 1)
    prob = ProblemSpec(k=1.0,
                       f=lambda x, y: np.ones_like(x, dtype=complex))
    rep = estimate(zero_solution(mesh, degrees, prob))
    assert abs(rep.eta_r[0] - 1.0) <= 1e-12


def test_internal_residual_linear_no_laplacian():
    """At p = 1 the Laplacian vanishes: eta_R = (h/p) ||k^2 v + f||."""
    mesh = reference_triangle()
    degrees = uniform_degrees(mesh, 1)
    k = 2.0
    prob = ProblemSpec(k=k)
    sol = project(mesh, degrees, lambda x, y: x + 0j, problem=prob)
    got = internal_residual(sol, 0)
    want = np.sqrt(2.0) * k * k * np.sqrt(1.0 / 12.0)
    assert abs(got - want) <= 1e-12


def test_trace_residual_hand_value_and_alpha_scaling():
    """Unit jump across a unit edge, alpha = 30, p = 1:
    eta_J = sqrt(30 / 2) on each neighbor; doubling alpha scales by
    sqrt(2)."""
    mesh = unit_interior_edge_mesh()
    degrees = uniform_degrees(mesh, 1)
    prob = ProblemSpec(k=1.0, alpha=30.0)
    sol = indicator_solution(mesh, degrees, prob, 0)
    rep = estimate(sol)
    want = np.sqrt(30.0 / 2.0)
    assert np.abs(rep.eta_j - want).max() <= 1e-12

    bumped = ProblemSpec(k=1.0, alpha=60.0)
    rep2 = estimate(sol, prob=bumped)
    assert np.abs(rep2.eta_j - np.sqrt(2.0) * rep.eta_j).max() <= 1e-12


def test_trace_residual_zero_for_continuous_field():
    mesh = square_mesh(2)
    degrees = uniform_degrees(mesh, 2)
    prob = ProblemSpec(k=2.0)
    sol = project(mesh, degrees, lambda x, y: x * y + 0j, problem=prob)
    rep = estimate(sol)
    assert rep.eta_j.max() <= 1e-12
    assert trace_residual(sol, 0) <= 1e-12


def test_edge_residual_indicator_hand_value():
    """Indicator field, p = 1, k = 1, g = 0 on the unit square: gradient
    jumps vanish, and each boundary edge of the carrying element adds
    h_e^2 |i k v|^2 = 1 to eta_E squared."""
    mesh = square_mesh(1)
    degrees = uniform_degrees(mesh, 1)
    prob = ProblemSpec(k=1.0)
    sol = indicator_solution(mesh, degrees, prob, 0)
    rep = estimate(sol)
    nbnd = np.zeros(mesh.n_triangles)
    for e in mesh.boundary_edges:
        nbnd[mesh.edge_tris[e, 0]] += 1.0
    want = np.where(np.arange(mesh.n_triangles) == 0, np.sqrt(nbnd), 0.0)
    assert np.abs(rep.eta_e - want).max() <= 1e-12
    assert edge_residual(sol, 0) == pytest.approx(rep.eta_e[0])


def test_edge_residual_zero_when_g_matches():
    """Continuous piecewise linear v with g = dn v + i k v exactly."""
    mesh = square_mesh(2)
    degrees = uniform_degrees(mesh, 1)
    k = 2.0

    def g(x, y, nx, ny):
        return 2.0 * nx - 1.0 * ny + 1j * k * (2.0 * x - y)

    prob = ProblemSpec(k=k, g=g)
    sol = project(mesh, degrees, lambda x, y: 2.0 * x - y + 0j, problem=prob)
    rep = estimate(sol)
    assert rep.eta_e.max() <= 1e-10


def test_practical_estimator_identity_at_p1():
    mesh = square_mesh(2)
    degrees = uniform_degrees(mesh, 1)
    prob = ProblemSpec(k=3.0, f=lambda x, y: x + 1j * y,
                       g=lambda x, y, nx, ny: np.cos(x + y) + 0j)
    sol = solve(assemble(prob, mesh, degrees))
    rep = estimate(sol)
    lhs = rep.eta_check ** 2
    rhs = rep.eta_r ** 2 + rep.eta_e ** 2
    assert np.abs(lhs - rhs).max() <= 1e-12 * max(rhs.max(), 1.0)
    assert practical_estimator(sol, 1) == pytest.approx(rep.eta_check[1])


def test_polynomial_solution_all_estimators_vanish():
    k = 7.0
    prob = ProblemSpec(k=k, f=lambda x, y: -k * k * x + 0j,
                       g=lambda x, y, nx, ny: nx + 1j * k * x)
    mesh = square_mesh(3)
    degrees = uniform_degrees(mesh, 2)
    rep = estimate(solve(assemble(prob, mesh, degrees)))
    assert rep.eta_global <= 1e-9
    assert rep.eta_check_global <= 1e-9
    assert rep.osc_global <= 1e-10
    assert abs(rep.eta_global - rep.eta_mod_global) <= 1e-10


def test_pythagorean_aggregation():
    mesh = square_mesh(2)
    degrees = uniform_degrees(mesh, 2)
    prob = ProblemSpec(k=4.0, f=lambda x, y: np.exp(x) + 0j,
                       g=lambda x, y, nx, ny: np.sin(3 * x + y) + 0j)
    rep = estimate(solve(assemble(prob, mesh, degrees)))
    for arr, glob in ((rep.eta, rep.eta_global),
                      (rep.eta_check, rep.eta_check_global),
                      (rep.osc, rep.osc_global)):
        assert abs(glob ** 2 - np.sum(arr ** 2)) <= 1e-12 * max(glob ** 2, 1.0)
    assert np.all(np.isfinite(rep.eta))
    assert np.all(rep.eta >= 0)
    comp = rep.eta_r ** 2 + rep.eta_e ** 2 + rep.eta_j ** 2
    assert np.abs(rep.eta ** 2 - comp).max() <= 1e-12 * max(comp.max(), 1.0)


def test_oscillations_polynomial_data_vanish():
    mesh = square_mesh(2)
    degrees = uniform_degrees(mesh, 2)
    prob = ProblemSpec(k=2.0, f=lambda x, y: x * x - y + 1j * x,
                       g=lambda x, y, nx, ny: x - 2j * y)
    rep = estimate(zero_solution(mesh, degrees, prob))
    assert rep.osc_global <= 1e-10
    assert oscillations(prob, mesh, degrees, 0) <= 1e-10


def test_oscillation_projection_constant_hand_value():
    """f = x projected onto constants on the reference triangle:
    f_T = 1/3 and ||f - f_T|| = 1/6."""
    mesh = reference_triangle()
    degrees = uniform_degrees(mesh, 1)
    prob = ProblemSpec(k=1.0, f=lambda x, y: x + 0j)
    coeffs, _ = project_element_data(prob, mesh, degrees, p_override=0)
    const = coeffs[0][0] * np.sqrt(2.0)
    assert abs(const - 1.0 / 3.0) <= 1e-12

    rule = triangle_rule(6)
    diff2 = np.sum(rule.weights * (rule.points[:, 0] - 1.0 / 3.0) ** 2)
    assert abs(np.sqrt(diff2 * 2.0 * 0.5) - 1.0 / 6.0) <= 1e-12


def test_modified_estimator_within_twice_oscillation():
    mesh = square_mesh(3)
    degrees = uniform_degrees(mesh, 1)
    prob = ProblemSpec(k=3.0,
                       f=lambda x, y: np.exp(np.sin(5 * x) + y) + 0j,
                       g=lambda x, y, nx, ny: np.cos(7 * x * y) + 0j)
    rep = estimate(solve(assemble(prob, mesh, degrees)))
    assert abs(rep.eta_global - rep.eta_mod_global) <= 2.0 * rep.osc_global


def test_zero_data_zero_estimators():
    mesh = square_mesh(2)
    degrees = uniform_degrees(mesh, 2)
    prob = ProblemSpec(k=2.0)
    rep = estimate(solve(assemble(prob, mesh, degrees)))
    for arr in (rep.eta, rep.eta_check, rep.eta_mod, rep.osc):
        assert arr.max() == 0.0


def test_relabeling_invariance():
    """Reversing the element order flips jump orientations; every
    estimator value must follow the permutation unchanged."""
    mesh = square_mesh(2)
    perm = np.arange(mesh.n_triangles)[::-1]
    mesh2 = build_mesh(mesh.vertices.copy(), mesh.triangles[perm])
    prob = ProblemSpec(k=3.0, f=lambda x, y: x + 2j * y,
                       g=lambda x, y, nx, ny: np.sin(x - y) + 0j)
    rep1 = estimate(solve(assemble(prob, mesh,
                                   uniform_degrees(mesh, 1))))
    rep2 = estimate(solve(assemble(prob, mesh2,
                                   uniform_degrees(mesh2, 1))))
    assert abs(rep1.eta_global - rep2.eta_global) <= 1e-10
    assert np.abs(np.sort(rep1.eta) - np.sort(rep2.eta)).max() <= 1e-10
    assert np.abs(np.sort(rep1.eta_j) - np.sort(rep2.eta_j)).max() <= 1e-10


def test_singular_point_flagging():
    mesh = l_shape_mesh(2)
    degrees = uniform_degrees(mesh, 1)
    prob = ProblemSpec(k=2.0, singular_points=((0.0, 0.0),))
    rep = estimate(zero_solution(mesh, degrees, prob))
    touches = np.any(
        np.all(np.abs(mesh.vertices[mesh.triangles]) <= 1e-12, axis=2),
        axis=1)
    assert np.array_equal(rep.singular, touches)
    assert rep.singular.any()
    assert not rep.singular.all()


def test_report_records_resolution_measure():
    mesh = square_mesh(2)
    degrees = uniform_degrees(mesh, 2)
    prob = ProblemSpec(k=4.0)
    rep = estimate(zero_solution(mesh, degrees, prob))
    want = 4.0 * mesh.h_max / 2.0
    assert rep.kh_over_p == pytest.approx(want, rel=1e-12)


def test_csv_export(tmp_path):
    mesh = square_mesh(1)
    degrees = uniform_degrees(mesh, 1)
    prob = ProblemSpec(k=2.0, f=lambda x, y: x + 0j)
    rep = estimate(zero_solution(mesh, degrees, prob))
    path = tmp_path / "estimate.csv"
    write_estimator_csv(rep, path)
    lines = path.read_text().strip().split("\n")
    assert lines[0] == "element,eta_r,eta_e,eta_j,eta,eta_check,osc"
    assert len(lines) == mesh.n_triangles + 1
    row = lines[1].split(",")
    assert int(row[0]) == 0
    assert float(row[1]) == pytest.approx(rep.eta_r[0], rel=1e-10)
