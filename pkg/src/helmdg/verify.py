"""Built-in verification suites for quick health checks from the CLI.

Each suite returns (name, passed, detail).  The quadrature suite
accepts an optional corruption hook that perturbs a private copy of the
rule tables; it exists so the overall harness can be shown to fail when
fed wrong weights.  Cached rule arrays are immutable and never touched.
"""

import numpy as np

from .adaptivity import doerfler_mark, minimality_certificate
from .assemble import assemble, consistency_residual, solve
from .benchmarks import example1
from .estimator import estimate
from .mesh import build_mesh, l_shape_mesh, refine, square_mesh, \
    uniform_degrees
from .problem import ProblemSpec
from .quadrature import edge_rule, triangle_rule
from .solution import project

__all__ = ["run_suites"]


def _exact_triangle_integral(a, b):
    import math
    return math.factorial(a) * math.factorial(b) / math.factorial(a + b + 2)


def quadrature_suite(corrupt=False):
    worst = 0.0
    for degree in range(0, 13):
        rule = triangle_rule(degree)
        pts, w = rule.points, rule.weights
        if corrupt:
            w = w.copy()
            w[0] *= 1.0 + 1e-6
        for a in range(degree + 1):
            for b in range(degree + 1 - a):
                got = float(np.sum(w * pts[:, 0] ** a * pts[:, 1] ** b))
                want = _exact_triangle_integral(a, b)
                worst = max(worst, abs(got - want) / want)
        erule = edge_rule(degree)
        ew = erule.weights.copy() if corrupt else erule.weights
        if corrupt:
            ew[0] *= 1.0 + 1e-6
        for a in range(degree + 1):
            got = float(np.sum(ew * erule.points ** a))
            worst = max(worst, abs(got - 1.0 / (a + 1)) * (a + 1))
    return ("quadrature-exactness", worst <= 1e-12,
            f"worst relative defect {worst:.2e}")


def consistency_suite():
    worst = 0.0
    for p in (1, 2):
        bench = example1(5.0)
        mesh = bench.initial_mesh(2)
        r = consistency_residual(bench.problem, bench.exact, mesh,
                                 uniform_degrees(mesh, p))
        worst = max(worst, r)
    return ("consistency-residual", worst <= 1e-8,
            f"worst residual {worst:.2e}")


def random_marking_instance(rng):
    """Masses on a dyadic grid so every subset sum is exact in floats.

    20-bit integers scaled by 2**-20 keep all partial sums well inside
    the 53-bit significand, which makes the exhaustive feasibility
    check below independent of summation order.  A sprinkling of exact
    zeros exercises the rule that zero-mass elements are never marked.
    """
    n = int(rng.integers(1, 13))
    vals = rng.integers(0, 2 ** 20, size=n).astype(float)
    vals[rng.random(n) < 0.15] = 0.0
    if vals.sum() == 0.0:
        vals[0] = 1.0
    return vals * 2.0 ** -20


def marking_suite(seed=0, instances=200):
    rng = np.random.default_rng(seed)
    thetas = (0.3, 0.5, 0.7, 1.0)
    mismatches = 0
    for i in range(instances):
        vals = random_marking_instance(rng)
        theta = thetas[i % len(thetas)]
        mark = doerfler_mark(vals, theta)
        best = _exhaustive_min_cardinality(vals, theta * vals.sum())
        ok = (len(mark.elements) == best
              and minimality_certificate(vals, theta, mark.elements))
        mismatches += 0 if ok else 1
    return ("marking-oracle", mismatches == 0,
            f"{instances - mismatches}/{instances} matched")


def _exhaustive_min_cardinality(vals, target):
    n = len(vals)
    masks = np.arange(1, 2 ** n, dtype=np.uint32)
    bits = ((masks[:, None] >> np.arange(n)) & 1).astype(bool)
    mass = bits @ vals
    sizes = bits.sum(axis=1)
    feasible = mass >= target
    return int(sizes[feasible].min()) if feasible.any() else n + 1


def conformity_suite(seed=0):
    rng = np.random.default_rng(seed)
    mesh = l_shape_mesh(2)
    degrees = uniform_degrees(mesh, 1)
    try:
        for _ in range(8):
            nmark = max(1, mesh.n_triangles // 4)
            marked = rng.choice(mesh.n_triangles, size=nmark, replace=False)
            mesh, degrees, _ = refine(mesh, degrees, marked)
            build_mesh(mesh.vertices, mesh.triangles, validate=True)
    except Exception as exc:
        return ("refinement-conformity", False, f"validation failed: {exc}")
    return ("refinement-conformity", True,
            f"{mesh.n_triangles} elements after 8 random sweeps")


def polynomial_suite():
    k = 6.0
    prob = ProblemSpec(k=k, f=lambda x, y: -k * k * x + 0j,
                       g=lambda x, y, nx, ny: nx + 1j * k * x)
    worst_coeff = 0.0
    worst_eta = 0.0
    for p in (1, 2):
        mesh = square_mesh(2)
        degrees = uniform_degrees(mesh, p)
        sol = solve(assemble(prob, mesh, degrees))
        want = project(mesh, degrees, lambda x, y: x + 0j).coeffs
        worst_coeff = max(worst_coeff,
                          float(np.abs(sol.coeffs - want).max()))
        rep = estimate(sol)
        worst_eta = max(worst_eta, rep.eta_global, rep.eta_check_global)
    ok = worst_coeff <= 1e-8 and worst_eta <= 1e-9
    return ("polynomial-exactness", ok,
            f"coefficient defect {worst_coeff:.2e}, "
            f"estimator floor {worst_eta:.2e}")


def run_suites(seed=0, corrupt_quadrature=False):
    """Run all suites; returns the list of (name, passed, detail)."""
    return [
        quadrature_suite(corrupt=corrupt_quadrature),
        consistency_suite(),
        marking_suite(seed=seed),
        conformity_suite(seed=seed),
        polynomial_suite(),
    ]
