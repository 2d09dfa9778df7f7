"""Command line front end for running benchmarks and verification.

    helmdg run --example plane-wave --k 5 --p 1 --refine adaptive \
        --theta 0.7 --max-steps 10 --out history.csv
    helmdg verify

run executes the refinement loop on one of the registered benchmark
problems and writes the history CSV (columns: step,nelems,ndofs,hmax,
hmin,rho,mkhp,eta_check,eta,osc,err_ht,solvable,seconds).  verify runs
the built-in property suites and exits nonzero on any failure.
"""

import argparse
import sys

from .adaptivity import StopRule, adapt, write_history_csv
from .assemble import solvability_check
from .benchmarks import REGISTRY, example4
from .mesh import uniform_degrees
from .verify import run_suites


def build_parser():
    parser = argparse.ArgumentParser(
        prog="helmdg",
        description="Adaptive dG solver for the Helmholtz impedance "
                    "problem on polygons.")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a benchmark experiment")
    run_p.add_argument("--example", required=True,
                       choices=sorted(REGISTRY))
    run_p.add_argument("--k", type=float, default=5.0,
                       help="wavenumber (single-k examples)")
    run_p.add_argument("--k1", type=float, default=10.0,
                       help="wavenumber inside the disc (piecewise-k)")
    run_p.add_argument("--k2", type=float, default=1.0,
                       help="wavenumber outside the disc (piecewise-k)")
    run_p.add_argument("--variant", choices=("g1", "g2"), default="g1",
                       help="boundary datum variant (piecewise-k)")
    run_p.add_argument("--p", type=int, default=1,
                       help="uniform polynomial degree, at least 1")
    run_p.add_argument("--refine", choices=("uniform", "adaptive"),
                       default="adaptive")
    run_p.add_argument("--theta", type=float, default=0.7,
                       help="Doerfler bulk parameter in (0, 1]")
    run_p.add_argument("--alpha", type=float, default=30.0)
    run_p.add_argument("--beta", type=float, default=1.0)
    run_p.add_argument("--delta", type=float, default=0.25)
    run_p.add_argument("--init-res", type=int, default=None,
                       help="initial mesh resolution (example-specific)")
    run_p.add_argument("--max-steps", type=int, default=None)
    run_p.add_argument("--max-dofs", type=int, default=None)
    run_p.add_argument("--target-eta", type=float, default=None)
    run_p.add_argument("--quad-order", type=int, default=None,
                       help="raise the data quadrature exactness degree")
    run_p.add_argument("--out", default="history.csv",
                       help="history CSV path")
    run_p.add_argument("--dump-meshes", default=None, metavar="DIR",
                       help="write per-step mesh and estimator snapshots")
    run_p.add_argument("--seed", type=int, default=0,
                       help="seed for randomized checks (unused by run)")

    ver_p = sub.add_parser("verify", help="run built-in property suites")
    ver_p.add_argument("--seed", type=int, default=0)
    ver_p.add_argument("--corrupt-quadrature", action="store_true",
                       help="negative control: perturb a copy of the "
                            "quadrature weights and expect a failure")
    return parser


def make_benchmark(args):
    if args.example == "piecewise-k":
        return example4(variant=args.variant, k1=args.k1, k2=args.k2,
                        alpha=args.alpha, beta=args.beta, delta=args.delta)
    factory = REGISTRY[args.example]
    return factory(args.k, alpha=args.alpha, beta=args.beta,
                   delta=args.delta)


def run_command(args):
    if args.p < 1:
        raise ValueError("--p must be at least 1")
    if not 0.0 < args.theta <= 1.0:
        raise ValueError("--theta must lie in (0, 1]")
    bench = make_benchmark(args)
    res = args.init_res if args.init_res is not None else bench.default_res
    mesh = bench.initial_mesh(res)
    degrees = uniform_degrees(mesh, args.p)
    if (args.max_steps is None and args.max_dofs is None
            and args.target_eta is None):
        stop = StopRule(max_steps=10)
    else:
        stop = StopRule(max_steps=args.max_steps, max_dofs=args.max_dofs,
                        target_eta=args.target_eta)

    result = adapt(bench.problem, mesh, degrees, theta=args.theta,
                   stop=stop, mode=args.refine, exact=bench.exact,
                   snapshot_dir=args.dump_meshes,
                   quad_order=args.quad_order)
    write_history_csv(result.history, args.out)

    last = result.history.records[-1]
    final_check = solvability_check(bench.problem, result.mesh,
                                    result.degrees)
    rows = [
        ("example", bench.name),
        ("mode", f"{args.refine} (theta={args.theta:g})"),
        ("steps", str(last.step + 1)),
        ("stop reason", result.stop_reason),
        ("elements", str(last.nelems)),
        ("DOFs", str(last.ndofs)),
        ("eta_check", f"{last.eta_check:.6g}"),
        ("eta", f"{last.eta:.6g}"),
        ("err_ht (rel)", f"{last.err_ht:.6g}"),
        ("M_kh/p", f"{last.mkhp:.6g}"),
        ("solvability", f"{final_check.value:.6g} "
         + ("(guaranteed)" if final_check.guaranteed else "(not "
            "guaranteed)")),
        ("history", args.out),
    ]
    width = max(len(k) for k, _ in rows)
    for key, val in rows:
        print(f"{key:<{width}}  {val}")
    return 0


def verify_command(args):
    results = run_suites(seed=args.seed,
                         corrupt_quadrature=args.corrupt_quadrature)
    failed = 0
    for name, ok, detail in results:
        status = "PASS" if ok else "FAIL"
        print(f"{status}  {name}: {detail}")
        failed += 0 if ok else 1
    if failed:
        print(f"{failed} suite(s) failed")
        return 1
    print("all suites passed")
    return 0


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return run_command(args)
        return verify_command(args)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
