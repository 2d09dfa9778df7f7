"""Doerfler marking and the SOLVE -> ESTIMATE -> MARK -> REFINE loop.

The driver assembles and solves, estimates, records a history row, then
marks and refines until a stopping rule fires.  History rows are taken
before refinement, so row 0 always describes the initial mesh, and a
max_steps of zero yields exactly one row.  Marking operates on the
squared practical estimators: the marked set is the shortest prefix of
elements ordered by decreasing squared value whose mass reaches the
theta fraction of the total, with ties broken by element index.
"""

import os
import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from .assemble import assemble, solvability_check, solve
from .estimator import estimate, write_estimator_csv
from .mesh import refine, shape_regularity, write_mesh
from .norms import ht_error

__all__ = [
    "MarkResult", "doerfler_mark", "minimality_certificate", "StopRule",
    "HistoryRecord", "RefinementHistory", "AdaptResult", "adapt",
    "write_history_csv", "read_history_csv", "HISTORY_COLUMNS",
    "NonDecreasingEstimatorWarning",
]

HISTORY_COLUMNS = ("step", "nelems", "ndofs", "hmax", "hmin", "rho", "mkhp",
                   "eta_check", "eta", "osc", "err_ht", "solvable",
                   "seconds")


class NonDecreasingEstimatorWarning(UserWarning):
    """The marking quantity failed to decrease for many steps."""


@dataclass
class MarkResult:
    """Marked element ids (ascending), their mass share, and whether
    marking degenerated because every estimator was zero."""

    elements: np.ndarray
    mass_fraction: float
    all_zero: bool


def _greedy_order(values):
    order = np.argsort(-values, kind="stable")
    csum = np.cumsum(values[order])
    return order, csum


def doerfler_mark(local_squared, theta):
    """Minimum-cardinality bulk marking on squared local estimators."""
    vals = np.asarray(local_squared, dtype=float)
    if not 0.0 < theta <= 1.0:
        raise ValueError(f"theta must lie in (0, 1], got {theta}")
    if vals.size == 0:
        raise ValueError("no elements to mark")
    if not np.all(np.isfinite(vals)) or np.any(vals < 0.0):
        raise ValueError("estimator masses must be finite and nonnegative")
    order, csum = _greedy_order(vals)
    total = float(csum[-1])
    if total == 0.0:
        return MarkResult(elements=np.empty(0, dtype=np.int64),
                          mass_fraction=0.0, all_zero=True)
    target = theta * total
    m = int(np.searchsorted(csum, target, side="left")) + 1
    m = min(m, vals.size)
    elements = np.sort(order[:m]).astype(np.int64)
    return MarkResult(elements=elements,
                      mass_fraction=float(csum[m - 1] / total),
                      all_zero=False)


def minimality_certificate(local_squared, theta, marked):
    """True when marked is the greedy prefix, meets the theta mass, and
    would miss it with its smallest member removed."""
    vals = np.asarray(local_squared, dtype=float)
    marked = np.asarray(marked, dtype=np.int64)
    order, csum = _greedy_order(vals)
    total = float(csum[-1]) if vals.size else 0.0
    if total == 0.0:
        return marked.size == 0
    m = marked.size
    if m == 0 or m > vals.size:
        return False
    if not np.array_equal(np.sort(marked), np.sort(order[:m])):
        return False
    target = theta * total
    return csum[m - 1] >= target and (m == 1 or csum[m - 2] < target)


@dataclass
class StopRule:
    """First-satisfied stopping criteria; at least one must be set."""

    max_steps: object = None
    max_dofs: object = None
    target_eta: object = None

    def __post_init__(self):
        if (self.max_steps is None and self.max_dofs is None
                and self.target_eta is None):
            raise ValueError("set at least one stopping criterion")

    def reason(self, step, ndofs, eta_check):
        if self.max_steps is not None and step >= self.max_steps:
            return "max-steps"
        if self.max_dofs is not None and ndofs >= self.max_dofs:
            return "max-dofs"
        if self.target_eta is not None and eta_check <= self.target_eta:
            return "target-eta"
        return None


@dataclass
class HistoryRecord:
    step: int
    nelems: int
    ndofs: int
    hmax: float
    hmin: float
    rho: float
    mkhp: float
    eta_check: float
    eta: float
    osc: float
    err_ht: float
    solvable: float
    seconds: float


@dataclass
class RefinementHistory:
    records: list = field(default_factory=list)

    def column(self, name):
        return np.array([getattr(r, name) for r in self.records])

    def __len__(self):
        return len(self.records)


@dataclass
class AdaptResult:
    history: RefinementHistory
    mesh: object
    degrees: object
    solution: object
    report: object
    stop_reason: str


def adapt(prob, mesh, degrees, theta=0.7, stop=None, mode="adaptive",
          exact=None, snapshot_dir=None, quad_order=None):
    """Run the refinement loop and return its full history.

    mode "adaptive" marks by the Doerfler rule on squared practical
    estimators; mode "uniform" marks every element each step.  exact, if
    given, supplies u and grad for the relative error column; otherwise
    err_ht is recorded as nan.  snapshot_dir, if given, receives one
    mesh file and one per-element estimator CSV per step.
    """
    if mode not in ("adaptive", "uniform"):
        raise ValueError(f"unknown mode {mode!r}")
    if stop is None:
        stop = StopRule(max_steps=10)
    if snapshot_dir is not None:
        os.makedirs(snapshot_dir, exist_ok=True)

    history = RefinementHistory()
    stop_reason = "all-zero-estimators"
    prev_eta = np.inf
    stagnant = 0
    warned = False
    step = 0
    while True:
        t0 = time.perf_counter()
        system = assemble(prob, mesh, degrees, quad_order)
        sol = solve(system)
        report = estimate(sol, prob, quad_order)
        margin = solvability_check(prob, mesh, degrees).value
        if exact is not None:
            err = ht_error(sol, exact, prob, quad_order).relative
        else:
            err = float("nan")
        seconds = time.perf_counter() - t0
        eta_check = report.eta_check_global
        history.records.append(HistoryRecord(
            step=step, nelems=mesh.n_triangles, ndofs=system.layout.total,
            hmax=float(mesh.h_max), hmin=float(mesh.h_min_edge),
            rho=float(shape_regularity(mesh)), mkhp=float(report.kh_over_p),
            eta_check=float(eta_check), eta=float(report.eta_global),
            osc=float(report.osc_global), err_ht=float(err),
            solvable=float(margin), seconds=float(seconds)))
        if snapshot_dir is not None:
            write_mesh(mesh, os.path.join(snapshot_dir,
                                          f"mesh_{step:04d}.txt"))
            write_estimator_csv(report, os.path.join(
                snapshot_dir, f"estimate_{step:04d}.csv"))

        if eta_check >= prev_eta:
            stagnant += 1
            if stagnant > 5 and not warned:
                warnings.warn("practical estimator has not decreased for "
                              f"{stagnant} consecutive steps",
                              NonDecreasingEstimatorWarning, stacklevel=2)
                warned = True
        else:
            stagnant = 0
        prev_eta = eta_check

        reason = stop.reason(step, system.layout.total, eta_check)
        if reason is not None:
            stop_reason = reason
            break

        if mode == "uniform":
            marked = np.arange(mesh.n_triangles, dtype=np.int64)
        else:
            mark = doerfler_mark(report.eta_check ** 2, theta)
            if mark.all_zero:
                break
            marked = mark.elements
        mesh, degrees, _ = refine(mesh, degrees, marked)
        step += 1

    return AdaptResult(history=history, mesh=mesh, degrees=degrees,
                       solution=sol, report=report, stop_reason=stop_reason)


def write_history_csv(history, path):
    """Serialize a history with the documented column layout."""
    with open(path, "w") as fh:
        fh.write(",".join(HISTORY_COLUMNS) + "\n")
        for r in history.records:
            vals = [str(r.step), str(r.nelems), str(r.ndofs)]
            vals += [f"{getattr(r, c):.12g}" for c in HISTORY_COLUMNS[3:]]
            fh.write(",".join(vals) + "\n")


def read_history_csv(path):
    """Parse a history CSV written by write_history_csv."""
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        if tuple(header) != HISTORY_COLUMNS:
            raise ValueError(f"unexpected history header {header}")
        history = RefinementHistory()
        for line in fh:
            if not line.strip():
                continue
            parts = line.strip().split(",")
            history.records.append(HistoryRecord(
                step=int(parts[0]), nelems=int(parts[1]),
                ndofs=int(parts[2]),
                **{c: float(v) for c, v in zip(HISTORY_COLUMNS[3:],
                                               parts[3:])}))
    return history
