"""Figure builders for solver histories and mesh snapshots.

Each function draws on a matplotlib Axes (created on demand), returns
it, and optionally saves the figure, so the same code serves scripts
and the command line tool.  Inputs are always file paths in the
solver's output formats; no quantity is recomputed here.
"""

import os

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.tri import Triangulation

from .io import read_history, read_mesh

CONVERGENCE_KINDS = ("error", "ratio", "estimator")

_Y_LABELS = {
    "error": "relative error",
    "ratio": "error / practical estimator",
    "estimator": "practical estimator",
}


def _default_label(path):
    return os.path.splitext(os.path.basename(str(path)))[0]


def _series(run, kind):
    if kind == "error":
        return run.err_ht
    if kind == "estimator":
        return run.eta_check
    with np.errstate(divide="ignore", invalid="ignore"):
        return run.err_ht / run.eta_check


def _finish(ax, out):
    if out is not None:
        ax.figure.savefig(out, dpi=150, bbox_inches="tight")
    return ax


def plot_convergence(history_paths, kind="error", x="step", labels=None,
                     ax=None, out=None):
    """Log-scaled multi-series convergence figure.

    kind selects the quantity per step: "error" plots the relative
    error column, "estimator" the practical estimator, "ratio" their
    quotient err_ht / eta_check (with a reference line at 1).  x is
    "step" for refinement-step abscissa or "dofs" for a log-log plot
    against degrees of freedom.
    """
    if kind not in CONVERGENCE_KINDS:
        raise ValueError(f"unknown kind {kind!r}, "
                         f"expected one of {CONVERGENCE_KINDS}")
    if x not in ("step", "dofs"):
        raise ValueError(f"unknown abscissa {x!r}, expected step or dofs")
    history_paths = list(history_paths)
    if labels is None:
        labels = [_default_label(p) for p in history_paths]
    elif len(labels) != len(history_paths):
        raise ValueError("need one label per history")
    if ax is None:
        _, ax = plt.subplots(figsize=(5.5, 4.0))

    for path, label in zip(history_paths, labels):
        run = read_history(path)
        xs = run.step if x == "step" else run.ndofs
        ax.semilogy(xs, _series(run, kind), marker="o", markersize=3.5,
                    label=label)
    if x == "dofs":
        ax.set_xscale("log")
        ax.set_xlabel("degrees of freedom")
    else:
        ax.set_xlabel("refinement step")
    if kind == "ratio":
        ax.axhline(1.0, color="k", linewidth=0.8, linestyle=":")
    ax.set_ylabel(_Y_LABELS[kind])
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    return _finish(ax, out)


def plot_mesh(mesh_path, values=None, value_label=None, ax=None, out=None):
    """Triangle wireframe, or a per-element heatmap when values given.

    values must hold one number per triangle (for instance a column of
    the matching estimator CSV); value_label captions its colorbar.
    """
    mesh = read_mesh(mesh_path)
    tri = Triangulation(mesh.vertices[:, 0], mesh.vertices[:, 1],
                        mesh.triangles)
    if ax is None:
        _, ax = plt.subplots(figsize=(4.8, 4.8))
    if values is None:
        ax.triplot(tri, color="k", linewidth=0.5)
    else:
        values = np.asarray(values, dtype=float)
        if values.shape != (mesh.n_triangles,):
            raise ValueError(f"need one value per element, got "
                             f"{values.shape} for {mesh.n_triangles} "
                             "triangles")
        poly = ax.tripcolor(tri, facecolors=values, edgecolors="k",
                            linewidth=0.15)
        cbar = ax.figure.colorbar(poly, ax=ax, shrink=0.85)
        if value_label is not None:
            cbar.set_label(value_label)
    ax.set_aspect("equal")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    return _finish(ax, out)


def plot_size_history(history_path, ax=None, out=None):
    """Largest and smallest edge lengths and their ratio per step."""
    run = read_history(history_path)
    if ax is None:
        _, ax = plt.subplots(figsize=(5.5, 4.0))
    ax.semilogy(run.step, run.hmax, marker="o", markersize=3.5,
                label="h_max")
    ax.semilogy(run.step, run.hmin, marker="s", markersize=3.5,
                label="h_min")
    ax.semilogy(run.step, run.hmax / run.hmin, marker="^", markersize=3.5,
                label="h_max / h_min")
    ax.set_xlabel("refinement step")
    ax.set_ylabel("edge length")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    return _finish(ax, out)
