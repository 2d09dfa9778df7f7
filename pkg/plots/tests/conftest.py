"""Shared fixtures: artifacts produced by real solver runs.

The plotting package consumes the solver only through its command line
tool and file formats, so these fixtures shell out to helmdg (or to
python -m helmdg.cli when the entry point is not on PATH) and hand the
resulting files to the tests.  Everything producing artifacts is
session scoped; the runs are small but not free.
"""

import shutil
import subprocess
import sys

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import pytest


def _solver_prefix():
    exe = shutil.which("helmdg")
    if exe is not None:
        return [exe]
    probe = subprocess.run([sys.executable, "-m", "helmdg.cli", "--help"],
                           capture_output=True, text=True)
    if probe.returncode == 0:
        return [sys.executable, "-m", "helmdg.cli"]
    return None


@pytest.fixture(scope="session")
def solver():
    prefix = _solver_prefix()
    if prefix is None:
        pytest.skip("helmdg command line tool is not available")
    return prefix


def _run(solver, args, cwd):
    res = subprocess.run(solver + args, capture_output=True, text=True,
                         cwd=cwd)
    assert res.returncode == 0, res.stderr
    return res


@pytest.fixture(scope="session")
def uniform_histories(solver, tmp_path_factory):
    """History CSVs from uniform runs at two wavenumbers, same meshes."""
    root = tmp_path_factory.mktemp("uniform")
    paths = {}
    for k in (5, 20):
        out = root / f"uniform_k{k}.csv"
        _run(solver, ["run", "--example", "plane-wave", "--k", str(k),
                      "--p", "1", "--refine", "uniform",
                      "--max-steps", "8", "--out", str(out)], root)
        paths[k] = out
    return paths


@pytest.fixture(scope="session")
def adaptive_artifacts(solver, tmp_path_factory):
    """Adaptive corner-singularity run with mesh/estimator snapshots."""
    root = tmp_path_factory.mktemp("adaptive")
    out = root / "lshape.csv"
    snap = root / "snapshots"
    _run(solver, ["run", "--example", "lshape-bessel", "--k", "10",
                  "--p", "1", "--refine", "adaptive", "--theta", "0.7",
                  "--max-steps", "8", "--out", str(out),
                  "--dump-meshes", str(snap)], root)
    return {"history": out, "snapshots": snap}


@pytest.fixture(autouse=True)
def close_figures():
    yield
    plt.close("all")
