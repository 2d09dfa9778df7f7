"""Command line front end, driven in-process and via a subprocess."""

import subprocess
import sys

from dgplots.cli import main


def test_convergence_two_histories(uniform_histories, tmp_path, capsys):
    out = tmp_path / "conv.png"
    ret = main(["convergence", str(uniform_histories[5]),
                str(uniform_histories[20]), "--kind", "error",
                "--label", "k=5", "--label", "k=20", "--out", str(out)])
    assert ret == 0
    assert out.exists() and out.stat().st_size > 0
    assert f"wrote {out}" in capsys.readouterr().out


def test_convergence_ratio_and_dofs(uniform_histories, tmp_path):
    out = tmp_path / "ratio.png"
    ret = main(["convergence", str(uniform_histories[5]), "--kind", "ratio",
                "--x", "dofs", "--out", str(out)])
    assert ret == 0
    assert out.exists()


def test_mesh_heatmap(adaptive_artifacts, tmp_path):
    snap = adaptive_artifacts["snapshots"]
    out = tmp_path / "mesh.png"
    ret = main(["mesh", str(snap / "mesh_0000.txt"),
                "--values", str(snap / "estimate_0000.csv"),
                "--column", "eta_check", "--out", str(out)])
    assert ret == 0
    assert out.exists() and out.stat().st_size > 0


def test_sizes(adaptive_artifacts, tmp_path):
    out = tmp_path / "sizes.png"
    ret = main(["sizes", str(adaptive_artifacts["history"]),
                "--out", str(out)])
    assert ret == 0
    assert out.exists()


def test_missing_input_fails(tmp_path, capsys):
    ret = main(["convergence", str(tmp_path / "nope.csv"),
                "--out", str(tmp_path / "x.png")])
    assert ret == 1
    assert "error:" in capsys.readouterr().err


def test_foreign_header_fails(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("step,error\n0,1.0\n")
    ret = main(["convergence", str(bad), "--out", str(tmp_path / "x.png")])
    assert ret == 1
    assert "error:" in capsys.readouterr().err


def test_estimator_kind_via_subprocess(uniform_histories, tmp_path):
    out = tmp_path / "est.png"
    res = subprocess.run(
        [sys.executable, "-m", "dgplots.cli", "convergence",
         str(uniform_histories[20]), "--kind", "estimator",
         "--out", str(out)],
        capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
    assert "wrote" in res.stdout
    assert out.exists() and out.stat().st_size > 0
