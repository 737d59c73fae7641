import json
import subprocess
import sys

import pytest

from neumann_steklov.cli import main
from neumann_steklov.fem import DiskMesh


def test_lemma_checks_exit_zero(capsys):
    assert main(["lemma-checks"]) == 0
    out = capsys.readouterr().out
    assert "[FAIL]" not in out and "checks passed" in out


def test_oracle(capsys):
    assert main(["oracle", "--n", "3", "--a-count", "3"]) == 0
    out = capsys.readouterr().out
    assert out.count("agree") == 3


def test_sweep_writes_outputs(tmp_path, capsys):
    out = tmp_path / "res"
    assert main(["sweep", "--n", "3", "--out", str(out)]) == 0
    text = capsys.readouterr().out
    assert "fitted slope" in text and "verdict: rate" in text
    assert (tmp_path / "res.csv").read_text().startswith("a,lambda_n")


def test_config_file_and_flag_override(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n": 3, "a_count": 5}))
    out = tmp_path / "o"
    assert main(["sweep", "--config", str(cfg), "--a-count", "4", "--out", str(out)]) == 0
    assert len((tmp_path / "o.csv").read_text().strip().splitlines()) == 1 + 4
    capsys.readouterr()
    cfg.write_text(json.dumps({"n": 3, "typo": 1}))
    assert main(["sweep", "--config", str(cfg)]) == 2
    assert "typo" in capsys.readouterr().err


def test_hypothesis_guard(capsys):
    assert main(["steklov", "--mesh-h", "0.1"]) == 2
    assert "outside_hypotheses" in capsys.readouterr().err


def test_steklov_sanity_label_and_mesh_dump(tmp_path, capsys):
    mesh = tmp_path / "mesh.txt"
    assert main(["steklov", "--mesh-h", "0.05", "--outside-hypotheses", "--dump-mesh", str(mesh)]) == 0
    out = capsys.readouterr().out
    assert "sanity" in out and "degenerate pair: yes" in out
    m = DiskMesh.from_text(mesh.read_text())
    assert m.n_boundary > 0


def test_neumann_nonlinear(capsys):
    assert main(["neumann", "--p", "1.5", "--q", "2", "--mesh-h", "0.1", "--a", "0.4"]) == 0
    assert "lambda =" in capsys.readouterr().out


def test_minimizers(capsys):
    assert main(["minimizers", "--n", "3", "--a-count", "4"]) == 0
    assert "decrease" in capsys.readouterr().out


def test_quotient_compare(capsys):
    assert main(["quotient-compare", "--p", "1.5", "--q", "2", "--a-count", "5"]) == 0


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "neumann_steklov", "oracle", "--n", "2", "--a-count", "2",
                          "--outside-hypotheses"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "elements" in res.stdout


def test_missing_subcommand():
    with pytest.raises(SystemExit):
        main([])
