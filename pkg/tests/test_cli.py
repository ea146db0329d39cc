import json
import subprocess
import sys

import pytest

from poisson_overlay.harness import stats
from poisson_overlay.harness.cli import main


def test_verify_quick_exits_zero(capsys):
    assert main(["verify", "--level", "quick"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out and "PASS intensity_t00_quadrature" in out


def test_usage_errors_exit_two(capsys):
    assert main(["simulate", "--kind", "pierced", "--bogus"]) == 2
    assert "usage" in capsys.readouterr().err
    assert main([]) == 2
    assert main(["simulate", "--kind", "hexagons"]) == 2
    assert main(["simulate", "--kind", "pierced", "--seed", "-1"]) == 2
    assert main(["simulate", "--kind", "pierced", "--lambdas", "2,3"]) == 2
    assert main(["analytic", "--what", "max", "--j", "1", "--from", "1", "--to", "2", "--step", "0.5"]) == 2
    assert main(["analytic", "--what", "density", "--from", "1", "--to", "0", "--step", "0.5"]) == 2


def test_simulate_is_deterministic(tmp_path, capsys):
    outs = []
    for run in ("a", "b"):
        d = tmp_path / run
        d.mkdir()
        code = main(["simulate", "--kind", "pierced", "--lambda", "4", "--trials", "60", "--seed", "42",
                     "--bins", "40", "--out", str(d / "h.csv"), "--report", str(d / "r.json")])
        assert code in (0, 1)
        outs.append({p.name: p.read_bytes() for p in sorted(d.iterdir())})
    assert outs[0] == outs[1]
    assert set(outs[0]) == {"h_alpha.csv", "h_max.csv", "h_min.csv", "r.json"}
    rep = json.loads(outs[0]["r.json"])
    assert rep["experiment"] == "pierced" and rep["seed"] == 42 and rep["trials"] == 60
    h = stats.histogram_from_csv(outs[0]["h_alpha.csv"].decode())
    assert len(h.counts) == 40


def test_simulate_filled_and_t00(tmp_path):
    assert main(["simulate", "--kind", "filled", "--lambdas", "2,3", "--trials", "10", "--seed", "1",
                 "--out", str(tmp_path / "f.csv")]) in (0, 1)
    assert (tmp_path / "f_lam3_max.csv").exists()
    assert main(["simulate", "--kind", "t00", "--lambda", "6", "--inner-margin", "2", "--trials", "10",
                 "--report", str(tmp_path / "t.json")]) in (0, 1)
    assert json.loads((tmp_path / "t.json").read_text())["experiment"] == "t00"


def test_analytic_density_table(tmp_path):
    out = tmp_path / "f.csv"
    assert main(["analytic", "--what", "density", "--j", "4", "--from", "0.01", "--to", "3.13",
                 "--step", "0.01", "--out", str(out)]) == 0
    rows = out.read_text().splitlines()
    assert rows[0] == "x,value"
    assert len(rows) == 1 + 313
    x, y = map(float, rows[1].split(","))
    assert x == 0.01 and y > 0


@pytest.mark.parametrize("what", ["max", "min", "phi", "filled-max", "filled-min"])
def test_analytic_other_tables(what, capsys):
    lo, hi = {"max": (1.1, 3.0), "min": (0.1, 1.0), "phi": (0.1, 1.5),
              "filled-max": (1.1, 1.5), "filled-min": (0.1, 1.0)}[what]
    assert main(["analytic", "--what", what, "--j", "2", "--from", str(lo), "--to", str(hi), "--step", "0.1"]) == 0
    assert capsys.readouterr().out.startswith("x,value\n")


def test_constants(capsys):
    assert main(["constants"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "name,printed,computed,abs_diff"
    assert all(float(r.split(",")[3]) < 1e-9 for r in lines[1:])


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "poisson_overlay", "verify", "--level", "quick"],
                       capture_output=True, text=True)
    assert r.returncode == 0
    r = subprocess.run([sys.executable, "-m", "poisson_overlay", "nonsense"], capture_output=True, text=True)
    assert r.returncode == 2 and "usage" in r.stderr
