import csv
import json
import subprocess
import sys
from fractions import Fraction

import pytest

from elephant_lab.cli import main, number


def _rows(path):
    with open(path) as fh:
        return list(csv.reader(fh))


def test_number_parsing():
    assert number("3/4") == Fraction(3, 4)
    assert number("0.87") == Fraction(87, 100)


def test_moments_exact(tmp_path):
    assert main(["moments", "--a", "3/4", "--order", "4", "--exact", "--out", str(tmp_path)]) == 0
    rows = _rows(tmp_path / "moments.csv")
    assert rows[0] == ["k", "m_numerator", "m_denominator", "m", "mu"]
    assert [(r[1], r[2]) for r in rows[1:]] == [("1", "1"), ("3", "2"), ("7", "4"), ("39", "16")]
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["closed_forms_match"] is True
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["subcommand"] == "moments" and manifest["seed"] == 0
    assert set(manifest["outputs"]) == {"moments.csv", "summary.json", "manifest.json"}


def test_moments_mgf(tmp_path):
    assert main(["moments", "--a", "3/4", "--t", "1", "--q", "1", "--out", str(tmp_path)]) == 0
    mgf = json.loads((tmp_path / "summary.json").read_text())["mgf"]
    assert abs(float(mgf["value"]) - 4.6035244422500308) < 1e-10


def test_json_format(tmp_path):
    assert main(["oracle", "--n", "4", "--p", "3/4", "--format", "json", "--out", str(tmp_path)]) == 0
    table = json.loads((tmp_path / "pmf.json").read_text())
    assert table["columns"][-1] == "probability"
    assert abs(sum(r[-1] for r in table["rows"]) - 1) < 1e-15


@pytest.mark.parametrize("argv", [
    ["moments", "--a", "0.4"],
    ["moments", "--d", "1", "--p", "0.87", "--a", "0.5"],
    ["simulate", "--p", "1.5"],
    ["oracle", "--p", "0.7", "--q", "0.2,0.2"],
    ["simulate", "--n", "abc"],
    ["nosuchcommand"],
])
def test_bad_arguments_exit_2(tmp_path, argv, capsys):
    assert main(argv + ["--out", str(tmp_path)]) == 2
    assert "usage" in capsys.readouterr().err


def test_numeric_failure_exits_1(tmp_path, capsys):
    code = main(["density", "--a", "3/4", "--atoms", "60", "--precision-bits", "20", "--out", str(tmp_path)])
    assert code == 1
    assert "numeric failure" in capsys.readouterr().err


def test_replay_is_byte_identical(tmp_path):
    first, second = tmp_path / "a", tmp_path / "b"
    argv = ["simulate", "--d", "2", "--p", "0.8", "--n", "200", "--replicas", "50", "--seed", "9", "--out", str(first)]
    assert main(argv) == 0
    assert main(["run", "--manifest", str(first / "manifest.json"), "--out", str(second)]) == 0
    for name in json.loads((first / "manifest.json").read_text())["outputs"]:
        if name != "manifest.json":
            assert (first / name).read_bytes() == (second / name).read_bytes()


@pytest.mark.parametrize("argv,files", [
    (["simulate", "--p", "7/8", "--n", "50", "--replicas", "1"], {"trajectory.csv"}),
    (["simulate", "--p", "7/8", "--n", "50", "--replicas", "30"], {"endpoints.csv"}),
    (["urn", "--d", "2", "--p", "13/16", "--n", "100", "--replicas", "20"], {"urn_final.csv"}),
    (["fixedpoint", "--a", "3/4", "--replicas", "2000", "--steps", "3", "--trials", "5"], {"particles.csv"}),
    (["fixedpoint", "--variant", "W", "--d", "2", "--a", "3/4", "--replicas", "500", "--steps", "2"],
     {"particles.csv"}),
    (["fixedpoint", "--variant", "Y", "--d", "2", "--a", "3/4", "--replicas", "500", "--steps", "2"],
     {"particles.csv"}),
    (["support", "--d", "2", "--w", "1,-1,1"], {"support.json"}),
    (["support", "--d", "2", "--a", "3/4", "--n", "500", "--replicas", "100"], {"W.csv"}),
    (["clusters", "--n", "100", "--a", "0.6"], {"tree.csv"}),
    (["clusters", "--mode", "ensemble", "--n", "100", "--a", "0.6", "--replicas", "100"], {"ensemble.csv"}),
    (["clusters", "--mode", "series", "--a", "0.6", "--replicas", "100", "--J", "5"], {"series.csv"}),
    (["density", "--a", "3/4", "--atoms", "20", "--paths", "200", "--n", "1000"], {"density.csv", "density.svg"}),
])
def test_subcommands_write_outputs(tmp_path, argv, files):
    assert main(argv + ["--out", str(tmp_path)]) == 0
    written = set(json.loads((tmp_path / "manifest.json").read_text())["outputs"])
    assert files <= written
    assert all((tmp_path / f).exists() for f in written)


def test_support_classification_summary(tmp_path):
    assert main(["support", "--d", "2", "--w", "1,-1,1", "--out", str(tmp_path)]) == 0
    data = json.loads((tmp_path / "support.json").read_text())
    assert data["class"]["label"] == "Span{f1-f2+f3}" and data["krylov"]["dimension"] == 1


def test_figures_small(tmp_path):
    argv = ["figures", "--p", "0.87", "--q", "0.9", "--n", "1000", "--paths", "200", "--atoms", "20",
            "--out", str(tmp_path)]
    assert main(argv) == 0
    svgs = sorted(p.name for p in tmp_path.glob("*.svg"))
    assert len(svgs) == 2


def test_module_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "elephant_lab", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.strip() == "0.1.0"
