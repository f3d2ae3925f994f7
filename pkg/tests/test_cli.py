import csv
import io
import json
import math
import subprocess
import sys

import pytest

from geovol.cli import run


def invoke(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def doc_of(capsys, *argv):
    code, out, _ = invoke(capsys, *argv)
    return code, json.loads(out)


def test_seifert_from_file(tmp_path, capsys):
    path = tmp_path / "hopf.json"
    path.write_text('{"genus": 0, "pairs": [[1, 1]]}')
    code, doc = doc_of(capsys, "seifert", "--json", str(path))
    assert code == 0
    assert {k: doc[k] for k in ("euler", "vol", "m")} == {"euler": "-1", "vol": "1", "m": 1}
    assert doc["provenance"]["euler"] == "exact"


def test_orbifold_chi(capsys):
    code, doc = doc_of(capsys, "orbifold", "--genus", "0", "--cones", "2,3,5")
    assert code == 0 and doc["chi_orb"] == "1/30"


def test_disc_both_methods(capsys):
    code, doc = doc_of(capsys, "disc", "--H", "2-u", "--method", "both")
    assert code == 0
    for key in ("vol_direct", "vol_return_time"):
        assert abs(doc[key] - 2 * math.pi) < 1e-8
        assert doc["provenance"][key]["method"] == "quadrature"


def test_hopf_volume_and_section(capsys):
    code, doc = doc_of(capsys, "hopf", "--what", "volume")
    assert code == 0 and abs(doc["vol"] - 1) < 1e-8
    code, doc = doc_of(capsys, "hopf", "--what", "section")
    assert code == 0
    assert "truncation_error" in json.dumps(doc["provenance"])


def test_failing_check_exits_one(capsys):
    code, doc = doc_of(capsys, "poincare-hopf", "--zeros", "1:0")
    assert code == 1 and doc["reports"][0]["passed"] is False


@pytest.mark.parametrize("argv", [
    ["bogus"],
    ["hopf", "--what", "everything"],
    ["hopf", "--unknown-flag"],
    ["disc", "--H", "2 - * u"],
    ["disc", "--H", "tan(u)"],
    ["orbifold", "--cones", "2,x"],
])
def test_usage_errors_exit_two(capsys, argv):
    code, _, err = invoke(capsys, *argv)
    assert code == 2 and err


def test_csv_output_and_plot_data(tmp_path, capsys):
    plot = tmp_path / "curv.csv"
    code, out, _ = invoke(capsys, "gauss-bonnet", "--profile", "sin(r)", "--format", "csv",
                          "--plot-data", str(plot))
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rows[0]["name"] == "gauss_bonnet" and rows[0]["passed"] == "True"
    table = list(csv.reader(plot.open()))
    assert table[0] == ["r", "f", "K"]
    assert float(table[5][2]) == pytest.approx(1.0)


def test_output_file(tmp_path, capsys):
    target = tmp_path / "out.json"
    code, out, _ = invoke(capsys, "orbifold", "--cones", "2,3", "-o", str(target))
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["chi_orb"] == "5/6"


def test_identity_small_suite(capsys):
    code, doc = doc_of(capsys, "identity", "--dim", "3", "--n", "0,1", "--seeds", "3", "--points", "4")
    assert code == 0 and all(r["passed"] for r in doc["reports"])


def test_deterministic_output(capsys):
    argv = ["disc", "--H", "1+u^2/8", "--order", "16"]
    _, a = doc_of(capsys, *argv)
    _, b = doc_of(capsys, *argv)
    a.pop("metadata"), b.pop("metadata")
    assert json.dumps(a) == json.dumps(b)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "geovol", "orbifold", "--cones", "2,3,5"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["chi_orb"] == "1/30"
