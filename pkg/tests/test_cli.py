import csv
import io
import json

import pytest
from click.testing import CliRunner

from sol_lab.cli import main


@pytest.fixture
def run():
    runner = CliRunner()

    def invoke(*args):
        return runner.invoke(main, list(args), catch_exceptions=False)

    return invoke


def test_lattice_info(run):
    res = run("lattice", "info", "--matrix", "2,1,1,1")
    assert res.exit_code == 0
    out = json.loads(res.output)
    assert out["charpoly"] == "x^2-3x+1"
    assert out["D"] == 5
    assert out["lambda"] == {"u": "3/2", "v": "1/2", "D": 5}
    assert out["conjugation_exact"]


def test_bad_trace(run):
    res = run("lattice", "info", "--matrix", "1,1,0,1")
    assert res.exit_code == 2
    assert "trace must exceed 2" in res.output


def test_bad_determinant(run):
    res = run("lattice", "info", "--matrix", "2,1,1,2")
    assert res.exit_code == 2
    assert "determinant must be 1" in res.output


def test_verify_and_normalize(run, tmp_path):
    assert run("lattice", "verify", "--matrix", "3,1,2,1").exit_code == 0
    pres = {"tau1": [1, -0.5, 0], "tau2": [0.5, 1, 0], "tau3": [0.3, 0.2, 0.9624236501192069]}
    f = tmp_path / "pres.json"
    f.write_text(json.dumps(pres))
    res = run("lattice", "normalize", "--presentation", str(f))
    assert res.exit_code == 0
    tau3 = json.loads(res.output)["normalized"]["tau3"]
    assert abs(float(tau3[0])) < 1e-12 and abs(float(tau3[1])) < 1e-12


def test_log_set_csv(run):
    res = run("curves", "log-set", "--matrix", "2,1,1,1", "--point", "0,1,0.3", "--window", "1,1,1", "--out", "csv")
    assert res.exit_code == 0
    rows = list(csv.reader(io.StringIO(res.output)))
    assert rows[0] == ["p", "q", "r", "t", "x", "y", "z"]
    assert len(rows) == 28


def test_block_midpoints(run):
    res = run(
        "curves", "block", "--matrix", "2,1,1,1", "--point", "0,1,0.3", "--window", "1,1,5", "--blocker-midpoints", "3"
    )
    assert res.exit_code == 0
    out = json.loads(res.output)
    assert [0, 0, 1] in out["blocked_curves"] and out["evading_curves"]


def test_witness(run, tmp_path):
    report = tmp_path / "report.json"
    res = run("witness", "--matrix", "2,1,1,1", "--point", "0,1,0.3", "--imax", "12", "--out", str(report))
    assert res.exit_code == 0
    out = json.loads(report.read_text())
    assert out["verdict"] == "NON_BLOCKED_AT_SCALE"
    assert list(out) == ["indices", "verdict", "cosets", "plane_forcing", "config"]


def test_witness_cosets_file(run, tmp_path):
    f = tmp_path / "cosets.json"
    f.write_text(json.dumps([[0, 0.5, 0.1], [0.2, 0.3, 0.4]]))
    res = run("witness", "--matrix", "2,1,1,1", "--point", "0,1,0.3", "--cosets", str(f))
    assert res.exit_code == 0


def test_witness_rejects_generic_point(run):
    res = run("witness", "--matrix", "2,1,1,1", "--point", "1,1,0.3")
    assert res.exit_code == 2


def test_witness_deterministic(run):
    args = ("witness", "--matrix", "2,1,1,1", "--point", "0,1,0.3")
    assert run(*args).output == run(*args).output


def test_density(run):
    res = run("density", "--matrix", "2,1,1,1", "--box", "0,0.5,0,0.5,0,0.5", "--eps", "0.1")
    assert res.exit_code == 0
    assert json.loads(res.output)["coverage"] == 1.0
    assert run("density", "--matrix", "2,1,1,1", "--box", "0,1").exit_code == 2


def test_json_args(run, tmp_path):
    f = tmp_path / "args.json"
    f.write_text(json.dumps({"lattice": {"info": {"matrix": "3,1,2,1"}}}))
    res = run("--json-args", str(f), "lattice", "info")
    assert res.exit_code == 0
    assert json.loads(res.output)["trace"] == 4


def test_export_plot(run, tmp_path):
    res = run("export-plot", "--matrix", "2,1,1,1", "--point", "0,1,0.3", "--tgrid", "7", "--out-dir", str(tmp_path / "p"))
    assert res.exit_code == 0
    files = sorted((tmp_path / "p").iterdir())
    assert len(files) == 27
    rows = list(csv.reader(files[0].open()))
    assert rows[0] == ["t", "x", "y", "z"] and len(rows) == 10
