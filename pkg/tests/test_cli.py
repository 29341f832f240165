import json

import pytest

from beta_turan import cli


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_eval_uniform(capsys):
    code, out, _ = run(["eval", "a=1", "b=1", "x=0.5"], capsys)
    assert code == 0 and out == "0.5\n"


def test_eval_derivs(capsys):
    code, out, _ = run(["eval", "a=2", "b=3", "x=0.4", "--derivs"], capsys)
    assert code == 0 and json.loads(out)["value"] == pytest.approx(0.5248)


@pytest.mark.parametrize("argv", [
    [], ["frobnicate"], ["eval", "a=1"], ["eval", "a=1", "b=1", "x=2"], ["scan", "--grid-a", "1:0:0.5"],
    ["scan", "--grid-a", "x,y"], ["coeffs", "--grid-alpha", "1.5"], ["optimize"],
])
def test_usage_errors(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 2 and "error" in err


def test_parse_grid():
    assert cli.parse_grid("0.5,1,2") == [0.5, 1, 2]
    assert cli.parse_grid("0.1:0.5:0.1") == [0.1, 0.2, 0.3, 0.4, 0.5]


def test_header_echoes_config(capsys):
    code, out, _ = run(["bounds", "--grid-a", "2", "--grid-b", "2", "--grid-nu", "1", "--grid-x", "0.5"], capsys)
    header, columns = out.splitlines()[:2]
    assert code == 0
    assert header.startswith("# beta-turan schema=1 config=")
    cfg = json.loads(header.split("config=", 1)[1])
    assert cfg["grid"] == {"a": [2], "b": [2], "nu": [1], "x": [0.5]} and cfg["tol"] == 1e-12
    assert columns.split(",")[:5] == ["family", "a", "b", "nu", "x"]


def test_json_mirrors_csv(capsys):
    argv = ["scan", "--grid-a", "0.5", "--grid-b", "2", "--grid-alpha", "0.7", "--grid-beta", "1", "--order", "10"]
    _, csv_out, _ = run(argv, capsys)
    _, json_out, _ = run(argv + ["--format", "json"], capsys)
    doc = json.loads(json_out)
    lines = csv_out.splitlines()
    assert doc["header"].replace('"output_format":"json"', '"output_format":"csv"') == lines[0]
    assert ",".join(doc["columns"]) == lines[1]
    assert len(doc["rows"]) == len(lines) - 3


def test_identities_deterministic(tmp_path):
    path = tmp_path / "r.csv"
    argv = ["identities", "--seed", "5", "--out", str(path)]
    assert cli.main(argv) == 0
    first = path.read_bytes()
    assert cli.main(argv) == 0
    assert path.read_bytes() == first


def test_scan_rows_carry_reproduction_data(capsys):
    code, out, _ = run(["scan", "--grid-a", "0.5,2", "--grid-b", "1", "--grid-alpha", "1", "--grid-beta", "0.7",
                        "--order", "12"], capsys)
    assert code == 0
    rows = [ln.split(",") for ln in out.splitlines()[2:-1]]
    assert len(rows) == 4
    assert {r[9] for r in rows if r[0] == "psi"} == {"zero"}
    assert all(r[5] == "12" and r[6] == "1e-13" for r in rows)


def test_violation_prints_rerun(capsys, monkeypatch):
    from beta_turan import turan

    def fake(point, kind, N, noise_floor):
        return turan.SignReport(point, kind, (0, N), 1.0, "mixed", first_violation_k=3,
                                violations=[3], reverified=True, counterexample=True)

    monkeypatch.setattr(turan, "_safe_scan", fake)
    code, out, err = run(["scan", "--grid-a", "0.5", "--grid-b", "2", "--grid-alpha", "0.7",
                          "--grid-beta", "1", "--order", "10"], capsys)
    assert code == 1
    assert "rerun: beta-turan scan --grid-a 0.5 --grid-b 2 --grid-alpha 0.7 --grid-beta 1 --order 10" in err


def test_optimize_text_instance(tmp_path, capsys):
    path = tmp_path / "inst.txt"
    path.write_text("# epsilon=0.5\nc,w,p\n1,1,0.5\n")
    code, out, _ = run(["optimize", "--instance", str(path), "--format", "json"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["summary"]["alpha"][0] == pytest.approx(1.0, abs=1e-8)


def test_run_config_defaults():
    cfg = cli.RunConfig(command="scan")
    assert cfg.output_format == "csv" and cfg.order == 50
    assert json.loads(cfg.echo())["command"] == "scan"
