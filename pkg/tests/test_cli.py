import json
import math
import subprocess
import sys
from pathlib import Path

import jsonschema
import pytest
import yaml

from hamindex.cli import main, to_json

SCHEMA = json.loads((Path(__file__).resolve().parents[1] / "docs" / "schema" / "report.schema.json").read_text())


def _write(tmp_path, data, name="cfg.yaml"):
    p = tmp_path / name
    p.write_text(yaml.safe_dump(data) if name.endswith(".yaml") else json.dumps(data))
    return str(p)


def _run(argv, capsys):
    status = main(argv)
    out = capsys.readouterr()
    return status, out.out, out.err


def _report(text):
    data = json.loads(text)
    jsonschema.validate(data, SCHEMA)
    return data


HALF = {"coefficient": {"type": "constant", "matrix": [[0.5, 0], [0, 0.5]]}}
SOFT = {"model": {"type": "soft_power", "n": 1, "beta": 1.75}}


def test_index_constant_half(tmp_path, capsys):
    status, out, _ = _run(["index", "--config", _write(tmp_path, HALF)], capsys)
    assert status == 0
    rep = _report(out)
    assert rep["command"] == "index"
    assert (rep["results"]["i"], rep["results"]["nu"]) == (1, 0)
    assert rep["results"]["max_symplectic_defect"] <= 1e-9


def test_index_csv_spectrum(tmp_path, capsys):
    status, out, _ = _run(["index", "--config", _write(tmp_path, HALF), "--format", "csv"], capsys)
    assert status == 0
    lines = out.strip().splitlines()
    assert lines[0] == "level,k,eigenvalue"
    level = int(lines[1].split(",")[0])
    assert len(lines) - 1 == (2 * level + 1) * 2


def test_iterate(tmp_path, capsys):
    status, out, _ = _run(["iterate", "--config", _write(tmp_path, HALF), "--mmax", "3"], capsys)
    assert status == 0
    res = _report(out)["results"]
    assert res["holds"] and [r["i"] for r in res["rows"]] == [1, 1, 3]


def test_hypotheses_soft_power(tmp_path, capsys):
    status, out, _ = _run(["hypotheses", "--config", _write(tmp_path, SOFT)], capsys)
    assert status == 0
    res = _report(out)["results"]
    assert res["all_certified"]
    assert all(e["status"] in ("certified-on-grid", "not-applicable") for e in res["entries"].values())


def test_solve_and_minimal_period_from_record(tmp_path, capsys):
    out_path = tmp_path / "solve.json"
    status, _, _ = _run(["solve", "--config", _write(tmp_path, SOFT), "--T", "6", "--m", "16",
                         "--out", str(out_path)], capsys)
    assert status == 0
    rep = _report(out_path.read_text())
    res = rep["results"]
    assert res["certificates"]["index_interval"] is True
    assert res["residual"] <= 1e-8 and res["action_value"] > 0
    cfg = _write(tmp_path, {"record": "solve.json"}, "mp.yaml")
    status, out, _ = _run(["minimal-period", "--config", cfg], capsys)
    assert status == 0
    mp = _report(out)["results"]
    assert mp["fourier_gcd"] == 1 and mp["minimal_period"] == pytest.approx(6.0)


def test_subharmonics_csv(tmp_path, capsys):
    status, out, _ = _run(["subharmonics", "--config", _write(tmp_path, SOFT), "--T", "6", "--kmax", "2",
                           "--m", "16", "--format", "csv"], capsys)
    assert status == 0
    lines = out.strip().splitlines()
    assert lines[0] == "k1,k2,distinct,min_distance,shift"
    assert len(lines) == 5
    assert lines[1].startswith("1,1,False")


def test_linking(tmp_path, capsys):
    status, out, _ = _run(["linking", "--config", _write(tmp_path, SOFT), "--T", "10", "--m", "16",
                           "--theta", "4", "--nsamples", "200"], capsys)
    assert status == 0
    res = _report(out)["results"]
    assert res["gap_holds"] is True and res["theta"] == 4.0


def test_determinism_byte_identical(tmp_path, capsys):
    cfg = _write(tmp_path, SOFT)
    args = ["linking", "--config", cfg, "--T", "10", "--m", "8", "--theta", "4", "--nsamples", "100",
            "--seed", "7"]
    _, a, _ = _run(args, capsys)
    _, b, _ = _run(args, capsys)
    assert a == b
    assert json.loads(a)["config_echo"]["options"]["seed"] == 7


def test_config_file_options_and_flag_override(tmp_path, capsys):
    cfg = _write(tmp_path, {**HALF, "options": {"steps": 64}}, "cfg.json")
    _, out, _ = _run(["index", "--config", cfg], capsys)
    assert _report(out)["config_echo"]["options"]["steps"] == 64
    _, out, _ = _run(["index", "--config", cfg, "--steps", "128"], capsys)
    assert _report(out)["config_echo"]["options"]["steps"] == 128


@pytest.mark.parametrize("argv", [
    ["index", "--config", "/nonexistent/cfg.yaml"],
    ["index"],
    ["solve"],
    ["hypotheses", "--format", "csv"],
])
def test_invalid_input_exit_2(argv, capsys):
    status, _, err = _run(argv, capsys)
    assert status == 2
    assert "hamindex" in err


def test_invalid_values_exit_2(tmp_path, capsys):
    assert _run(["index", "--config", _write(tmp_path, HALF), "--tol", "-1"], capsys)[0] == 2
    assert _run(["iterate", "--config", _write(tmp_path, HALF), "--mmax", "1"], capsys)[0] == 2
    bad_model = _write(tmp_path, {"model": {"type": "soft_power", "beta": 1.2}}, "bad.yaml")
    status, out, _ = _run(["solve", "--config", bad_model, "--T", "6"], capsys)
    assert status == 2
    assert _report(out)["results"]["kind"] == "InvalidArgumentError"
    odd = _write(tmp_path, {"coefficient": {"type": "constant", "matrix": [[1, 0, 0]] * 3}}, "odd.yaml")
    assert _run(["index", "--config", odd], capsys)[0] == 2
    unknown = _write(tmp_path, {"model": {"type": "soft_power", "colour": 1}}, "unk.yaml")
    assert _run(["hypotheses", "--config", unknown], capsys)[0] == 2
    broken = tmp_path / "broken.yaml"
    broken.write_text("model: [unclosed")
    assert _run(["hypotheses", "--config", str(broken)], capsys)[0] == 2


def test_not_found_exit_3(tmp_path, capsys):
    quad = _write(tmp_path, {"model": {"type": "quadratic", "n": 1, "b": 1.0}})
    status, out, _ = _run(["solve", "--config", quad, "--T", str(0.7 * 2 * math.pi), "--m", "8"], capsys)
    assert status == 3
    res = _report(out)["results"]
    assert res["kind"] == "CriticalPointNotFound" and res["diagnostic"]["attempts"]


def test_to_json_formatting():
    text = to_json({"b": 0.1, "a": [1, 2.5e-17, float("inf")], "c": None, "d": True})
    assert text.index('"a"') < text.index('"b"')
    assert "0.10000000000000001" in text
    assert format(2.5e-17, ".17g") in text
    assert '"Infinity"' in text


def test_entry_point_subprocess(tmp_path):
    cfg = _write(tmp_path, HALF)
    proc = subprocess.run([sys.executable, "-m", "hamindex.cli", "index", "--config", cfg],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    res = json.loads(proc.stdout)["results"]
    assert (res["i"], res["nu"]) == (1, 0)
