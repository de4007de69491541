import json
import os
import shutil
import subprocess
import sys
from pathlib import Path

import pytest

from snlab import cli
from snlab.report import certificate_digest, to_json

GOLDEN = Path(__file__).parent / "golden"
CASES = json.loads((GOLDEN / "cases.json").read_text())


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def argv_for(case):
    argv = list(case["argv"])
    if case["config"]:
        argv += ["--config", str(GOLDEN / case["config"])]
    return argv


@pytest.mark.parametrize("case", CASES, ids=[c["name"] for c in CASES])
def test_golden(case, capsys):
    code, out, err = run(argv_for(case), capsys)
    assert code == case["exit_code"]
    if "stdout" in case:
        assert out == (GOLDEN / case["stdout"]).read_text()
    if "error" in case:
        assert out == ""
        payload = json.loads(err.strip().splitlines()[-1])["error"]
        assert payload["type"] == case["error"] and payload["exit_code"] == case["exit_code"]


def strip_timings(text):
    data = json.loads(text)
    data.pop("timings", None)
    for row in data.get("rows", []):
        row.pop("timings", None)
    return data


@pytest.mark.parametrize("name", ["compute_mixed.json", "compute_injection.json"])
def test_compute_json_is_deterministic(name, capsys):
    argv = ["compute", "--config", str(GOLDEN / name)]
    _, first, _ = run(argv, capsys)
    _, second, _ = run(argv, capsys)
    assert strip_timings(first) == strip_timings(second)
    data = json.loads(first)
    assert data["schema_version"] == "1" and "tool_version" in data
    for seq in data["sequences"]:
        for e in seq["entries"]:
            assert e["direction"] in ("exact", "upper", "heuristic")
            assert set(e) == {"n", "value", "direction", "restarts", "certificate_digest"}


def test_json_and_csv_carry_the_same_numbers(capsys):
    cfg = str(GOLDEN / "compute_mixed.json")
    _, js, _ = run(["compute", "--config", cfg], capsys)
    _, cs, _ = run(["compute", "--config", cfg, "--format", "csv"], capsys)
    rows = [line.split(",") for line in cs.strip().splitlines()[1:]]
    entries = [(s["kind"], e) for s in json.loads(js)["sequences"] for e in s["entries"]]
    assert len(rows) == len(entries)
    for row, (kind, e) in zip(rows, entries):
        assert row[0] == kind and int(row[1]) == e["n"] and row[3] == e["direction"]
        assert float(row[2]) == pytest.approx(e["value"], rel=1e-8, abs=1e-12)
        assert row[5] == e["certificate_digest"]


def test_table_is_identical_across_thread_counts(capsys, monkeypatch):
    argv = ["table", "--config", str(GOLDEN / "table_diagonals.json")]
    monkeypatch.setenv("SNLAB_THREADS", "1")
    _, one, _ = run(argv, capsys)
    monkeypatch.setenv("SNLAB_THREADS", "3")
    _, three, _ = run(argv, capsys)
    assert one == three == (GOLDEN / "table_diagonals.csv").read_text()


def test_table_json_rows(capsys):
    code, out, _ = run(["table", "--config", str(GOLDEN / "table_bad_row.json"), "--format", "json"], capsys)
    data = json.loads(out)
    assert code == 1 and not data["passed"]
    assert [r["status"] for r in data["rows"]] == ["ok", "error", "ok"]
    assert data["rows"][2]["sequences"][0]["entries"][1]["value"] <= 0.5 + 1e-9


def test_flags_override_config(tmp_path, capsys):
    out = tmp_path / "r.json"
    code, stdout, _ = run(["compute", "--config", str(GOLDEN / "compute_injection.json"), "--seed", "9",
                           "--budget-restarts", "3", "--budget-iters", "50", "--out", str(out)], capsys)
    assert code == 0 and stdout == ""
    data = json.loads(out.read_text())
    assert data["config"]["seed"] == 9 and data["config"]["budget"] == {"restarts": 3, "iters": 50}
    assert data["sequences"][0]["entries"][1]["restarts"] == 3


def test_dualities_section(capsys):
    _, out, _ = run(["compute", "--config", str(GOLDEN / "compute_diag.json")], capsys)
    assert json.loads(out)["dualities"] == []
    cfg = json.loads((GOLDEN / "compute_diag.json").read_text())
    cfg["dualities"] = True
    data = cli.compute_report(cfg)
    assert {d["theorem"] for d in data["dualities"]} == \
        {"approximation-duality", "kolmogorov-duality", "gelfand-duality"}
    assert all(max(d["gaps"]) <= 1e-9 and all(d["verdicts"]) for d in data["dualities"])


@pytest.mark.parametrize("cfg,msg", [
    ({"operator": {"kind": "diagonal", "weights": [1], "N": 1}, "numbers": ["bernstein"]}, "unknown number"),
    ({"operator": {"kind": "diagonal", "weights": [1], "N": 1}, "numbers": ["alphaQ"]}, "requires a 'scheme'"),
    ({"operator": {"kind": "diagonal", "weights": [1, 1], "N": 2}, "numbers": ["tau"], "M": 3}, "'M' must"),
    ({"operator": {"kind": "diagonal", "weights": [1], "N": 1}, "n_max": -1}, "n_max"),
    ({"operator": {"kind": "diagonal", "weights": [1], "N": 1}, "budget": {"restarts": 0}}, "restarts"),
    ({"numbers": ["alpha"]}, "operator"),
    ({"operator": {"kind": "diagonal", "weights": [1], "N": 1}, "scheme": {"kind": "wavelet"}}, "scheme"),
])
def test_config_errors(cfg, msg):
    with pytest.raises(cli.ConfigError, match=msg):
        cli.compute_report(cfg)


def test_bad_arguments_exit_two(capsys):
    assert cli.main(["compute", "--seed", "abc"]) == 2
    assert cli.main([]) == 2


def test_json_floats_round_trip():
    x = 0.1 + 0.2
    text = to_json({"v": x, "w": 3.0, "i": 4, "z": float("nan")})
    data = json.loads(text)
    assert data["v"] == x and data["w"] == 3.0 and isinstance(data["w"], float)
    assert data["i"] == 4 and data["z"] is None
    assert "0.30000000000000004" in text


def test_certificate_digest_is_stable():
    assert certificate_digest(None) is None
    assert certificate_digest([[1.0, 0.0]]) == certificate_digest([[1.0, 0.0]])
    assert certificate_digest([[1.0, 0.0]]) != certificate_digest([[1.0], [0.0]])


@pytest.mark.skipif(shutil.which("snlab") is None, reason="console script not installed")
def test_console_script_end_to_end(tmp_path):
    res = subprocess.run(["snlab", "compute", "--config", str(GOLDEN / "compute_diag.json"), "--format", "csv"],
                         capture_output=True, text=True, env={**os.environ, "SNLAB_THREADS": "1"})
    assert res.returncode == 0 and res.stdout == (GOLDEN / "compute_diag.csv").read_text()
    res = subprocess.run([sys.executable, "-m", "snlab.cli", "verify", "nope"], capture_output=True, text=True)
    assert res.returncode == 2 and json.loads(res.stderr)["error"]["exit_code"] == 2
