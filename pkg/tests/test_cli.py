from __future__ import annotations

import json
import subprocess
import sys

import jsonschema
import pytest

from mobius_qec.cli import SCHEMA_PATH, main

SCHEMA = json.loads(SCHEMA_PATH.read_text())


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def validate(path, kind):
    """Check the wrapper and the payload; ``kind[]`` means a list of ``kind`` records."""
    doc = json.loads(path.read_text())
    jsonschema.validate(doc, SCHEMA)
    ref = {"$ref": f"#/$defs/{kind.rstrip('[]')}"}
    sub = {"type": "array", "items": ref} if kind.endswith("[]") else ref
    jsonschema.validate(doc["data"], {**sub, "$defs": SCHEMA["$defs"]})
    return doc


def test_params(capsys):
    code, out, err = run(capsys, "params", "--family", "cylindrical", "--L", "3")
    assert code == 0
    assert json.loads(out) == {"n": 15, "k": 1, "dX": 3, "dZ": 3}
    assert err.startswith("# provenance: ")
    code, out, _ = run(capsys, "params", "--family", "surface", "--Lc", "3", "--Lf", "5")
    assert json.loads(out) == {"n": 23, "k": 1, "dX": 3, "dZ": 5}


def test_enumerate_csv(capsys):
    code, out, _ = run(capsys, "enumerate", "--family", "moebius", "--L", "3")
    lines = out.splitlines()
    assert code == 0 and lines[:3] == ["w,L", "3,4", "4,18"]
    _, out, _ = run(capsys, "enumerate", "--L", "3", "--method", "direct", "--format", "json")
    assert json.loads(out)["coefficients"][3:5] == [6, 18]


def test_fractions_and_audit(capsys):
    code, out, _ = run(capsys, "fractions", "--family", "cylindrical", "--Lc", "5", "--Lf", "3", "--j", "2")
    assert code == 0
    rows = {line.split(",")[0]: line.split(",") for line in out.splitlines()[1:]}
    assert rows["XX"][-1] == "0.150"
    _, out, _ = run(capsys, "fractions", "--L", "3", "--j", "2", "--audit")
    header, *body = out.splitlines()
    assert header.endswith("fraction_reverse")
    xx = next(r for r in body if r.startswith("XX,")).split(",")
    assert xx[-2] != xx[-1]


def test_decode(capsys, tmp_path):
    code, out, _ = run(capsys, "decode", "--L", "3", "--error", "Y7 Y10", "--graph-dump", str(tmp_path))
    assert code == 0 and json.loads(out)["residual"] == "logical_z"
    assert (tmp_path / "graph_x.txt").read_text().count("\n") == 15
    _, out, _ = run(capsys, "decode", "--L", "3", "--syndrome", "0" * 15)
    assert json.loads(out)["correction"] == "I"


def test_beta_and_bound_records(capsys, tmp_path):
    path = tmp_path / "beta.json"
    assert main(["beta", "--L", "3", "--A", "1", "inf", "--out", str(path)]) == 0
    doc = validate(path, "beta_record[]")
    assert [r["exact"] for r in doc["data"]] == ["89/105", "32/35"]
    assert doc["data"][1]["A"] == "inf"
    path = tmp_path / "bound.json"
    assert main(["bound", "--d", "7", "--A", "10", "--out", str(path)]) == 0
    validate(path, "bound_record[]")
    code, out, _ = run(capsys, "bound", "--curve", "--d", "7")
    assert code == 0 and out.splitlines()[0] == "family,d,A,p,bound"


def test_simulate_writes_valid_record_and_reruns_from_config(capsys, tmp_path):
    path = tmp_path / "sim.json"
    args = ["simulate", "--L", "3", "--p", "0.05", "--A", "inf", "--seed", "3",
            "--min-failures", "30", "--out", str(path)]
    assert main(args) == 0
    doc = validate(path, "simulation_report")
    assert doc["data"]["A"] == "inf" and doc["data"]["breakdown"]["logical_x"] == 0
    config = tmp_path / "cfg.json"
    config.write_text(json.dumps(doc["provenance"]["config"]))
    again = tmp_path / "again.json"
    assert main(["simulate", "--config", str(config), "--out", str(again)]) == 0
    assert json.loads(again.read_text())["data"] == doc["data"]


def test_generated_seed_is_reported(capsys):
    code, out, err = run(capsys, "simulate", "--L", "3", "--p", "0.1", "--max-shots", "100")
    assert code == 0 and "# generated seed" in err
    seed = int(err.split("# generated seed ")[1].split()[0])
    assert json.loads(out)["seed"] == seed


def test_exit_codes(capsys, tmp_path):
    assert run(capsys, "params", "--family", "moebius", "--L", "4")[0] == 2
    assert run(capsys, "params", "--family", "cylindrical")[0] == 2
    assert run(capsys, "fractions", "--L", "5", "--j", "3", "--budget", "10")[0] == 3
    assert run(capsys, "enumerate", "--L", "5", "--kind", "S")[0] == 3
    missing = tmp_path / "nope" / "deeper" / "x.json"
    assert run(capsys, "params", "--L", "3", "--out", str(missing))[0] == 4
    assert run(capsys, "decode", "--L", "3", "--error", "Q1")[0] == 2
    with pytest.raises(SystemExit):
        main(["params", "--family", "torus"])


def test_export(capsys):
    _, out, _ = run(capsys, "export", "generators", "--L", "3")
    assert len(out.splitlines()) == 15
    _, out, _ = run(capsys, "export", "schema")
    assert json.loads(out)["$schema"].startswith("https://json-schema.org")


def test_reproduce_fast_subset(capsys, tmp_path):
    path = tmp_path / "checks.json"
    code = main(["reproduce-paper", "--criteria", "1", "2", "3", "--format", "json", "--out", str(path)])
    doc = validate(path, "check[]")
    assert code == 0 and all(c["status"] in ("pass", "flagged") for c in doc["data"])


def test_console_entry_point():
    done = subprocess.run([sys.executable, "-m", "mobius_qec.cli", "params", "--L", "3"],
                          capture_output=True, text=True, check=True)
    assert json.loads(done.stdout)["n"] == 15
