import json
import math
import os
import subprocess
from pathlib import Path

import jsonschema
import pytest

import sparse_nb

REPO = Path(os.environ.get("SNB_REPO", Path(__file__).resolve().parents[2]))
DATA = REPO / "data" / "australian.csv"
SCHEMA = REPO / "data" / "australian.schema"
REPORT_SCHEMA = json.loads((REPO / "schemas" / "run_report.schema.json").read_text())


def test_select_report_matches_schema():
    report = sparse_nb.select(DATA, schema=str(SCHEMA), runs=1, folds=5, seed=3)
    jsonschema.validate(report, REPORT_SCHEMA)
    assert report["dataset"]["rows"] == 690
    assert len(report["folds"]) == 5
    assert all(f["winner_size"] <= 14 for f in report["folds"])


def test_cli_report_matches_schema(tmp_path):
    cli = os.environ.get("SNB_CLI")
    if not cli:
        pytest.skip("SNB_CLI not set")
    out = tmp_path / "report.json"
    subprocess.run(
        [cli, "select", "--data", str(DATA), "--schema", str(SCHEMA), "--runs", "1", "--folds", "3",
         "--constraint", "recall:+>90", "--out", str(out)],
        check=True,
    )
    report = json.loads(out.read_text())
    jsonschema.validate(report, REPORT_SCHEMA)
    for f in report["folds"]:
        assert f["validation_feasible"] or f["winner_source"] == "fallback-least-violating"


def test_usage_errors_raise():
    with pytest.raises(sparse_nb.UsageError):
        sparse_nb.select(DATA, schema=str(SCHEMA), q="2", runs=1, folds=3)
    with pytest.raises(ValueError):
        sparse_nb.select(DATA, schema=str(SCHEMA), measure="f1", runs=1, folds=3)


def test_primitives():
    assert sparse_nb.mutual_information([0, 1, 0, 1], [0, 1, 0, 1]) == pytest.approx(math.log(2))
    assert sparse_nb.auc([0.9, 0.8, 0.2, 0.1], [1, 1, 0, 0]) == 1.0
    cuts = sparse_nb.mdlp_cuts([1, 2, 3, 4], [0, 0, 1, 1], 2)
    assert len(cuts) == 1 and 2 < cuts[0] < 3
    merges = sparse_nb.cluster([[0, 0.1, 0.9], [0.1, 0, 0.9], [0.9, 0.9, 0]])
    assert merges == [(0, 1, 0.1, 2), (3, 2, 0.9, 3)]


def test_dependence_structure():
    dep = sparse_nb.dependence(str(DATA), schema=str(SCHEMA))
    names = dep["features"]
    m = dep["m"]
    pairs = sorted(
        ((m[i][j], names[i], names[j]) for i in range(len(names)) for j in range(i + 1, len(names))),
        reverse=True,
    )
    assert {frozenset(p[1:]) for p in pairs[:2]} == {frozenset({"V5", "V6"}), frozenset({"V9", "V10"})}
    assert all(0.0 <= v <= 1.0 for row in dep["h"] for v in row)


def test_synth_is_deterministic():
    a = sparse_nb.synth_pair(n=50, seed=4)
    assert a == sparse_nb.synth_pair(n=50, seed=4)
    lines = a.strip().splitlines()
    assert lines[0] == "X1,X2,X3,X4,class"
    assert len(lines) == 51
    blocks = sparse_nb.synth_blocks(p=8, n=20, rho=0.5, seed=1)
    assert blocks.splitlines()[0].count(",") == 8
    with pytest.raises(sparse_nb.UsageError):
        sparse_nb.synth_blocks(rho=1.0)
