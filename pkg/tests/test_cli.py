import json
import subprocess
import sys
from pathlib import Path

import pytest

from omnilie.cli import DocumentError, document_from_data, emit_report, main, run_checks

ROOT = Path(__file__).resolve().parents[1]
WORKED = ROOT / "documents" / "worked_example.yaml"
ZOO = ROOT / "documents" / "zoo.yaml"


def doc(structures, checks=(), coordinates=("x", "y"), seed=0):
    return document_from_data(
        {"version": 1, "chart": {"coordinates": list(coordinates)}, "oracle": {"seed": seed}, "structures": list(structures), "checks": list(checks)}
    )


JACOBI = {"label": "J", "constructor": "jacobi", "params": {"bivector": ["x"], "vector": ["0", "1"]}}


def test_document_loads():
    d = doc([JACOBI])
    assert list(d.structures) == ["J"]


def test_unknown_constructor():
    with pytest.raises(DocumentError, match="foo"):
        doc([{"label": "F", "constructor": "foo", "params": {}}])


def test_parse_error_has_position():
    with pytest.raises(DocumentError, match="position 2"):
        doc([{"label": "J", "constructor": "jacobi", "params": {"bivector": ["x+"], "vector": ["0", "1"]}}])


def test_empty_report_in_both_formats():
    payload = json.loads(emit_report(None, "json"))
    assert payload["ok"] and payload["checks"] == []
    assert emit_report(None, "text")


def test_failing_check_serializes_witness():
    bad = {"label": "W", "constructor": "two_cocycle", "params": {"form": {"x,y": "x"}}}
    report = run_checks(doc([bad], [{"verb": "check", "structure": "W"}]))
    assert not report.ok
    text = emit_report(report, "json").decode()
    assert '"point"' in text and '"witness' in text
    assert "witness" in emit_report(report, "text").decode()


def test_expectation_inverts_verdict():
    bad = {"label": "W", "constructor": "two_cocycle", "params": {"form": {"x,y": "x"}}}
    assert run_checks(doc([bad], [{"verb": "check", "structure": "W", "expect": False}])).ok


def test_selftest_check_passes():
    report = run_checks(doc([], [{"verb": "selftest", "dimensions": [1, 2], "instances": 5, "tensor_instances": 2}]))
    assert report.ok


def test_example_documents_pass(capsys):
    assert main(["run", str(WORKED)]) == 0
    assert main(["run", str(ZOO)]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out


def test_missing_file_exits_with_input_error(capsys):
    assert main(["run", "no-such-file.yaml"]) == 2


def test_failures_exit_with_one(tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text(
        "version: 1\nchart: {coordinates: [x, y]}\nstructures:\n"
        "  - {label: W, constructor: two_cocycle, params: {form: {'x,y': x}}}\n"
        "checks:\n  - {verb: check, structure: W}\n"
    )
    assert main(["run", str(path), "--format", "json", "--output", str(tmp_path / "r.json")]) == 1
    assert json.loads((tmp_path / "r.json").read_text())["ok"] is False


def test_json_is_byte_identical_across_processes(tmp_path):
    outs = []
    for k in range(2):
        target = tmp_path / f"run{k}.json"
        subprocess.run([sys.executable, "-m", "omnilie", "run", str(WORKED), "--seed", "3", "--format", "json", "--output", str(target)], check=True)
        outs.append(target.read_bytes())
    assert outs[0] == outs[1]


def test_subcommands(capsys):
    assert main(["check", str(WORKED), "--structure", "J"]) == 0
    assert main(["analyze", str(WORKED), "--structure", "J", "--point", "x=0,y=0.1"]) == 0
    assert main(["pullback", str(WORKED), "--structure", "J", "--slice", "y=0"]) == 0
    assert main(["recognize", str(WORKED), "--structure", "J"]) == 0
    assert main(["selftest", "--dimensions", "1", "--instances", "3"]) == 0
    capsys.readouterr()


def test_reports_match_published_schema(tmp_path):
    jsonschema = pytest.importorskip("jsonschema")
    schema = json.loads((ROOT / "docs" / "report_schema.json").read_text())
    witness_schema = schema["$defs"]["witness"]
    target = tmp_path / "zoo.json"
    main(["run", str(ZOO), "--format", "json", "--output", str(target)])
    jsonschema.validate(json.loads(target.read_text()), schema)
    jsonschema.validate(json.loads(emit_report(None, "json")), schema)
    bad = {"label": "W", "constructor": "two_cocycle", "params": {"form": {"x,y": "x"}}}
    failing = json.loads(emit_report(run_checks(doc([bad], [{"verb": "check", "structure": "W"}])), "json"))
    jsonschema.validate(failing, schema)
    found = []

    def walk(obj):
        if isinstance(obj, dict):
            if {"point", "lhs", "rhs"} <= obj.keys():
                found.append(obj)
            for v in obj.values():
                walk(v)
        elif isinstance(obj, list):
            for v in obj:
                walk(v)

    walk(failing)
    assert found
    for w in found:
        jsonschema.validate(w, witness_schema)
