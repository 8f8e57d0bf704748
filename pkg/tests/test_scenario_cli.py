import json
import math
import os
import subprocess
import sys
from pathlib import Path

import pytest

from fermisep import CapacityError
from fermisep.cli import main
from fermisep.scenario import ScenarioError, default_tolerance, parse_text, run_document

ROOT = Path(__file__).resolve().parent.parent
SAMPLES = sorted((ROOT / "scenarios").glob("*.json"))


def small_doc(**extra):
    doc = {
        "version": 1,
        "local_dim": 2,
        "num_sites": 2,
        "states": {"s": {"builtin": "singlet"}},
        "analyses": [{"type": "norm", "state": "s", "expect": {"norm": 1}}],
    }
    doc.update(extra)
    return doc


def write(tmp_path, name, doc):
    p = tmp_path / name
    p.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return str(p)


@pytest.mark.parametrize("path", SAMPLES, ids=lambda p: p.stem)
def test_samples_pass_and_are_deterministic(path, capsys):
    assert main(["run", str(path)]) == 0
    first = capsys.readouterr().out
    assert main(["run", str(path)]) == 0
    assert capsys.readouterr().out == first
    doc = json.loads(first)
    assert doc["passed"] and doc["failures"] == 0


def test_malformed_json_reports_position(tmp_path, capsys):
    p = write(tmp_path, "bad.json", '{\n  "version": 1,\n  "local_dim": ,\n}')
    assert main(["run", p]) == 2
    err = capsys.readouterr().err
    assert "line 3" in err and "column" in err
    with pytest.raises(ScenarioError) as info:
        parse_text('{"a": [1, 2,, 3]}')
    assert info.value.line == 1 and info.value.column > 1


def test_bad_version_and_unknown_analysis(tmp_path, capsys):
    assert main(["run", write(tmp_path, "v.json", small_doc(version=99))]) == 2
    bad = small_doc(analyses=[{"type": "nonsense"}])
    assert main(["run", write(tmp_path, "a.json", bad)]) == 2


def test_assertion_failure_exit_one(tmp_path, capsys):
    doc = small_doc(analyses=[{"type": "norm", "state": "s", "expect": {"norm": 2}}])
    assert main(["run", write(tmp_path, "f.json", doc)]) == 1
    out = json.loads(capsys.readouterr().out)
    assert out["failures"] == 1 and not out["passed"]
    assert out["analyses"][0]["checks"][0]["passed"] is False


def test_capacity_exit_three(tmp_path, capsys):
    doc = {
        "version": 1,
        "local_dim": 12,
        "num_sites": 6,
        "states": {},
        "observables": {"I": {"identity": True}},
        "analyses": [],
    }
    assert main(["run", write(tmp_path, "big.json", doc)]) == 3
    with pytest.raises(CapacityError):
        run_document(doc)


def test_tolerance_precedence(monkeypatch):
    assert default_tolerance({}) == 1e-10
    assert default_tolerance({"FERMISEP_TOL": "1e-6"}) == 1e-6
    with pytest.raises(ScenarioError):
        default_tolerance({"FERMISEP_TOL": "abc"})
    monkeypatch.setenv("FERMISEP_TOL", "1e-7")
    assert run_document(small_doc()).document["tolerance"] == 1e-7
    assert run_document(small_doc(tolerance=1e-8)).document["tolerance"] == 1e-8
    assert run_document(small_doc(tolerance=1e-8), tol=1e-5).document["tolerance"] == 1e-5
    with pytest.raises(ScenarioError):
        run_document(small_doc(tolerance=-1))


def test_tolerance_changes_check_outcome(tmp_path, capsys):
    doc = small_doc(analyses=[{"type": "norm", "state": "s", "expect": {"norm": 1 + 1e-6}}])
    p = write(tmp_path, "t.json", doc)
    assert main(["run", p]) == 1
    capsys.readouterr()
    assert main(["run", p, "--tol", "1e-5"]) == 0
    with pytest.raises(SystemExit) as info:
        main(["run", p, "--tol", "-1"])
    assert info.value.code == 2


def test_out_directory_and_jobs(tmp_path, capsys):
    out = tmp_path / "reports"
    files = [str(p) for p in SAMPLES]
    assert main(["run", *files, "--out", str(out), "--jobs", "2"]) == 0
    names = sorted(os.listdir(out))
    assert names == sorted(f"{p.stem}.report.json" for p in SAMPLES)
    for p in SAMPLES:
        assert main(["run", str(p)]) == 0
        assert (out / f"{p.stem}.report.json").read_text() == capsys.readouterr().out
    single = tmp_path / "one.json"
    assert main(["run", files[0], "--out", str(single)]) == 0
    assert json.loads(single.read_text())["passed"]


def test_list_examples_json(capsys):
    assert main(["list-examples", "--json"]) == 0
    items = json.loads(capsys.readouterr().out)
    assert len(items) == 7
    assert all(set(e) >= {"id", "section", "description"} for e in items)


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as info:
        main(["run", "--bogus", "x.json"])
    assert info.value.code == 2
    assert main(["reproduce", "no-such-example"]) == 2
    assert main(["run", str(SAMPLES[0]), "--jobs", "0"]) == 2
    assert main(["run", "/nonexistent/file.json"]) == 2


def test_reproduce_json(capsys):
    assert main(["reproduce", "sec2-chsh", "--json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["passed"]


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "fermisep", "run", str(SAMPLES[0])],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0, proc.stderr
    assert json.loads(proc.stdout)["passed"]


def test_serialized_floats_are_finite_text():
    doc = run_document(small_doc()).dumps()
    assert "NaN" not in doc and "Infinity" not in doc
    assert math.isclose(json.loads(doc)["analyses"][0]["results"]["norm"], 1)
