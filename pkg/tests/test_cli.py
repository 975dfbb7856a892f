import json
import subprocess
import sys

import pytest

from hurwitz_plague.cli import main
from hurwitz_plague.formats import SCHEMAS, dumps, load_schema, read_json, validate, write_json
from hurwitz_plague.racks import InputError


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, "--json", *argv)
    return code, json.loads(out)


@pytest.fixture
def s3_cov_file(tmp_path, capsys):
    path = tmp_path / "s3_orbit8.json"
    code, _, _ = run(capsys, "covering", "derive", "--builtin", "S3-transpositions",
                     "--seed", "0,1,2", "--out", str(path))
    assert code == 0
    return path


@pytest.fixture
def g7_cov_file(tmp_path, capsys):
    out = tmp_path / "g7"
    code, _, _ = run(capsys, "covering", "enumerate", "--graph", "G7_52", "--nmax", "7",
                     "--out-dir", str(out))
    assert code == 0
    return out / "covering_000.json"


def test_enumerate_g7(capsys):
    code, out, _ = run(capsys, "covering", "enumerate", "--graph", "G7_52", "--nmax", "21")
    assert code == 0 and out.strip() == "N=7 labels=(2,4,1)"


def test_enumerate_json_validates(capsys):
    code, data = run_json(capsys, "covering", "enumerate", "--graph", "G7_52", "--nmax", "7")
    assert code == 0 and len(data) == 1
    validate("covering", data[0])


def test_metrics_weight(capsys, s3_cov_file):
    code, out, _ = run(capsys, "metrics", "weight", "--covering", str(s3_cov_file))
    assert code == 0 and out.strip() == "3/8"


def test_metrics_conjecture(capsys, s3_cov_file):
    code, out, _ = run(capsys, "metrics", "conjecture", "--covering", str(s3_cov_file))
    assert code == 0 and "holds" in out and "3/8" in out
    code, data = run_json(capsys, "metrics", "conjecture", "--covering", str(s3_cov_file))
    validate("report", data)
    assert data["immunity"] == "3/8" and data["min_plague"] == 3


def test_metrics_plague_and_immunity(capsys, s3_cov_file):
    code, data = run_json(capsys, "metrics", "plague", "--covering", str(s3_cov_file))
    assert code == 0 and data["min_plague"] == 3
    validate("report", data)
    code, out, _ = run(capsys, "metrics", "immunity", "--covering", str(s3_cov_file))
    assert out.strip() == "3/8"


def test_immunity_above_cap_is_input_error(capsys, g7_cov_file):
    code, _, err = run(capsys, "metrics", "immunity", "--covering", str(g7_cov_file))
    assert code == 2 and "certification cap" in err


def test_graph_builtin_dot(capsys, tmp_path):
    dot = tmp_path / "out.dot"
    code, out, _ = run(capsys, "graph", "builtin", "--name", "G10_10", "--dot", str(dot))
    assert code == 0 and "10{10}" in out
    assert dot.read_text().startswith("digraph")


def test_graph_span_and_dot(capsys, tmp_path):
    g = tmp_path / "span.json"
    code, out, _ = run(capsys, "graph", "span", "--k", "2", "--fragments", "F2,F2,F3",
                       "--out", str(g))
    assert code == 0 and "31 vertices" in out
    validate("graph", read_json(g))
    code, out, _ = run(capsys, "graph", "dot", "--graph", str(g))
    assert code == 0 and "digraph" in out
    code, _, err = run(capsys, "graph", "span", "--k", "1", "--fragments", "F1")
    assert code == 2


def test_graph_dot_with_labels(capsys, g7_cov_file):
    code, out, _ = run(capsys, "graph", "dot", "--covering", str(g7_cov_file))
    assert code == 0 and "label" in out


def test_verify_section5(capsys, g7_cov_file):
    code, out, _ = run(capsys, "verify", "section5", "--covering", str(g7_cov_file))
    assert code == 0 and out.strip().endswith("PASS")
    assert "v1[*] ∪ v3[*]" in out


def test_quotient_and_lift(capsys, s3_cov_file, tmp_path):
    code, out, _ = run(capsys, "quotient", "--builtin", "S3-transpositions", "--seed", "0,1,2")
    assert code == 0 and "4{3,1}" in out and "N=2" in out
    code, data = run_json(capsys, "covering", "lift", "--covering", str(s3_cov_file))
    assert code == 0 and len(data["points"]) == 8
    lifted = tmp_path / "lift.json"
    run(capsys, "covering", "lift", "--covering", str(s3_cov_file), "--out", str(lifted))
    code, out, _ = run(capsys, "metrics", "weight", "--orbit", str(lifted))
    assert code == 0 and out.strip() == "3/8"


def test_orbit_verbs(capsys, tmp_path):
    code, out, _ = run(capsys, "orbit", "decompose", "--builtin", "S3-transpositions")
    assert code == 0 and "6 orbits" in out
    path = tmp_path / "orbit.json"
    code, out, _ = run(capsys, "orbit", "enumerate", "--builtin", "S3-transpositions",
                       "--seed", "0,1,2", "--out", str(path))
    assert code == 0 and "8 points" in out
    validate("orbit", read_json(path))
    code, _, _ = run(capsys, "orbit", "enumerate", "--builtin", "S3-transpositions")
    assert code == 2


def test_rack_validate(capsys, tmp_path):
    code, data = run_json(capsys, "rack", "validate", "--builtin", "dihedral-3")
    assert code == 0 and data["is_quandle"] and data["is_braided"]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"table": [[0, 0], [1, 1]]}))
    code, out, err = run(capsys, "rack", "validate", "--rack", str(bad))
    assert code == 1 and "witness" in out


def test_automaton_closure(capsys):
    code, data = run_json(capsys, "automaton", "closure", "--zm", "6", "--offsets", "2",
                          "--subset", "0,1")
    assert code == 0 and data["plague"] is True
    code, data = run_json(capsys, "automaton", "closure", "--builtin", "S3-transpositions",
                          "--seed", "0,1,2", "--subset", "0")
    assert code == 0 and data["plague"] is False
    code, _, _ = run(capsys, "automaton", "closure", "--zm", "6", "--offsets", "0")
    assert code == 2
    code, _, _ = run(capsys, "automaton", "closure", "--zm", "6", "--offsets", "1",
                     "--subset", "9")
    assert code == 2


def test_scan_builtin(capsys):
    code, data = run_json(capsys, "scan", "--builtin", "S3-transpositions",
                          "--builtin", "trivial-1")
    assert code == 0
    s3 = [r for r in data["rows"] if r["rack"] == "S3-transpositions"]
    assert len(s3) == 6
    for r in s3:
        if r["size"] == 8:
            assert r["immunity"] == r["weight"] == "3/8"
    triv = [r for r in data["rows"] if r["rack"] == "trivial-1"]
    assert len(triv) == 1 and triv[0]["immunity"] == "1"
    assert data["counts"]["fails"] == 0


def test_scan_collects_errors(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, data = run_json(capsys, "scan", "--rack", str(bad), "--builtin", "trivial-2")
    assert code == 0 and len(data["errors"]) == 1 and data["rows"]


def test_scan_is_reproducible(capsys):
    _, a, _ = run(capsys, "--json", "scan", "--builtin", "S3-transpositions")
    _, b, _ = run(capsys, "--json", "scan", "--builtin", "S3-transpositions", "--jobs", "2")
    assert a == b


def test_missing_file(capsys):
    code, _, err = run(capsys, "metrics", "weight", "--covering", "/nonexistent.json")
    assert code == 2 and "cannot read" in err


def test_schema_rejection(capsys, tmp_path):
    bad = tmp_path / "cov.json"
    bad.write_text(json.dumps({"N": 2}))
    code, _, err = run(capsys, "metrics", "weight", "--covering", str(bad))
    assert code == 2 and "covering JSON invalid" in err


def test_console_script_module():
    out = subprocess.run([sys.executable, "-m", "hurwitz_plague.cli", "--version"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.strip() == "0.1.0"


def test_schemas_load():
    for kind in SCHEMAS:
        assert isinstance(load_schema(kind), dict)
    with pytest.raises(InputError):
        load_schema("nothing")


def test_shipped_registry_validates():
    from importlib import resources
    data = json.loads(resources.files("hurwitz_plague").joinpath("registry.json").read_text())
    validate("registry", data)


def test_dumps_is_deterministic(tmp_path):
    from fractions import Fraction
    text = dumps({"b": Fraction(3, 8), "a": {2, 1}})
    assert text == '{\n  "a": [\n    1,\n    2\n  ],\n  "b": "3/8"\n}\n'
    path = tmp_path / "g.json"
    write_json(path, {"x": [0], "y": [0]}, "graph")
    assert read_json(path, "graph") == {"x": [0], "y": [0]}
    with pytest.raises(InputError):
        write_json(path, {"x": "no"}, "graph")
    path.write_text("[")
    with pytest.raises(InputError):
        read_json(path)
