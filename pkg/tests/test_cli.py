import io
import json
import random

import jsonschema
import pytest

from dvbkit import serialize
from dvbkit.cli import MUTATIONS, REPORT_SCHEMA, SUITES, main
from dvbkit.poisson2 import symplectic_from_metric_bundle
from dvbkit.randomgen import random_compatible_connection, random_fiber_metric


def run(*argv):
    out = io.StringIO()
    return main(list(argv), out=out), out.getvalue()


@pytest.fixture
def tworep_file(tmp_path):
    path = tmp_path / "rep.json"
    assert run("build", "random-tworep", "--out", str(path))[0] == 0
    return path


def test_valid_tworep_passes_axioms(tworep_file, tmp_path):
    report = tmp_path / "r.json"
    code, text = run("verify", str(tworep_file), "--suite", "axioms", "--report", str(report))
    assert code == 0 and "verdict: PASS" in text
    doc = json.loads(report.read_text())
    jsonschema.validate(doc, REPORT_SCHEMA)
    assert doc["verdict"] == "pass" and doc["summary"]["failures"] == 0


def test_mutated_tworep_fails_with_named_residual(tworep_file, tmp_path):
    report = tmp_path / "r.json"
    code, text = run("verify", str(tworep_file), "--mutate", "curvature", "--report", str(report))
    assert code == 1 and "verdict: FAIL" in text
    doc = json.loads(report.read_text())
    jsonschema.validate(doc, REPORT_SCHEMA)
    failed = [c for c in doc["checks"] if c["status"] == "fail"]
    assert failed and all(c["name"] and c["residual"] for c in failed)
    assert doc["mutate"] == "curvature" and doc["summary"]["failures"] == len(failed)


def test_every_suite_passes_on_random_instances(tmp_path):
    # random tworeps carry no identification; symplecticity is a property, not an axiom
    expected = {("tworep", "selfdual"): 2, ("poisson2", "symplectic"): 1}
    for kind, suites in SUITES.items():
        path = tmp_path / f"{kind}.json"
        assert run("build", f"random-{kind}", "--out", str(path))[0] == 0
        for suite in suites:
            code, text = run("verify", str(path), "--suite", suite, "--samples", "2")
            assert code == expected.get((kind, suite), 0), (kind, suite, text)


def test_symplectic_suite_on_metric_bundle(tmp_path):
    rng = random.Random(3)
    metric = random_fiber_metric(rng, 1, 2)
    path = tmp_path / "p.json"
    path.write_text(serialize.dumps(symplectic_from_metric_bundle(metric, random_compatible_connection(rng, metric))))
    assert run("verify", str(path), "--suite", "symplectic")[0] == 0


def test_two_man_atlas_roundtrip(tmp_path):
    path = tmp_path / "atlas.json"
    assert run("build", "random-two-man-atlas", "--out", str(path))[0] == 0
    code, text = run("roundtrip", str(path), "--report", str(tmp_path / "r.json"))
    assert code == 0
    doc = json.loads((tmp_path / "r.json").read_text())
    assert doc["command"] == "roundtrip" and doc["verdict"] == "pass"


def test_geometrize_then_algebraize(tmp_path):
    src, geo, back = (tmp_path / name for name in ("t.json", "g.json", "b.json"))
    run("build", "random-two-man-atlas", "--out", str(src))
    assert run("build", "geometrize", str(src), "--out", str(geo))[0] == 0
    assert run("build", "algebraize", str(geo), "--out", str(back))[0] == 0
    assert back.read_text() == src.read_text()


def test_seed_controls_output(monkeypatch):
    monkeypatch.delenv("DVBKIT_SEED", raising=False)
    default = run("build", "random-tworep")[1]
    assert run("build", "random-tworep", "--seed", "42")[1] == default
    monkeypatch.setenv("DVBKIT_SEED", "9")
    from_env = run("build", "random-tworep")[1]
    assert from_env != default
    assert run("build", "random-tworep", "--seed", "42")[1] == default
    monkeypatch.setenv("DVBKIT_SEED", "x")
    assert run("build", "random-tworep")[0] == 2


def test_report_seed_recorded(tworep_file, tmp_path, monkeypatch):
    monkeypatch.setenv("DVBKIT_SEED", "7")
    run("verify", str(tworep_file), "--suite", "twist", "--samples", "1", "--report", str(tmp_path / "r.json"))
    assert json.loads((tmp_path / "r.json").read_text())["seed"] == 7


def test_input_errors(tmp_path, tworep_file):
    assert run("verify", str(tmp_path / "missing.json"))[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"format": 1, "kind": "tworep", "payload": {}}')
    assert run("verify", str(bad))[0] == 2
    assert run("verify", str(tworep_file), "--mutate", "no-such-axiom")[0] == 2
    assert run("verify", str(tworep_file), "--suite", "symplectic")[0] == 2


def test_mutations_are_listed_per_kind():
    assert set(MUTATIONS) == set(serialize.KINDS)
    assert "chain" in MUTATIONS["tworep"]
