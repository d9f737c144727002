from __future__ import annotations

import json

import pytest

from invdist import suites
from invdist.cli import main
from invdist.report import render_markdown, write_report
from invdist.suites import (
    CapError,
    CheckResult,
    CheckSpec,
    Report,
    SuiteConfig,
    UnknownSuite,
    chk_relation,
    replay_witness,
    run_suite,
)

BRAID_LITERAL = CheckSpec("weil/p2/braid[literal]", chk_relation,
                          {"p": 2, "d": 2, "form": "hyperbolic", "m": 1, "k": 1, "relation": "braid",
                           "t": "1", "multiplier": "literal"})


@pytest.fixture
def failing_suite(monkeypatch):
    monkeypatch.setitem(suites.SUITES, "braid-literal", lambda cfg: [BRAID_LITERAL])
    return "braid-literal"


@pytest.fixture
def empty_suite(monkeypatch):
    monkeypatch.setitem(suites.SUITES, "empty", lambda cfg: [])
    return "empty"


# --- configuration ----------------------------------------------------------------


def test_config_rejects_unknown_keys_and_suites():
    with pytest.raises(ValueError):
        SuiteConfig.from_json({"suite": "fourier", "colour": "red"})
    with pytest.raises(UnknownSuite):
        SuiteConfig("no-such-suite").validate()


def test_config_caps():
    with pytest.raises(CapError):
        SuiteConfig("linalg-lemma", field="gf2", n=100).validate()
    with pytest.raises(CapError):
        SuiteConfig("fourier", p=5, m=2, k=2, d=3).validate()
    with pytest.raises(ValueError):
        SuiteConfig("fourier", p=4).validate()


def test_config_body_excludes_output():
    cfg = SuiteConfig("fourier", output="/tmp/x.json").validate()
    assert "output" not in cfg.body()


# --- running ------------------------------------------------------------------------


def test_linalg_lemma_gf2_r2_counts():
    rep = run_suite(SuiteConfig("linalg-lemma", field="gf2", n=2).validate(), workers=1)
    assert rep.exit_code == 0
    # four nilpotent 2x2 matrices over GF(2), 16 pairs (v, phi) each
    assert rep.summary["cases"] == 4 * 16


def test_weil_relations_all_pass():
    rep = run_suite(SuiteConfig("weil-relations", p=2, m=1, k=1, d=2).validate(), workers=1)
    assert rep.summary["fail"] == 0 and rep.summary["pass"] == len(rep.results)


def test_empty_report(empty_suite):
    rep = run_suite(SuiteConfig(empty_suite).validate(), workers=1)
    assert rep.summary == {"pass": 0, "fail": 0, "skipped": 0, "cases": 0}
    assert rep.exit_code == 0


def test_failure_carries_a_replayable_witness(failing_suite):
    rep = run_suite(SuiteConfig(failing_suite).validate(), workers=1)
    assert rep.exit_code == 1
    (r,) = rep.results
    assert r.status == "fail" and r.witness["kind"] == "projective"
    assert replay_witness(r.witness)
    half = dict(r.witness, multiplier="half")
    assert not replay_witness(half)


def test_failing_result_needs_witness():
    with pytest.raises(ValueError):
        CheckResult("x", "fail", None, 0.0)


def test_same_seed_gives_identical_bodies():
    cfg = SuiteConfig("nu-laws", seed=17).validate()
    a = run_suite(cfg, workers=1).body_bytes()
    b = run_suite(cfg, workers=1).body_bytes()
    assert a == b


def test_bodies_identical_across_worker_counts():
    cfg = SuiteConfig("orbit-dimension", seed=3).validate()
    one = run_suite(cfg, workers=1)
    four = run_suite(cfg, workers=4)
    assert one.body_bytes() == four.body_bytes()


def test_report_json_roundtrip_keeps_body():
    rep = run_suite(SuiteConfig("orthocomplement").validate(), workers=1)
    again = Report.from_json(json.loads(json.dumps(rep.to_json())))
    assert again.body_bytes() == rep.body_bytes()


def test_worker_env_cap(monkeypatch):
    monkeypatch.setenv("VERIFY_WORKERS", "2")
    assert suites.worker_count(8) == 2
    monkeypatch.setenv("VERIFY_WORKERS", "zero")
    with pytest.raises(ValueError):
        suites.worker_count(8)


# --- reports ----------------------------------------------------------------------------


def test_write_report_renders_figures(tmp_path, failing_suite):
    rep = run_suite(SuiteConfig(failing_suite).validate(), workers=1)
    paths = write_report(rep, str(tmp_path))
    for key in ("json", "markdown", "status", "runtime"):
        assert (tmp_path / paths[key].split("/")[-1]).exists()
    with open(paths["status"], "rb") as fh:
        assert fh.read(8) == b"\x89PNG\r\n\x1a\n"
    md = render_markdown(rep)
    assert "Witnesses" in md and "braid" in md


def test_empty_report_has_no_figures(tmp_path, empty_suite):
    rep = run_suite(SuiteConfig(empty_suite).validate(), workers=1)
    paths = write_report(rep, str(tmp_path))
    assert set(paths) == {"json", "markdown"}


# --- the command line -------------------------------------------------------------------


def test_cli_list(capsys):
    assert main(["verify", "--list"]) == 0
    names = capsys.readouterr().out.split()
    assert "weil-relations" in names and "acceptance" in names


def test_cli_verify_writes_output(tmp_path):
    out = tmp_path / "r.json"
    md = tmp_path / "r.md"
    assert main(["verify", "orthocomplement", "--output", str(out), "--markdown", str(md)]) == 0
    obj = json.loads(out.read_text())
    assert obj["summary"]["fail"] == 0 and "timing" in obj
    assert md.read_text().startswith("# Suite")


def test_cli_usage_errors(capsys):
    assert main(["verify", "no-such-suite"]) == 2
    assert main(["sets", "--lemma", "linalg", "--field", "gf2", "--n", "100"]) == 2
    assert main(["verify", "fourier", "--p", "4"]) == 2
    assert main(["maps", "--map", "profile", "--input", "/nonexistent.json"]) == 2
    capsys.readouterr()


def test_cli_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"suite": "linalg-lemma", "field": "gf3", "n": 2}))
    assert main(["verify", "--config", str(cfg), "--field", "gf2"]) == 0
    obj = json.loads(capsys.readouterr().out)
    assert obj["config"]["field"] == "gf2" and obj["summary"]["cases"] == 64
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"suite": "linalg-lemma", "bogus": 1}))
    assert main(["verify", "--config", str(bad)]) == 2


def test_cli_sets(capsys):
    assert main(["sets", "--lemma", "linalg", "--field", "gf2", "--n", "2"]) == 0
    assert json.loads(capsys.readouterr().out)["summary"]["cases"] == 64


def test_cli_weil_exit_codes(tmp_path, capsys):
    assert main(["weil", "--relation", "j4"]) == 0
    assert main(["weil", "--relation", "braid"]) == 1
    rep = tmp_path / "w.json"
    assert main(["weil", "--relation", "braid", "--multiplier", "half", "--report", str(rep)]) == 0
    assert json.loads(rep.read_text())["status"] == "pass"
    assert main(["weil", "--p", "5", "--level", "3,3"]) == 2
    capsys.readouterr()


def test_cli_maps(tmp_path, capsys):
    m = tmp_path / "m.json"
    m.write_text(json.dumps({"field": "Q", "entries": [["1", "1"], ["0", "1"]]}))
    assert main(["maps", "--map", "jordan-chevalley", "--input", str(m)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["semisimple"]["entries"] == [["1", "0"], ["0", "1"]]
    assert out["nilpotent"]["entries"] == [["0", "1"], ["0", "0"]]
    assert main(["maps", "--map", "trace-slice", "--input", str(m)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["trace"] == "2" and out["matrix"]["entries"] == [["0", "1"], ["0", "0"]]
    pt = tmp_path / "p.json"
    pt.write_text(json.dumps({"field": "Q", "A": [["0", "0"], ["0", "0"]], "v": ["1", "0"], "phi": ["0", "1"]}))
    assert main(["maps", "--map", "nu", "--input", str(pt), "--value", "1"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["point"]["A"] == [["0", "1"], ["0", "0"]]
    assert main(["maps", "--map", "nu", "--input", str(pt)]) == 2


def test_cli_report(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["verify", "orthocomplement", "--output", str(out)]) == 0
    d = tmp_path / "fig"
    assert main(["report", "--input", str(out), "--out-dir", str(d)]) == 0
    assert (d / "status.png").exists() and (d / "report.md").exists()
    capsys.readouterr()
