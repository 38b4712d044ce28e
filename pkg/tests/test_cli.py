import filecmp
import json
import os

import pytest

from rootlift import cli, scenarios
from rootlift.cli import ScenarioError, main, run_scenario, validate_config


def _small_example1(n=301):
    return scenarios.builtin_scenario("example1", samples=n)


def test_schema_rejects_bad_kind():
    cfg = {"name": "x", "base": {"kind": "moebius"}}
    with pytest.raises(ScenarioError) as err:
        validate_config(cfg)
    assert "$.base.kind" in str(err.value)


def test_schema_rejects_analysis_base_mismatch():
    cfg = {"name": "x", "base": {"kind": "interval", "samples": 10},
           "analyses": ["strips"]}
    with pytest.raises(ScenarioError):
        validate_config(cfg)


def test_schema_requires_polynomial_for_extension_analyses():
    cfg = {"name": "x", "base": {"kind": "circle", "samples": 12},
           "analyses": ["cole"]}
    with pytest.raises(ScenarioError):
        validate_config(cfg)


def test_run_example1_small(tmp_path):
    code = run_scenario(_small_example1(), str(tmp_path))
    assert code == 0
    doc = json.loads((tmp_path / "verdict.json").read_text())
    assert doc["analyses"]["cole"]["answer"] == "yes"
    assert doc["analyses"]["ah"]["answer"] == "yes"
    assert doc["expectations"]["matched"]
    assert (tmp_path / "bundle_p.csv").exists()
    assert (tmp_path / "bundle_pT.csv").exists()
    assert (tmp_path / "lift_f.csv").exists()


def test_bundle_csv_columns(tmp_path):
    run_scenario(_small_example1(), str(tmp_path))
    header = (tmp_path / "bundle_p.csv").read_text().splitlines()[0]
    assert header == "sample_index,coord,sheet_index,root_re,root_im,branch_flag"
    line = (tmp_path / "bundle_p.csv").read_text().splitlines()[1]
    assert line.split(",")[0] == "0"


def test_determinism_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    cfg = scenarios.builtin_scenario("example2", samples=240)
    run_scenario(cfg, str(a), svg=True)
    run_scenario(cfg, str(b), svg=True)
    for name in ("verdict.json", "bundle_p.csv", "bundle_pT.csv",
                 "lift_f.csv", os.path.join("figures", "bundle_p.svg")):
        assert filecmp.cmp(a / name, b / name, shallow=False), name


def test_exit_code_two_on_expectation_mismatch(tmp_path):
    cfg = _small_example1()
    cfg["expect"] = {"cole": "no"}
    assert run_scenario(cfg, str(tmp_path)) == 2
    doc = json.loads((tmp_path / "verdict.json").read_text())
    assert not doc["expectations"]["matched"]


def test_exit_code_one_on_bad_config(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"name": "x", "base": {"kind": "nope"}}))
    assert main(["run", str(bad), "--out", str(tmp_path / "out")]) == 1


def test_exit_code_one_on_missing_file(tmp_path):
    assert main(["run", str(tmp_path / "nope.json"),
                 "--out", str(tmp_path / "out")]) == 1


def test_main_builtin_roundtrip(tmp_path):
    code = main(["builtin", "example3", "--samples", "200",
                 "--out", str(tmp_path)])
    assert code == 0
    doc = json.loads((tmp_path / "verdict.json").read_text())
    assert doc["analyses"]["cole"]["answer"] == "no"
    assert doc["analyses"]["cole"]["certificate_kind"] == "fiber_count"


def test_run_config_file_via_main(tmp_path):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(_small_example1(201)))
    assert main(["run", str(cfg_path), "--out", str(tmp_path / "out")]) == 0


def test_stability_flag(tmp_path):
    cfg = scenarios.builtin_scenario("example3", samples=200)
    code = run_scenario(cfg, str(tmp_path), stability=True)
    assert code == 0
    doc = json.loads((tmp_path / "verdict.json").read_text())
    assert doc["stability"]["stable"]
    assert doc["stability"]["runs"] == ["base", "2n", "4n"]


def test_stability_with_explicit_resolutions(tmp_path):
    cfg = scenarios.builtin_scenario("example3", samples=200)
    cfg["resolutions"] = [300, 500]
    code = run_scenario(cfg, str(tmp_path), stability=True)
    assert code == 0
    doc = json.loads((tmp_path / "verdict.json").read_text())
    assert doc["stability"]["runs"] == ["base", "n=300", "n=500"]
    assert doc["stability"]["stable"]


def test_torus_builtin(tmp_path):
    cfg = scenarios.builtin_scenario("torus", samples=16)
    code = run_scenario(cfg, str(tmp_path))
    assert code == 0
    doc = json.loads((tmp_path / "verdict.json").read_text())
    assert doc["analyses"]["cole"]["answer"] == "no"
    assert doc["analyses"]["torus_controls"]["identity_cole"]["answer"] == "yes"


def test_graphdemo_builtin(tmp_path):
    cfg = scenarios.builtin_scenario("graphdemo", samples=8)
    assert run_scenario(cfg, str(tmp_path)) == 0
    doc = json.loads((tmp_path / "verdict.json").read_text())
    closed = doc["analyses"]["closedness"]
    assert closed["algebraically_closed_verdict"] is False
    assert len(closed["cycle_witnesses"]) == 2


def test_svg_has_five_labeled_curves(tmp_path):
    cfg = scenarios.builtin_scenario("example2", samples=240)
    run_scenario(cfg, str(tmp_path), svg=True)
    svg = (tmp_path / "figures" / "bundle_p.svg").read_text()
    assert svg.count("<polyline") == 10        # five curves in two panels
    for k in range(1, 6):
        assert f">s{k}<" in svg
    assert "timestamp" not in svg


def test_factored_roots_must_close_up(tmp_path):
    cfg = {
        "name": "broken",
        "base": {"kind": "circle", "samples": 600},
        "polynomial": {"roots": ["theta", "-theta+5"]},
        "selfmap": {"identity": True},
        "analyses": ["cole"],
    }
    cfg_path = tmp_path / "broken.json"
    cfg_path.write_text(json.dumps(cfg))
    assert main(["run", str(cfg_path), "--out", str(tmp_path / "out")]) == 1
    with pytest.raises(ScenarioError):
        run_scenario(cfg, str(tmp_path / "out2"))


def test_svg_interval_bundle(tmp_path):
    cfg = _small_example1(201)
    run_scenario(cfg, str(tmp_path), svg=True)
    svg = (tmp_path / "figures" / "bundle_p.svg").read_text()
    assert svg.count("<polyline") == 4          # two sheets in two panels


def test_crossing_assertions_run_at_load(tmp_path):
    cfg = scenarios.builtin_scenario("example2", samples=240)
    run_scenario(cfg, str(tmp_path))
    doc = json.loads((tmp_path / "verdict.json").read_text())
    assert "assertions" in doc["analyses"]
