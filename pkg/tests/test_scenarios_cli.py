"""Scenario parsing, check registry, and the command line runner."""

import csv
import json
import shutil

import pytest

from pairinglab.cli import main
from pairinglab.errors import SpecError, UnknownCheck
from pairinglab.scenarios import (CHECKS, CheckSpec, load_catalog,
                                  load_scenario_file, parse_scenario,
                                  run_check, run_scenario)

FAST_SCENARIO = {
    "id": "tiny_jump",
    "field": {"kind": "const", "params": {"c": 1.0}},
    "bv": {"kind": "bv1d", "domain": [-2.0, 2.0],
           "ac": {"type": "constant", "value": 0.2},
           "jumps": [[0.3, 0.2, 1.2]]},
    "phi": {"kind": "bump1d", "a": -1.8, "b": 1.8},
    "window": [-2.0, 2.0],
    "checks": [{"name": "two_route", "tolerance": 1e-6},
               {"name": "chain_rule", "tolerance": 1e-8}],
}


# ---------------------------------------------------------------------------
# parsing


def test_parse_round_trip():
    sc = parse_scenario(FAST_SCENARIO)
    assert sc.id == "tiny_jump"
    assert [c.name for c in sc.checks] == ["two_route", "chain_rule"]
    ctx = sc.resolve()
    assert ctx.field.name.startswith("const")
    assert abs(ctx.u.sup_norm() - 1.2) < 1e-12


def test_parse_rejects_bad_tolerance():
    bad = dict(FAST_SCENARIO,
               checks=[{"name": "two_route", "tolerance": 0.0}])
    with pytest.raises(SpecError):
        parse_scenario(bad)


def test_parse_rejects_missing_keys():
    with pytest.raises(SpecError):
        parse_scenario({"id": "x"})


def test_resolve_rejects_unknown_kinds():
    for key, bad in (("field", {"kind": "nope"}),
                     ("bv", {"kind": "nope"}),
                     ("phi", {"kind": "nope"})):
        sc = parse_scenario(dict(FAST_SCENARIO, **{key: bad}))
        with pytest.raises(SpecError):
            sc.resolve()


def test_shipped_catalog_loads():
    cat = load_catalog()
    assert len(cat) == 21
    assert all(sid.startswith("s") for sid in cat)
    kinds = {sc.bv_spec["kind"] for sc in cat.values()}
    assert kinds == {"bv1d", "bv2d"}


def test_load_scenario_file_error(tmp_path):
    p = tmp_path / "broken.json"
    p.write_text("{not json")
    with pytest.raises(SpecError):
        load_scenario_file(p)


# ---------------------------------------------------------------------------
# check execution


def test_run_check_unknown_name():
    ctx = parse_scenario(FAST_SCENARIO).resolve()
    with pytest.raises(UnknownCheck):
        run_check(ctx, CheckSpec("no_such_check", 1e-6))


def test_run_check_report_schema():
    ctx = parse_scenario(FAST_SCENARIO).resolve()
    out = run_check(ctx, CheckSpec("two_route", 1e-6))
    rep = out.to_report()
    assert set(rep) == {"scenario", "check", "lhs", "rhs", "residual",
                        "tolerance", "pass", "diagnostics"}
    assert rep["pass"] is True


def test_run_check_tol_scale_can_force_failure():
    ctx = parse_scenario(FAST_SCENARIO).resolve()
    out = run_check(ctx, CheckSpec("coarea_variation", 1e-5),
                    tol_scale=1e-30)
    assert not out.passed


def test_run_check_converts_errors_to_failed_outcome():
    # t-dependent field over a Cantor carrier: the recovery-sequence
    # integrals are out of scope and must surface as a failed outcome
    spec = dict(FAST_SCENARIO, id="bad_relax",
                field={"kind": "gt"},
                bv={"kind": "bv1d", "domain": [-2.0, 2.0],
                    "cantor": {"interval": [0.0, 1.0], "scale": 1.0}},
                checks=[{"name": "relaxation", "tolerance": 1e-4}])
    outs = run_scenario(parse_scenario(spec))
    assert len(outs) == 1
    assert not outs[0].passed
    assert "AssumptionViolation" in outs[0].diagnostics["error"]


def test_run_scenario_overall(tmp_path):
    outs = run_scenario(parse_scenario(FAST_SCENARIO))
    assert all(o.passed for o in outs)


# ---------------------------------------------------------------------------
# command line


def _write_fast(tmp_path):
    p = tmp_path / "tiny_jump.json"
    p.write_text(json.dumps(FAST_SCENARIO))
    return p


def test_cli_list(capsys):
    assert main(["list"]) == 0
    out = capsys.readouterr().out.split()
    assert len(out) == 21


def test_cli_run_single_scenario(tmp_path, capsys):
    p = _write_fast(tmp_path)
    outdir = tmp_path / "reports"
    code = main(["run", str(p), "--out", str(outdir)])
    assert code == 0
    rep = json.loads((outdir / "tiny_jump.json").read_text())
    assert rep["overall_pass"] is True
    assert {c["check"] for c in rep["checks"]} == {"two_route", "chain_rule"}
    assert "timing_seconds" in rep
    with open(outdir / "aggregate.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["scenario", "check", "residual", "pass"]
    assert len(rows) == 3
    assert all(r[3] == "pass" for r in rows[1:])


def test_cli_run_stable_is_deterministic(tmp_path):
    p = _write_fast(tmp_path)
    texts = []
    for name in ("r1", "r2"):
        outdir = tmp_path / name
        assert main(["run", str(p), "--stable", "--out", str(outdir)]) == 0
        rep = json.loads((outdir / "tiny_jump.json").read_text())
        assert "timing_seconds" not in rep
        assert "environment" not in rep
        texts.append((outdir / "tiny_jump.json").read_bytes())
    assert texts[0] == texts[1]


def test_cli_run_parse_error_exit_2(tmp_path, capsys):
    p = tmp_path / "broken.json"
    p.write_text("{not json")
    assert main(["run", str(p), "--out", str(tmp_path / "r")]) == 2


def test_cli_keep_going_skips_malformed(tmp_path, capsys):
    d = tmp_path / "cat"
    d.mkdir()
    (d / "broken.json").write_text("{not json")
    (d / "tiny_jump.json").write_text(json.dumps(FAST_SCENARIO))
    outdir = tmp_path / "r"
    assert main(["run", str(d), "--keep-going", "--out", str(outdir)]) == 0
    err = capsys.readouterr().err
    assert "skipped" in err and "broken.json" in err
    assert (outdir / "tiny_jump.json").exists()


def test_cli_run_failure_exit_1(tmp_path, monkeypatch):
    p = _write_fast(tmp_path)
    monkeypatch.setenv("LAB_TOL_SCALE", "1e-30")
    code = main(["run", str(p), "--out", str(tmp_path / "r")])
    assert code == 1


def test_cli_jobs_parallel_matches_serial(tmp_path):
    d = tmp_path / "cat"
    d.mkdir()
    for sid in ("a_one", "b_two"):
        (d / f"{sid}.json").write_text(
            json.dumps(dict(FAST_SCENARIO, id=sid)))
    serial = tmp_path / "serial"
    par = tmp_path / "par"
    assert main(["run", str(d), "--stable", "--out", str(serial)]) == 0
    assert main(["run", str(d), "--stable", "--jobs", "2",
                 "--out", str(par)]) == 0
    for sid in ("a_one", "b_two"):
        assert (serial / f"{sid}.json").read_bytes() \
            == (par / f"{sid}.json").read_bytes()
    assert (serial / "aggregate.csv").read_bytes() \
        == (par / "aggregate.csv").read_bytes()


def test_cli_series_blowup(tmp_path, capsys):
    out = tmp_path / "series.csv"
    assert main(["series", "s04_jump_gt", "blowup", str(out)]) == 0
    with open(out) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["parameter", "value"]
    assert len(rows) > 1
    radii = [float(r[0]) for r in rows[1:]]
    assert radii == sorted(radii, reverse=True)


def test_cli_series_header_only_for_tableless_check(tmp_path):
    out = tmp_path / "series.csv"
    assert main(["series", "s01_smooth_const", "two_route", str(out)]) == 0
    with open(out) as fh:
        rows = list(csv.reader(fh))
    assert rows == [["parameter", "value"]]


def test_cli_series_unknown_inputs(tmp_path, capsys):
    out = tmp_path / "series.csv"
    assert main(["series", "no_such_scenario", "blowup", str(out)]) == 2
    assert main(["series", "s01_smooth_const", "no_such_check",
                 str(out)]) == 2


def test_checks_registry_is_complete():
    assert set(CHECKS) == {
        "two_route", "traces_route", "coarea_pairing", "coarea_variation",
        "chain_rule", "mass_bound", "lipschitz", "gauss_green",
        "cyl_average", "approximation", "continuity", "lsc", "relaxation",
        "blowup", "sigma_k", "order_relations"}
