"""Command line runner for the scenario catalog.

    pairinglab run [PATH] [--keep-going] [--stable] [--jobs N] [--out DIR]
    pairinglab list
    pairinglab series SCENARIO CHECK OUT.CSV

``run`` executes every check of every scenario found at PATH (a JSON file or
a directory of them; default: the shipped catalog), writes one report JSON
per scenario plus an aggregate CSV, and exits 0 only if everything passed.
Exit code 2 flags scenario files that could not be parsed; with
--keep-going such files are skipped with a logged reason instead.

The environment variable LAB_TOL_SCALE multiplies every tolerance.
"""

import argparse
import csv
import json
import os
import pathlib
import platform
import sys
import time
from concurrent.futures import ThreadPoolExecutor

from .errors import SpecError, UnknownCheck
from .scenarios import (CHECKS, CheckSpec, load_catalog, load_scenario_file,
                        run_check, run_scenario, shipped_catalog_dir)


def _tol_scale():
    try:
        return float(os.environ.get("LAB_TOL_SCALE", "1.0"))
    except ValueError:
        return 1.0


def _collect_scenarios(path, keep_going):
    """(scenarios, skipped) where skipped is [(path, reason), ...]."""
    if path is None:
        base = shipped_catalog_dir()
        files = sorted(str(p) for p in base.glob("*.json"))
    else:
        p = pathlib.Path(path)
        if p.is_dir():
            files = sorted(str(q) for q in p.glob("*.json"))
        else:
            files = [str(p)]
    scenarios, skipped = [], []
    for f in files:
        try:
            scenarios.append(load_scenario_file(f))
        except SpecError as exc:
            if not keep_going:
                raise
            skipped.append((f, str(exc)))
    return scenarios, skipped


def _scenario_report(scenario, tol_scale, stable):
    t0 = time.time()
    outcomes = run_scenario(scenario, tol_scale=tol_scale)
    report = {
        "scenario": scenario.id,
        "checks": [o.to_report() for o in outcomes],
        "overall_pass": all(o.passed for o in outcomes),
    }
    if not stable:
        report["timing_seconds"] = round(time.time() - t0, 3)
        report["environment"] = {
            "python": platform.python_version(),
            "platform": platform.platform(),
        }
    return report, outcomes


def _write_atomic(path, text):
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(text)
    tmp.replace(path)


def cmd_run(args):
    try:
        scenarios, skipped = _collect_scenarios(args.path, args.keep_going)
    except SpecError as exc:
        print(f"spec error: {exc}", file=sys.stderr)
        return 2
    for f, reason in skipped:
        print(f"skipped {f}: {reason}", file=sys.stderr)
    if not scenarios:
        print("no scenarios found", file=sys.stderr)
        return 2
    outdir = pathlib.Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    scale = _tol_scale()

    def job(sc):
        return sc.id, _scenario_report(sc, scale, args.stable)

    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            results = dict(pool.map(job, scenarios))
    else:
        results = dict(job(sc) for sc in scenarios)

    all_pass = True
    rows = []
    for sc in scenarios:  # deterministic aggregation order
        report, outcomes = results[sc.id]
        _write_atomic(outdir / f"{sc.id}.json",
                      json.dumps(report, indent=2, sort_keys=True) + "\n")
        for o in outcomes:
            rows.append((sc.id, o.check, f"{o.residual:.6e}",
                         "pass" if o.passed else "fail"))
            all_pass = all_pass and o.passed
            status = "pass" if o.passed else "FAIL"
            print(f"{sc.id:28s} {o.check:18s} {status}  "
                  f"residual={o.residual:.3e}")
    with open(outdir / "aggregate.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["scenario", "check", "residual", "pass"])
        w.writerows(rows)
    return 0 if all_pass else 1


def cmd_list(args):
    try:
        cat = load_catalog(args.path)
    except SpecError as exc:
        print(f"spec error: {exc}", file=sys.stderr)
        return 2
    for sid in sorted(cat):
        print(sid)
    return 0


def cmd_series(args):
    try:
        cat = load_catalog(None)
        if args.scenario not in cat:
            print(f"unknown scenario {args.scenario!r}", file=sys.stderr)
            return 2
        scenario = cat[args.scenario]
    except SpecError as exc:
        print(f"spec error: {exc}", file=sys.stderr)
        return 2
    spec = next((c for c in scenario.checks if c.name == args.check), None)
    if spec is None:
        if args.check not in CHECKS:
            print(f"unknown check {args.check!r}", file=sys.stderr)
            return 2
        spec = CheckSpec(args.check, 1e-6)
    try:
        outcome = run_check(scenario.resolve(), spec,
                            tol_scale=_tol_scale())
    except UnknownCheck as exc:
        print(f"unknown check: {exc}", file=sys.stderr)
        return 2
    out = pathlib.Path(args.output)
    with open(out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["parameter", "value"])
        for param, value in outcome.table:
            w.writerow([f"{float(param):.10g}", f"{float(value):.12g}"])
    print(f"wrote {len(outcome.table)} rows to {out}")
    return 0


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="pairinglab",
        description="run pairing verification scenarios")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute scenario checks")
    p_run.add_argument("path", nargs="?", default=None,
                       help="scenario JSON file or directory "
                            "(default: shipped catalog)")
    p_run.add_argument("--keep-going", action="store_true",
                       help="skip malformed scenario files")
    p_run.add_argument("--stable", action="store_true",
                       help="omit timing/environment stamps from reports")
    p_run.add_argument("--jobs", type=int, default=1, metavar="N",
                       help="run scenarios in N parallel workers")
    p_run.add_argument("--out", default="lab_reports",
                       help="report output directory")
    p_run.set_defaults(func=cmd_run)

    p_list = sub.add_parser("list", help="print scenario ids")
    p_list.add_argument("path", nargs="?", default=None)
    p_list.set_defaults(func=cmd_list)

    p_series = sub.add_parser("series",
                              help="emit a check's table as CSV")
    p_series.add_argument("scenario")
    p_series.add_argument("check")
    p_series.add_argument("output")
    p_series.set_defaults(func=cmd_series)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
