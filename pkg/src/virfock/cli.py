"""Command line front end: scenario selection, sweeps, text/JSON reports.

Exit codes: 0 every check passed, 1 at least one check failed, 2 usage or
configuration error.  All scalars are printed as exact rationals p/q.
"""

from __future__ import annotations

import argparse
import json
import sys
from .algebra import format_rational, parse_rational
from .dirac import Window
from .verify import (
    ScenarioParams,
    claimed_central_charge,
    default_truncation,
    extract_central_charge,
    run_dirac_checks,
    run_family_scenario,
)

FAMILY_SCENARIOS = (
    "boson-unconstrained",
    "boson-reduced",
    "fermion-unconstrained",
    "fermion-reduced",
)
SCENARIOS = FAMILY_SCENARIOS + ("dirac-checks", "all")


class ConfigError(Exception):
    pass


def _build_parser():
    p = argparse.ArgumentParser(
        prog="virfock",
        description="Exact verification of free-field and constrained Virasoro Fock modules.")
    p.add_argument("--scenario", default="all", choices=SCENARIOS)
    p.add_argument("--M", default="1", help="mass-like parameter, exact rational p/q")
    p.add_argument("--lambda", dest="lam", default="1/2", help="family parameter, exact rational")
    p.add_argument("--level", type=int, default=6, help="level cap (fermions use (2*level-1)/2)")
    p.add_argument("--zmax", type=int, default=4, help="a†[0] occupancy cap")
    p.add_argument("--mmax", type=int, default=3, help="generator label range")
    p.add_argument("--window", type=int, default=8, help="constraint window half-width")
    p.add_argument("--format", dest="fmt", default="text", choices=("text", "json"))
    p.add_argument("--sweep", metavar="FILE", default=None,
                   help="file of 'M lambda' rational pairs, one per line, # comments")
    return p


def _parse_args(argv):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        raise ConfigError("bad command line") from exc
    try:
        args.M = parse_rational(args.M)
        args.lam = parse_rational(args.lam)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"parameters must be exact rationals p/q: {exc}") from exc
    if args.level < 1 or args.zmax < 0 or args.mmax < 2 or args.window < 1:
        raise ConfigError("caps out of range: need level >= 1, zmax >= 0, mmax >= 2, window >= 1")
    return args


def _scenario_params(family, args) -> ScenarioParams:
    if family == "boson-reduced" and args.M == 0:
        raise ConfigError("boson-reduced needs M != 0: the generator kernel carries 1/M")
    trunc = default_truncation(family, args.level, args.zmax)
    return ScenarioParams(family, args.M, args.lam, trunc, args.mmax, Window(args.window))


def _run_scenarios(args):
    runs = []
    names = FAMILY_SCENARIOS + ("dirac-checks",) if args.scenario == "all" else (args.scenario,)
    for name in names:
        if name == "dirac-checks":
            if args.M == 0:
                raise ConfigError("dirac-checks needs M != 0 for the boson constraint matrix")
            reports = run_dirac_checks(args.M, Window(args.window))
            runs.append({"scenario": name, "reports": reports})
        else:
            params = _scenario_params(name, args)
            reports, c_formula, c_oracle = run_family_scenario(params)
            runs.append({"scenario": name, "reports": reports,
                         "c_formula": c_formula, "c_oracle": c_oracle})
    return runs


def _sweep(args):
    if args.scenario not in FAMILY_SCENARIOS:
        raise ConfigError("--sweep needs a generator-family scenario")
    try:
        with open(args.sweep) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read sweep file: {exc}") from exc
    grid = []
    for line in lines:
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        parts = text.split()
        if len(parts) != 2:
            raise ConfigError(f"sweep rows are 'M lambda' pairs, got {text!r}")
        try:
            grid.append((parse_rational(parts[0]), parse_rational(parts[1])))
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"bad rational in sweep row {text!r}: {exc}") from exc
    if not grid:
        raise ConfigError("sweep grid is empty")
    rows = []
    for M, lam in grid:
        if args.scenario == "boson-reduced" and M == 0:
            raise ConfigError("boson-reduced needs M != 0: the generator kernel carries 1/M")
        trunc = default_truncation(args.scenario, args.level, args.zmax)
        params = ScenarioParams(args.scenario, M, lam, trunc, args.mmax, Window(args.window))
        formula = claimed_central_charge(args.scenario, M, lam)
        oracle = extract_central_charge(params)
        rows.append({"M": M, "lambda": lam, "c_formula": formula,
                     "c_oracle": oracle, "match": formula == oracle})
    return rows


def _summary(reports):
    total = len(reports)
    passed = sum(1 for r in reports if r.status == "pass")
    failed = sum(1 for r in reports if r.status == "fail")
    skipped = total - passed - failed
    return {"total": total, "passed": passed, "failed": failed, "skipped": skipped}


def _emit_runs(runs, args):
    all_reports = [r for run in runs for r in run["reports"]]
    if args.fmt == "json":
        payload = {
            "scenario": args.scenario,
            "params": {"M": format_rational(args.M), "lambda": format_rational(args.lam),
                       "level": args.level, "zmax": args.zmax, "mmax": args.mmax,
                       "window": args.window},
            "summary": _summary(all_reports),
        }
        blocks = []
        for run in runs:
            block = {"scenario": run["scenario"],
                     "checks": [r.to_dict() for r in run["reports"]]}
            if "c_formula" in run:
                block["c_formula"] = format_rational(run["c_formula"])
                block["c_oracle"] = format_rational(run["c_oracle"])
            blocks.append(block)
        if len(runs) == 1:
            payload["checks"] = blocks[0]["checks"]
            if "c_formula" in blocks[0]:
                payload["c_formula"] = blocks[0]["c_formula"]
                payload["c_oracle"] = blocks[0]["c_oracle"]
        else:
            payload["runs"] = blocks
        print(json.dumps(payload, indent=2))
    else:
        for run in runs:
            print(f"== scenario {run['scenario']} ==")
            for r in run["reports"]:
                print(r.line())
            if "c_formula" in run:
                print(f"c_formula={format_rational(run['c_formula'])} "
                      f"c_oracle={format_rational(run['c_oracle'])}")
        s = _summary(all_reports)
        print(f"summary: {s['passed']}/{s['total']} passed, {s['failed']} failed")
    return 0 if all(r.ok for r in all_reports) else 1


def _emit_sweep(rows, args):
    ok = all(row["match"] for row in rows)
    if args.fmt == "json":
        payload = {
            "scenario": args.scenario,
            "params": {"level": args.level, "zmax": args.zmax, "mmax": args.mmax,
                       "window": args.window},
            "sweep": [{"M": format_rational(r["M"]), "lambda": format_rational(r["lambda"]),
                       "c_formula": format_rational(r["c_formula"]),
                       "c_oracle": format_rational(r["c_oracle"]),
                       "match": r["match"]} for r in rows],
            "summary": {"total": len(rows),
                        "passed": sum(1 for r in rows if r["match"]),
                        "failed": sum(1 for r in rows if not r["match"]),
                        "skipped": 0},
        }
        print(json.dumps(payload, indent=2))
    else:
        for r in rows:
            print(f"M={format_rational(r['M'])} lambda={format_rational(r['lambda'])} "
                  f"c_formula={format_rational(r['c_formula'])} "
                  f"c_oracle={format_rational(r['c_oracle'])} "
                  f"{'match' if r['match'] else 'MISMATCH'}")
    return 0 if ok else 1


def main(argv=None) -> int:
    try:
        args = _parse_args(sys.argv[1:] if argv is None else argv)
        if args.sweep is not None:
            return _emit_sweep(_sweep(args), args)
        return _emit_runs(_run_scenarios(args), args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
