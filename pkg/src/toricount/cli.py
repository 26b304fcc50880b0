"""Command-line driver: ``toricount {fan,series,count,verify}``.

Exit statuses: 0 success, 1 failed verification, 2 usage error,
3 fan validation failure, 4 oracle mismatch, 5 budget exhausted.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from toricount import ffcount
from toricount.curve import CurveError, curve_from_config, curve_preset
from toricount.euler import (campana_admissible_local, campana_moebius, classical_moebius,
                             euler_product_counting, euler_product_motivic)
from toricount.fan import FanError, dump_fan, load_fan, picard_lattice, validate
from toricount.mvseries import Truncation
from toricount.predict import convergence_report
from toricount.verify import SUITES, run_suite

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_INVALID, EXIT_MISMATCH, EXIT_BUDGET = 0, 1, 2, 3, 4, 5


def _ints(text):
    return tuple(int(x) for x in text.replace(" ", "").split(",") if x)


def _fan_or_exit(spec):
    try:
        fan = load_fan(spec)
    except (FanError, OSError, ValueError) as exc:
        print(f"error: cannot load fan {spec!r}: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_INVALID)
    report = validate(fan)
    if not report.ok:
        print(f"error: fan {fan.label or spec} is invalid:", file=sys.stderr)
        for line in report.details:
            print(f"  - {line}", file=sys.stderr)
        raise SystemExit(EXIT_INVALID)
    return fan


def _curve(spec):
    if spec is None:
        return curve_preset("p1")
    path = Path(spec)
    if path.suffix == ".json" and path.exists():
        return curve_from_config(json.loads(path.read_text()))
    return curve_preset(spec)


def _write(text, out, suffix=""):
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(str(out) + suffix)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    print(f"wrote {path}", file=sys.stderr)


# ------------------------------------------------------------------ fan

def cmd_fan(args):
    if args.action == "validate":
        try:
            fan = load_fan(args.fan)
        except (FanError, OSError, ValueError) as exc:
            print(f"invalid: {exc}")
            return EXIT_INVALID
        report = validate(fan)
        print(f"fan {fan.label or args.fan}: smooth={report.smooth} complete={report.complete}")
        for line in report.details:
            print(f"  - {line}")
        return EXIT_OK if report.ok else EXIT_INVALID
    fan = _fan_or_exit(args.fan)
    if args.action == "collections":
        for c in sorted(fan.collections, key=lambda c: (len(c), sorted(c))):
            print("{" + ",".join(map(str, sorted(c))) + "}")
    elif args.action == "invariants":
        pic = picard_lattice(fan)
        print(f"label: {fan.label}")
        print(f"dimension: {fan.ambient_rank}")
        print(f"rays: {fan.n_rays}")
        print(f"rank: {pic.rank}")
        print(f"invariant factors: {list(pic.invariant_factors)}")
        print("degree map:")
        for row in pic.degree_matrix:
            print("  " + " ".join(f"{x:3d}" for x in row))
    elif args.action == "dump":
        _write(dump_fan(fan) + "\n", args.out)
    return EXIT_OK


# --------------------------------------------------------------- series

def cmd_series(args):
    fan = _fan_or_exit(args.fan)
    m = _ints(args.m) if args.m else None
    bound = args.bound
    t = Truncation(None, bound)
    if args.action == "moebius":
        ser = classical_moebius(fan).series
    elif args.action == "campana-moebius":
        ser = campana_moebius(fan, m, bound).series
    elif args.action == "admissible":
        ser = campana_admissible_local(fan, m, bound).series
    else:
        local = {"moebius": lambda: classical_moebius(fan),
                 "campana-moebius": lambda: campana_moebius(fan, m, bound),
                 "admissible": lambda: campana_admissible_local(fan, m, bound)}[args.local]()
        curve = _curve(args.curve)
        q = _ints(args.q)[0] if args.q else None
        ser = (euler_product_motivic(local, curve, t) if q is None
               else euler_product_counting(local, curve, q, t))
    if args.action == "moebius" and not args.bound_given:
        text = ser.format_polynomial() + "\n"
    else:
        head = f"# {args.action} {fan.label} truncation: {ser.trunc}\n"
        text = head + ser.dump() + "\n"
    _write(text, args.out)
    return EXIT_OK


# ---------------------------------------------------------------- count

def _degrees(args, fan):
    out = []
    for text in args.deg or ():
        for chunk in text.split(";"):
            if chunk.strip():
                out.append(_ints(chunk))
    if args.ray:
        out.extend(tuple([a] * fan.n_rays) for a in range(1, args.ray + 1))
    if not out:
        raise SystemExit("error: give --deg or --ray")
    bad = [d for d in out if len(d) != fan.n_rays]
    if bad:
        print(f"error: multidegrees {bad} need {fan.n_rays} entries", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)
    return out


def _load_config(args):
    if not args.config:
        return
    cfg = json.loads(Path(args.config).read_text())
    for key in ("fan", "curve", "q", "m", "deg", "ray", "bound", "budget", "out", "workers"):
        if key in cfg and getattr(args, key, None) in (None, [], 1 if key == "workers" else None):
            value = cfg[key]
            if key in ("q", "m"):
                value = ",".join(map(str, value)) if isinstance(value, list) else str(value)
            if key == "deg":
                value = [",".join(map(str, d)) for d in value]
            if key == "curve" and isinstance(value, dict):
                args.curve_config = value
                continue
            setattr(args, key, value)


def cmd_count(args):
    _load_config(args)
    if not args.fan:
        print("error: --fan is required", file=sys.stderr)
        return EXIT_USAGE
    fan = _fan_or_exit(args.fan)
    curve = (curve_from_config(args.curve_config) if getattr(args, "curve_config", None)
             else _curve(args.curve))
    m = _ints(args.m) if args.m else None
    if m is not None and len(m) != fan.n_rays:
        print(f"error: --m needs {fan.n_rays} entries", file=sys.stderr)
        return EXIT_USAGE
    qs = _ints(args.q) if args.q else (2,)
    degrees = _degrees(args, fan)
    budget = ffcount.budget_from(args.budget)
    reports = []
    for q in qs:
        rep = convergence_report(fan, curve, q, m, degrees, args.bound, budget, args.workers,
                                 brute=not args.no_brute)
        reports.append(rep)
        for key, secs in rep.runtimes.items():
            print(f"time q={q} {key}: {secs:.3f}s", file=sys.stderr)
    csv_text = reports[0].to_csv() + "".join(r.to_csv().split("\n", 1)[1] for r in reports[1:])
    json_text = json.dumps([json.loads(r.to_json()) for r in reports], indent=2) + "\n"
    if args.out:
        _write(csv_text, args.out, ".csv")
        _write(json_text, args.out, ".json")
    else:
        sys.stdout.write(csv_text)
    if any(r.mismatch for r in reports):
        return EXIT_MISMATCH
    if any(row.status == "budget" for r in reports for row in r.rows):
        return EXIT_BUDGET
    return EXIT_OK


# --------------------------------------------------------------- verify

def cmd_verify(args):
    try:
        verdicts = run_suite(args.suite, ffcount.budget_from(args.budget))
    except KeyError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return EXIT_USAGE
    for v in verdicts:
        print(v.line())
    passed = sum(v.passed for v in verdicts)
    if len(verdicts) > 1:
        width = max(len(v.criterion) for v in verdicts)
        print()
        print(f"{'criterion':<{width}}  verdict")
        for v in verdicts:
            print(f"{v.criterion:<{width}}  {'pass' if v.passed else 'FAIL'}")
    print(f"{passed}/{len(verdicts)} passed")
    for v in verdicts:
        print(f"time {v.criterion}: {v.seconds:.2f}s", file=sys.stderr)
    return EXIT_OK if passed == len(verdicts) else EXIT_VERIFY


# ------------------------------------------------------------------ main

def build_parser():
    p = argparse.ArgumentParser(prog="toricount", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    f = sub.add_parser("fan", help="validate a fan or print its invariants")
    f.add_argument("action", choices=["validate", "invariants", "collections", "dump"])
    f.add_argument("fan", help="library name (p1, p2, p1xp1, dp6, fN) or JSON file")
    f.add_argument("--out")
    f.set_defaults(func=cmd_fan)

    s = sub.add_parser("series", help="print a local series or an Euler product")
    s.add_argument("action", choices=["moebius", "campana-moebius", "admissible", "euler"])
    s.add_argument("fan")
    s.add_argument("--m", help="multiplicities, e.g. 2,2")
    s.add_argument("--bound", type=int, help="total-degree truncation (default 8)")
    s.add_argument("--curve", help="curve preset or JSON file (default p1)")
    s.add_argument("--q", help="specialise at this prime power (euler only)")
    s.add_argument("--local", default="admissible",
                   choices=["moebius", "campana-moebius", "admissible"])
    s.add_argument("--out")
    s.set_defaults(func=cmd_series)

    c = sub.add_parser("count", help="brute-force counts against predictions")
    c.add_argument("--config", help="JSON experiment config; flags override it")
    c.add_argument("--fan")
    c.add_argument("--curve")
    c.add_argument("--q", help="comma-separated prime powers")
    c.add_argument("--m")
    c.add_argument("--deg", action="append", help="multidegree a,b,...; repeatable")
    c.add_argument("--ray", type=int, help="add a*(1,...,1) for a = 1..RAY")
    c.add_argument("--bound", type=int, help="truncation for the limit constant")
    c.add_argument("--budget", help="small, medium, large or a max tuple count")
    c.add_argument("--workers", type=int, default=1)
    c.add_argument("--no-brute", action="store_true", help="predictions only")
    c.add_argument("--out", help="write OUT.csv and OUT.json")
    c.set_defaults(func=cmd_count)

    v = sub.add_parser("verify", help="run an acceptance suite")
    v.add_argument("suite", choices=list(SUITES) + ["all"])
    v.add_argument("--budget")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "series":
        args.bound_given = args.bound is not None
        args.bound = 8 if args.bound is None else args.bound
    try:
        return args.func(args)
    except SystemExit as exc:  # raised by helpers deep inside a command
        if isinstance(exc.code, int):
            return exc.code
        print(exc.code, file=sys.stderr)
        return EXIT_USAGE
    except CurveError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ffcount.OracleMismatch as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except ffcount.BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
