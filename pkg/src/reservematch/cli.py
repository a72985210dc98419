"""Command-line driver.

Exit status: 0 on success or when the checked property holds, 1 when it is
violated (a JSON witness goes to stdout), 2 on bad input or usage.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import Any, List, Mapping, Optional, Sequence

from . import fixtures, oracle
from .audit import (compute_cutoffs, is_or_verifiable, is_ro_verifiable, stability_report,
                    verify_sequential)
from .core import InstanceError, validate_instance
from .engine import parse_subschool
from .gen import gen
from .io import (cutoffs_to_json, detect_prefs_shape, instance_from_json, matching_to_json,
                 prefs_from_json, read_json, result_from_json, result_to_json, write_json)
from .mechanisms import MECHANISM_IDS, SequentialPreferences, prefs_shape, run_mechanism


class UsageError(Exception):
    pass


def _emit(data: Any, out: Optional[str] = None) -> None:
    text = write_json(data, out)
    if out is None:
        sys.stdout.write(text)


def _load_instance(path: str):
    try:
        return instance_from_json(read_json(path))
    except InstanceError as e:
        raise UsageError(f"invalid instance {path}: {e}") from e


def _load_prefs(path: str, shape: str):
    raw = read_json(path)
    found = detect_prefs_shape(raw)
    if found != shape and not (shape == "subschool" and found == "simple"):
        raise UsageError(f"preference file {path} has {found} shape, expected {shape}")
    return prefs_from_json(raw, shape)


def _school_level(prefs, instance) -> Mapping[str, Sequence[str]]:
    """School-level lists for stability checks, whatever shape the report had."""
    if isinstance(prefs, SequentialPreferences):
        out = {}
        for i, (r, o) in prefs.lists.items():
            if r != o:
                raise UsageError("stability needs one list per student; stage lists differ")
            out[i] = list(r)
        return out
    out = {}
    for i, lst in prefs.items():
        seen: List[str] = []
        for x in lst:
            s, _ = parse_subschool(x, instance)
            if s not in seen:
                seen.append(s)
        out[i] = seen
    return out


def cmd_validate(args) -> int:
    raw = read_json(args.instance)
    try:
        validate_instance(raw, strict=not raw.get("relaxed_quotas", False))
    except InstanceError as e:
        _emit({"valid": False, "problems": e.problems})
        return 1
    _emit({"valid": True})
    return 0


def cmd_run(args) -> int:
    inst = _load_instance(args.instance)
    prefs = _load_prefs(args.prefs, prefs_shape(args.mechanism))
    try:
        result = run_mechanism(args.mechanism, inst, prefs, trace=bool(args.trace))
    except (KeyError, ValueError) as e:
        raise UsageError(str(e)) from e
    doc = result_to_json(result)
    trace = doc.pop("trace", None)
    if args.trace:
        write_json(trace, args.trace)
    _emit(doc, args.out)
    return 0


def cmd_cutoffs(args) -> int:
    inst = _load_instance(args.instance)
    res = result_from_json(read_json(args.result))
    _emit(cutoffs_to_json(compute_cutoffs(res.matching, inst, args.mode)))
    return 0


def cmd_audit(args) -> int:
    inst = _load_instance(args.instance)
    res = result_from_json(read_json(args.result))
    m = res.matching
    if args.check in ("seq-ro", "seq-or"):
        prefs = _load_prefs(args.prefs, "sequential")
        if res.stages is None:
            raise UsageError("result carries no stage cutoffs")
        try:
            verdict = verify_sequential(m, res.stages, prefs, inst, args.check)
        except ValueError as e:
            raise UsageError(str(e)) from e
        return _verdict(verdict)
    raw = read_json(args.prefs)
    shape = detect_prefs_shape(raw)
    prefs = _school_level(prefs_from_json(raw, shape), inst)
    if args.check == "stable":
        rep = stability_report(m, prefs, inst)
        doc = {
            "stable": rep.stable,
            "individually_rational": rep.individually_rational,
            "ir_witnesses": rep.ir_witnesses,
            "non_wasteful": rep.non_wasteful,
            "wasteful_witnesses": [list(w) for w in rep.wasteful_witnesses],
            "reserve_non_wasteful": rep.reserve_non_wasteful,
            "reserve_wasteful_witnesses": [list(w) for w in rep.reserve_wasteful_witnesses],
            "justified_envy": [list(w) for w in rep.justified_envy_pairs],
        }
        _emit(doc)
        return 0 if rep.stable else 1
    check = is_ro_verifiable if args.check == "ro" else is_or_verifiable
    return _verdict(check(m, prefs, inst))


def _verdict(verdict) -> int:
    doc = {
        "rule": verdict.rule,
        "passed": verdict.passed,
        "failures": [
            {"student": c.student, "school_ok": c.school_ok, "seat_ok": c.seat_ok,
             "expected_school": c.expected_school,
             "expected_seat": c.expected_seat.value if c.expected_seat else None}
            for c in verdict.checks if not c.passed
        ],
    }
    _emit(doc)
    return 0 if verdict.passed else 1


def _choice_json(r) -> dict:
    return {"school": r.school, "open": sorted(r.open), "reserved": sorted(r.reserved)}


def cmd_oracle(args) -> int:
    inst = _load_instance(args.instance)
    kind = args.kind
    try:
        if kind == "stable-set":
            prefs = _load_prefs(args.prefs, "simple")
            ms = oracle.stable_set(inst, prefs)
            _emit({"count": len(ms), "matchings": [matching_to_json(m) for m in ms]})
            return 0
        if kind in ("or-choice-set", "min-reserved"):
            school = args.school or inst.school_ids[0]
            applicants = args.applicants.split(",") if args.applicants else list(inst.student_ids)
            if kind == "or-choice-set":
                rs = oracle.or_verifiable_choice_set(school, applicants, inst)
                _emit({"count": len(rs), "assignments": [_choice_json(r) for r in rs]})
                return 0
            rep = oracle.min_reserved_check(school, applicants, inst)
            _emit({"holds": rep.holds, "sim_or_reserved": sorted(rep.sim_or_reserved),
                   "member_reserved": [sorted(r) for r in rep.member_reserved]})
            return 0 if rep.holds else 1
        if kind == "ne":
            prefs = _load_prefs(args.prefs, "simple")
            res = oracle.ne_outcomes(inst, prefs, args.mechanism)
            _emit({
                "mechanism": res.mechanism,
                "profiles_searched": res.profile_count,
                "equilibria": len(res.profiles),
                "outcomes": [{"matching": matching_to_json(m), "stable": s, "wasteful": w}
                             for m, s, w in zip(res.outcomes, res.stable, res.wasteful)],
            })
            return 0
        if kind == "sp-audit":
            prefs = _load_prefs(args.prefs, "simple")
            v = oracle.strategyproofness_audit(args.mechanism, inst, prefs, mode=args.mode)
            _emit({"violations": [
                {"student": x.student, "misreport": _report_json(x.misreport),
                 "truthful_school": x.truthful_school, "misreport_school": x.misreport_school}
                for x in v]})
            return 1 if v else 0
        if kind == "equivalence":
            prefs = _load_prefs(args.prefs, "simple")
            rep = oracle.equivalence_check(inst, prefs, args.pair)
            _emit({"pair": rep.pair, "holds": rep.holds, "detail": rep.detail,
                   "left": matching_to_json(rep.left), "right": matching_to_json(rep.right)})
            return 0 if rep.holds else 1
    except oracle.GuardError as e:
        raise UsageError(str(e)) from e
    raise UsageError(f"unknown oracle {kind!r}")


def _report_json(rep):
    if isinstance(rep, tuple) and len(rep) == 2 and all(isinstance(x, tuple) for x in rep):
        return {"reserve": list(rep[0]), "open": list(rep[1])}
    return list(rep)


def cmd_gen(args) -> int:
    try:
        doc = gen(args.students, args.schools, args.types, args.seed, args.reserve_density)
    except ValueError as e:
        raise UsageError(str(e)) from e
    _emit(doc, args.out)
    return 0


def cmd_fixtures(args) -> int:
    if args.action == "list":
        _emit({n: fixtures.raw(n)["description"] for n in fixtures.NAMES})
        return 0
    if not args.directory:
        raise UsageError("fixtures export needs a target directory")
    paths = fixtures.export(args.directory)
    _emit({"written": [str(p) for p in paths]})
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="reservematch", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="check an instance file")
    v.add_argument("instance")
    v.set_defaults(func=cmd_validate)

    r = sub.add_parser("run", help="run a mechanism")
    r.add_argument("--mechanism", required=True, choices=MECHANISM_IDS)
    r.add_argument("--instance", required=True)
    r.add_argument("--prefs", required=True)
    r.add_argument("--trace", help="write the round-by-round trace here")
    r.add_argument("--out", help="write the result here instead of stdout")
    r.set_defaults(func=cmd_run)

    c = sub.add_parser("cutoffs", help="recompute cutoffs from a result file")
    c.add_argument("--mode", choices=("eq1", "eq2"), default="eq1")
    c.add_argument("--result", required=True)
    c.add_argument("--instance", required=True)
    c.set_defaults(func=cmd_cutoffs)

    a = sub.add_parser("audit", help="audit a result file")
    a.add_argument("--check", required=True, choices=("stable", "ro", "or", "seq-ro", "seq-or"))
    a.add_argument("--instance", required=True)
    a.add_argument("--prefs", required=True)
    a.add_argument("--result", required=True)
    a.set_defaults(func=cmd_audit)

    o = sub.add_parser("oracle", help="brute-force checks on small markets")
    o.add_argument("kind", choices=("stable-set", "or-choice-set", "ne", "sp-audit",
                                    "equivalence", "min-reserved"))
    o.add_argument("--instance", required=True)
    o.add_argument("--prefs")
    o.add_argument("--mechanism", choices=MECHANISM_IDS)
    o.add_argument("--mode", default="auto", choices=("auto", "copy", "pairs"),
                   help="sequential misreports: one list copied to both stages, or all pairs")
    o.add_argument("--pair", choices=oracle.PAIRS)
    o.add_argument("--school")
    o.add_argument("--applicants", help="comma-separated student ids (default: everyone)")
    o.set_defaults(func=cmd_oracle)

    g = sub.add_parser("gen", help="draw a seeded random instance")
    g.add_argument("--students", type=int, required=True)
    g.add_argument("--schools", type=int, required=True)
    g.add_argument("--types", type=int, required=True)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--reserve-density", type=float, default=0.5)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    f = sub.add_parser("fixtures", help="list or export the bundled examples")
    f.add_argument("action", choices=("list", "export"))
    f.add_argument("directory", nargs="?")
    f.set_defaults(func=cmd_fixtures)
    return p


_NEEDS = {
    "stable-set": ("prefs",),
    "ne": ("prefs", "mechanism"),
    "sp-audit": ("prefs", "mechanism"),
    "equivalence": ("prefs", "pair"),
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else 2
    if args.command == "oracle":
        missing = [n for n in _NEEDS.get(args.kind, ()) if getattr(args, n) is None]
        if missing:
            print(f"error: oracle {args.kind} needs --{' --'.join(missing)}", file=sys.stderr)
            return 2
    try:
        return args.func(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError, KeyError, TypeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
