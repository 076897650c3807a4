"""Command line: verify algebras, run instances, check confluence, emit demos.

Exit codes: 0 success, 1 property violation, 2 input error,
3 nontermination or deadlock.
"""
from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path

from . import catalog
from .algebra import check_action, check_cocycle, check_monoid_laws
from .codec import canonical_dumps, encode
from .fabric import check_homomorphism
from .instances import InstanceError, algebra_reports, build_instance, confluence_check
from .scheduler import DEFAULT_ENUM_BOUND, DEFAULT_EVENT_CAP, SchedulePolicy, Trace, enumerate_interleavings, run

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT, EXIT_RESOURCE = 0, 1, 2, 3

DEMOS = {
    "bellman-ford": "bf_demo.json",
    "bf-line3": "bf_line3.json",
    "two-node": "two_node.json",
    "carry": "carry_99_1.json",
    "maxmax": "maxmax_demo.json",
    "sabotaged": "sabotaged.json",
    "naive-nat": "naive_nat.json",
}


class InputError(Exception):
    pass


def load_document(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: parse error at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise InputError(f"{path}: expected a JSON object")
    return doc


def _load_instance(path: str):
    doc = load_document(path)
    try:
        return build_instance(doc)
    except InstanceError as exc:
        raise InputError(f"{path}: {exc}") from exc


def _emit(obj, out: str | None = None):
    text = canonical_dumps(obj)
    if out:
        Path(out).write_text(text + "\n")
    print(text)


def cmd_verify(args) -> int:
    doc = load_document(args.path)
    name = doc.get("algebra")
    reports = {}
    if "graph" in doc:
        try:
            inst = build_instance(doc)
        except InstanceError as exc:
            raise InputError(f"{args.path}: {exc}") from exc
        if args.kind == "homomorphism":
            reports = {k: r for k, r in inst.reports.items() if k.endswith(".homomorphism")}
        else:
            names = sorted({d.name for d in inst.algebras.values()})
            for n in names:
                rs = algebra_reports(n)
                if args.kind == "monoid":
                    reports[f"{n}.messages"] = rs["messages"]
                    reports[f"{n}.args"] = rs["args"]
                else:
                    reports[f"{n}.{args.kind}"] = rs[args.kind]
    else:
        if doc.get("version") != 1:
            raise InputError(f"{args.path}: unsupported version {doc.get('version')!r}")
        try:
            d = catalog.algebra(name)
        except KeyError:
            raise InputError(f"{args.path}: unknown algebra {name!r}") from None
        if args.kind == "monoid":
            reports = {f"{name}.messages": check_monoid_laws(d.messages),
                       f"{name}.args": check_monoid_laws(d.args)}
        elif args.kind == "action":
            reports = {f"{name}.action": check_action(d.action)}
        elif args.kind == "cocycle":
            reports = {f"{name}.cocycle": check_cocycle(d)}
        else:
            raise InputError(f"{args.path}: homomorphism checks need an instance with edges")
    passed = all(r.passed for r in reports.values())
    _emit({"kind": args.kind, "passed": passed,
           "reports": {k: r.to_dict() for k, r in reports.items()}}, args.report)
    return EXIT_OK if passed else EXIT_VIOLATION


def _verification_failed(inst) -> dict:
    return {k: r.to_dict() for k, r in inst.reports.items() if not r.passed}


def cmd_run(args) -> int:
    inst = _load_instance(args.path)
    if not args.no_verify:
        failed = _verification_failed(inst)
        if failed or not inst.verified:
            _emit({"status": "verification_failed", "reports": failed})
            return EXIT_VIOLATION
    script = None
    if args.policy == "scripted":
        if not args.script:
            raise InputError("--policy scripted needs --script TRACE")
        try:
            script = Trace.from_jsonl(Path(args.script).read_text()).script()
        except (OSError, ValueError, KeyError, IndexError) as exc:
            raise InputError(f"cannot read script {args.script}: {exc}") from exc
    policy = SchedulePolicy(args.policy, seed=args.seed, script=script, cap=args.cap, rounds=args.rounds)
    res = run(inst, policy, allow_unverified=True)
    if args.trace:
        Path(args.trace).write_text(res.trace.to_jsonl())
    if res.status in ("cap_exceeded", "deadlock"):
        report_path = args.report or f"{Path(args.path).stem}.nontermination.json"
        Path(report_path).write_text(canonical_dumps({
            "status": res.status, "steps": res.steps, "states": encode(list(res.vector(inst))),
            "trace": [r.to_dict() for r in res.trace.records],
        }) + "\n")
        print(f"{res.status}: report written to {report_path}", file=sys.stderr)
        return EXIT_RESOURCE
    out = inst.decode(res.states) if inst.decode else {"states": encode(list(res.vector(inst)))}
    print(canonical_dumps(out))
    return EXIT_OK


def cmd_confluence(args) -> int:
    inst = _load_instance(args.path)
    if args.enumerate:
        rep = enumerate_interleavings(inst, bound=args.bound, allow_unverified=True)
        body = rep.to_dict()
        ok = rep.confluent
        if inst.oracle is not None and inst.decode is not None and rep.finals:
            decoded = [inst.decode(dict(zip(inst.graph.nodes, f))) for f in rep.finals]
            expected = inst.oracle()
            body["expected"] = expected
            body["oracle_match"] = len(decoded) == 1 and decoded[0] == expected
            ok = ok and body["oracle_match"]
        body["verification"] = {k: r.passed for k, r in inst.reports.items()}
        _emit(body, args.report)
        if not rep.complete:
            return EXIT_RESOURCE
        return EXIT_OK if ok else EXIT_VIOLATION
    rep = confluence_check(inst, seeds=range(args.seeds), cap=args.cap, workers=args.workers)
    _emit(rep.to_dict(), args.report)
    if len(rep.distinct) > 1:
        return EXIT_VIOLATION
    if not rep.all_quiescent:
        return EXIT_RESOURCE
    return EXIT_OK if rep.passed else EXIT_VIOLATION


def demo_text(name: str) -> str:
    return resources.files("asyncmp").joinpath("data", DEMOS[name]).read_text()


def cmd_demo(args) -> int:
    text = demo_text(args.name)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="asyncmp", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="check algebraic laws for an instance or algebra file")
    v.add_argument("path")
    v.add_argument("--kind", choices=("monoid", "action", "cocycle", "homomorphism"), default="cocycle")
    v.add_argument("--report", help="also write the report JSON here")
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("run", help="execute an instance under one schedule")
    r.add_argument("path")
    r.add_argument("--policy", choices=("synchronous", "fifo", "random", "scripted"), default="fifo")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--rounds", type=int)
    r.add_argument("--cap", type=int, default=DEFAULT_EVENT_CAP)
    r.add_argument("--trace", help="write the JSONL trace here")
    r.add_argument("--script", help="trace file to replay with --policy scripted")
    r.add_argument("--report", help="where to write a nontermination report")
    r.add_argument("--no-verify", action="store_true")
    r.set_defaults(func=cmd_run)

    c = sub.add_parser("confluence", help="compare final states across schedules")
    c.add_argument("path")
    c.add_argument("--seeds", type=int, default=50)
    c.add_argument("--enumerate", action="store_true", help="explore every interleaving instead")
    c.add_argument("--bound", type=int, default=DEFAULT_ENUM_BOUND)
    c.add_argument("--cap", type=int, default=DEFAULT_EVENT_CAP)
    c.add_argument("--workers", type=int, default=1)
    c.add_argument("--report", help="also write the report JSON here")
    c.set_defaults(func=cmd_confluence)

    d = sub.add_parser("demo", help="print a bundled instance file")
    d.add_argument("name", choices=sorted(DEMOS))
    d.add_argument("--out")
    d.set_defaults(func=cmd_demo)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
