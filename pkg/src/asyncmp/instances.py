"""Concrete verified instances and the confluence harness.

Every instance is built from a plain JSON-compatible document (the on-disk
instance format), so an instance made in code and one loaded from a file
go through the same path. Builders verify the node algebras and edge
message functions before marking an instance runnable.
"""
from __future__ import annotations

import json
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

from . import catalog
from .algebra import (
    BOT,
    ArgumentFn,
    MonoidSpec,
    ViolationReport,
    check_action,
    check_cocycle,
    check_monoid_laws,
    tadd,
)
from .codec import canonical_dumps, decode, encode
from .fabric import Edge, Graph, Instance, MessageFn, TropicalMatrix, check_homomorphism, verified
from .oracles import ORACLES
from .scheduler import DEFAULT_EVENT_CAP, SchedulePolicy, run

FORMAT_VERSION = 1


class InstanceError(ValueError):
    """An instance document is malformed or names something unknown."""


# --------------------------------------------------------------------------
# verification


@lru_cache(maxsize=None)
def algebra_reports(name: str) -> dict[str, ViolationReport]:
    """Monoid, action and cocycle reports for a catalog algebra (cached)."""
    d = catalog.algebra(name)
    return _reports_for(d)


def _reports_for(d: ArgumentFn) -> dict[str, ViolationReport]:
    reports = {
        "messages": check_monoid_laws(d.messages),
        "args": check_monoid_laws(d.args),
        "action": check_action(d.action),
        "cocycle": check_cocycle(d),
    }
    return reports


_psi_cache: dict = {}


def _verify_psi(key, psi: MessageFn, samples, args: MonoidSpec, msgs: MonoidSpec):
    if key is None or key not in _psi_cache:
        report = check_homomorphism(psi, samples, args=args, msgs=msgs)
        if key is None:
            return report
        _psi_cache[key] = report
    return _psi_cache[key]


def _finish(inst: Instance, psi_reports: dict, force: bool = False) -> Instance:
    names = sorted({d.name for d in inst.algebras.values()})
    reports = {}
    for name in names:
        for kind, r in algebra_reports(name).items():
            reports[f"{name}.{kind}"] = r
    for eid, r in psi_reports.items():
        reports[f"edge[{eid}].homomorphism"] = r
        p = inst.psi[eid]
        inst.psi[eid] = verified(p, r) if not force else MessageFn(p.fn, p.mode, p.arity, True, p.name)
    inst.reports = reports
    inst.verified = force or all(r.passed for r in reports.values())
    return inst


# --------------------------------------------------------------------------
# documents


def graph_doc(g: Graph) -> dict:
    return {
        "nodes": list(g.nodes),
        "edges": [{"id": e.id, "src": e.src, "dst": e.dst, "payload": e.payload} for e in g.edges],
    }


def _graph_from_doc(gd: dict) -> Graph:
    try:
        edges = [Edge(e["id"], e["src"], e["dst"], e.get("payload")) for e in gd["edges"]]
        return Graph(gd["nodes"], edges)
    except (KeyError, TypeError) as exc:
        raise InstanceError(f"malformed graph: {exc}") from exc


def weighted_graph(nodes: Sequence, edges: Sequence[tuple]) -> Graph:
    """Graph whose edge payloads are ``{"length": w}``; edge ids are positions."""
    return Graph(nodes, [Edge(i, u, v, {"length": w}) for i, (u, v, w) in enumerate(edges)])


def random_weighted_graph(rng: random.Random, n_max: int = 8, m_max: int = 20,
                          w_max: int = 10) -> Graph:
    n = rng.randint(1, n_max)
    m = rng.randint(0, m_max)
    edges = [(rng.randrange(n), rng.randrange(n), rng.randint(0, w_max)) for _ in range(m)]
    return weighted_graph(list(range(n)), edges)


def _decode_states(nodes, values, what):
    if len(values) != len(nodes):
        raise InstanceError(f"{what}: expected {len(nodes)} states, got {len(values)}")
    return {u: decode(v) for u, v in zip(nodes, values)}


def _decode_inject(items, nodes):
    out = []
    for item in items:
        if item["node"] not in nodes:
            raise InstanceError(f"injection targets unknown node {item['node']!r}")
        out.append((item["node"], decode(item["message"])))
    return out


def _oracle(doc) -> Callable[[], dict] | None:
    name = doc.get("oracle")
    if name is None:
        return None
    if name not in ORACLES:
        raise InstanceError(f"unknown oracle {name!r}")
    return lambda: ORACLES[name](doc)


# --------------------------------------------------------------------------
# Bellman-Ford


def _bf_psi(w: int, src, lex: bool) -> MessageFn:
    if lex:
        def fn(a):
            return BOT if a is BOT else (a[0] - w, -src)
        return MessageFn(fn, name=f"append[{w},{src}]")
    return MessageFn(lambda a: tadd(a, -w), name=f"append[{w}]")


def _build_bellman_ford(doc: dict) -> Instance:
    g = _graph_from_doc(doc["graph"])
    params = doc.get("params", {})
    source = params.get("source")
    if source not in g.nodes:
        raise InstanceError(f"source {source!r} is not a node")
    lex = bool(params.get("predecessors", False))
    for e in g.edges:
        w = (e.payload or {}).get("length")
        if not isinstance(w, int) or isinstance(w, bool):
            raise InstanceError(f"edge {e.id!r} needs an integer length")
        if w < 0:
            raise InstanceError(f"edge {e.id!r} has negative length {w}")
    alg = catalog.algebra("bellman_ford_lex" if lex else "bellman_ford")
    psi, reports = {}, {}
    for e in g.edges:
        w = e.payload["length"]
        psi[e.id] = _bf_psi(w, e.src, lex)
        key = ("bf", lex, w, e.src if lex else None)
        reports[e.id] = _verify_psi(key, psi[e.id], None, alg.args, alg.messages)
    nodes = g.nodes

    def decode_out(states):
        if lex:
            return {
                "distances": [None if states[u] is BOT else -states[u][0] for u in nodes],
                "predecessors": [None if states[u] is BOT else -states[u][1] for u in nodes],
            }
        return {"distances": [None if states[u] is BOT else -states[u] for u in nodes]}

    inst = Instance(
        graph=g,
        algebras={u: alg for u in nodes},
        psi=psi,
        initial=_decode_states(nodes, doc["initial"], "initial"),
        inject=_decode_inject(doc.get("inject", []), nodes),
        name="bellman_ford",
        doc=doc,
        sync=({eid: p.fn for eid, p in psi.items()}, alg.messages, alg.action),
        decode=decode_out,
        oracle=_oracle(doc),
    )
    return _finish(inst, reports)


def bellman_ford_doc(g: Graph, source, *, predecessors: bool = False) -> dict:
    params = {"source": source}
    if predecessors:
        params["predecessors"] = True
        start = [0, -source]
    else:
        start = 0
    return {
        "version": FORMAT_VERSION,
        "algebra": "bellman_ford",
        "graph": graph_doc(g),
        "initial": ["bot"] * len(g.nodes),
        "inject": [{"node": source, "message": start}],
        "oracle": "bellman_ford",
        "params": params,
    }


def make_bellman_ford(g: Graph, source, *, predecessors: bool = False) -> Instance:
    """Single-source shortest paths as negated lengths under max.

    States start at bottom and the source receives the message 0, so the
    first argument it emits is its own distance.
    """
    return build_instance(bellman_ford_doc(g, source, predecessors=predecessors))


# --------------------------------------------------------------------------
# ripple-carry addition


def _check_digits(ds, what):
    for d in ds:
        if not isinstance(d, int) or isinstance(d, bool) or not 0 <= d <= 9:
            raise InstanceError(f"{what} has a non-digit {d!r}")


def _identity_psi():
    return MessageFn(lambda a: a, name="identity")


def _build_carry(doc: dict) -> Instance:
    params = doc.get("params", {})
    x, y = params.get("x"), params.get("y")
    if not x or y is None or len(x) != len(y):
        raise InstanceError("carry instance needs equal-length digit lists x and y")
    _check_digits(x, "x")
    _check_digits(y, "y")
    k = len(x)
    g = _graph_from_doc(doc["graph"])
    if list(g.nodes) != list(range(k + 1)):
        raise InstanceError("carry chain nodes must be 0..k with k the overflow node")
    digit, over = catalog.algebra("carry"), catalog.algebra("counter")
    algebras = {i: digit for i in range(k)}
    algebras[k] = over
    psi, reports = {}, {}
    nat = catalog.nat_add()
    for e in g.edges:
        psi[e.id] = _identity_psi()
        reports[e.id] = _verify_psi(("identity",), psi[e.id], nat.carrier.elements[:60], nat, nat)

    def decode_out(states):
        return {"digits": [states[i] for i in range(k)], "overflow": states[k]}

    inst = Instance(
        graph=g, algebras=algebras, psi=psi,
        initial=_decode_states(g.nodes, doc["initial"], "initial"),
        inject=_decode_inject(doc.get("inject", []), g.nodes),
        name="carry", doc=doc, sync=None, decode=decode_out, oracle=_oracle(doc),
    )
    return _finish(inst, reports)


def digits_of(n: int, k: int | None = None) -> list[int]:
    """Little-endian base-10 digits, padded to ``k``."""
    ds = [int(c) for c in reversed(str(n))]
    if k is not None:
        if len(ds) > k:
            raise ValueError(f"{n} has more than {k} digits")
        ds += [0] * (k - len(ds))
    return ds


def carry_doc(x: Sequence[int], y: Sequence[int]) -> dict:
    k = max(len(x), len(y))
    x = list(x) + [0] * (k - len(x))
    y = list(y) + [0] * (k - len(y))
    edges = [{"id": i, "src": i, "dst": i + 1, "payload": {}} for i in range(k)]
    return {
        "version": FORMAT_VERSION,
        "algebra": "carry",
        "graph": {"nodes": list(range(k + 1)), "edges": edges},
        "initial": x + [0],
        "inject": [{"node": i, "message": d} for i, d in enumerate(y) if d],
        "oracle": "integer_addition",
        "params": {"x": x, "y": y},
    }


def make_carry_adder(x: Sequence[int], y: Sequence[int]) -> Instance:
    """Digit chain ``0..k-1`` (ones first) feeding an overflow node ``k``.

    Digits of ``x`` are the initial states; each digit of ``y`` is injected
    as a message to its node.
    """
    _check_digits(x, "x")
    _check_digits(y, "y")
    return build_instance(carry_doc(x, y))


# --------------------------------------------------------------------------
# max-max tropical layer


def _build_maxmax(doc: dict) -> Instance:
    params = doc.get("params", {})
    k = params.get("width")
    if not isinstance(k, int) or k < 1:
        raise InstanceError("maxmax instance needs a positive width")
    g = _graph_from_doc(doc["graph"])
    alg = catalog.algebra(f"maxmax{k}")
    feats = [decode(f) for f in params.get("features", [])]
    samples = list(dict.fromkeys([alg.args.unit, *alg.args.carrier.elements[:24], *feats]))
    psi, reports = {}, {}
    for e in g.edges:
        W = TropicalMatrix(decode((e.payload or {}).get("matrix", [])))
        if W.shape != (k, k):
            raise InstanceError(f"edge {e.id!r}: matrix shape {W.shape} does not match width {k}")
        psi[e.id] = MessageFn(W, name=f"tropical[{e.id}]")
        reports[e.id] = _verify_psi(None, psi[e.id], samples, alg.args, alg.messages)

    def decode_out(states):
        return {"features": [encode(states[u]) for u in g.nodes]}

    inst = Instance(
        graph=g, algebras={u: alg for u in g.nodes}, psi=psi,
        initial=_decode_states(g.nodes, doc["initial"], "initial"),
        inject=_decode_inject(doc.get("inject", []), g.nodes),
        name="maxmax", doc=doc,
        sync=({eid: p.fn for eid, p in psi.items()}, alg.messages, alg.action),
        decode=decode_out, oracle=_oracle(doc),
    )
    return _finish(inst, reports)


def maxmax_doc(g: Graph, features: Sequence[Sequence], matrices: dict | Sequence) -> dict:
    k = len(features[0]) if features else 1
    if len(features) != len(g.nodes):
        raise ValueError("one feature vector per node is required")
    mats = matrices if isinstance(matrices, dict) else dict(zip([e.id for e in g.edges], matrices))
    edges = []
    for e in g.edges:
        W = mats[e.id]
        rows = W.rows if isinstance(W, TropicalMatrix) else W
        edges.append({"id": e.id, "src": e.src, "dst": e.dst, "payload": {"matrix": encode(rows)}})
    return {
        "version": FORMAT_VERSION,
        "algebra": "maxmax",
        "graph": {"nodes": list(g.nodes), "edges": edges},
        "initial": [["bot"] * k for _ in g.nodes],
        "inject": [{"node": u, "message": encode(f)} for u, f in zip(g.nodes, features)
                   if any(v is not BOT for v in f)],
        "oracle": "maxmax_fixpoint",
        "params": {"width": k, "features": [encode(f) for f in features]},
    }


def make_maxmax_layer(g: Graph, features: Sequence[Sequence], matrices) -> Instance:
    """Max-max layer with tropical-linear edge maps.

    Nodes start at the all-bottom vector and receive their features as
    injected messages. ``matrices`` maps edge id to a matrix (or is a list
    in edge order).
    """
    return build_instance(maxmax_doc(g, features, matrices))


# --------------------------------------------------------------------------
# deliberately broken instance


SABOTAGE_PSI = {"square": lambda a: a * a}


def _build_sabotaged(doc: dict) -> Instance:
    g = _graph_from_doc(doc["graph"])
    params = doc.get("params", {})
    if list(g.nodes) != [0, 1]:
        raise InstanceError("sabotaged instance expects nodes [0, 1]")
    nat = catalog.nat_add()
    psi, reports = {}, {}
    for e in g.edges:
        name = (e.payload or {}).get("psi", "square")
        if name not in SABOTAGE_PSI:
            raise InstanceError(f"unknown message function {name!r}")
        psi[e.id] = MessageFn(SABOTAGE_PSI[name], name=name)
        reports[e.id] = _verify_psi(None, psi[e.id], range(0, 6), nat, nat)
    inst = Instance(
        graph=g, algebras={0: catalog.algebra("relay"), 1: catalog.algebra("counter")}, psi=psi,
        initial=_decode_states(g.nodes, doc["initial"], "initial"),
        inject=_decode_inject(doc.get("inject", []), g.nodes),
        name="sabotaged", doc=doc, sync=None,
        decode=lambda states: {"states": [states[0], states[1]]}, oracle=_oracle(doc),
    )
    return _finish(inst, reports, force=bool(params.get("force_incremental")))


def sabotaged_doc(messages: Sequence[int] = (1, 1)) -> dict:
    """Relay node feeding a counter through ``a -> a*a`` forced to be incremental."""
    return {
        "version": FORMAT_VERSION,
        "algebra": "sabotaged_square",
        "graph": {"nodes": [0, 1], "edges": [{"id": 0, "src": 0, "dst": 1, "payload": {"psi": "square"}}]},
        "initial": [0, 0],
        "inject": [{"node": 0, "message": m} for m in messages],
        "params": {"force_incremental": True},
    }


def make_sabotaged(messages: Sequence[int] = (1, 1)) -> Instance:
    return build_instance(sabotaged_doc(messages))


# --------------------------------------------------------------------------
# loading


FAMILIES: dict[str, Callable[[dict], Instance]] = {
    "bellman_ford": _build_bellman_ford,
    "carry": _build_carry,
    "maxmax": _build_maxmax,
    "sabotaged_square": _build_sabotaged,
}


def build_instance(doc: dict) -> Instance:
    """Construct and verify an instance from its document."""
    if not isinstance(doc, dict):
        raise InstanceError("instance document must be a JSON object")
    if doc.get("version") != FORMAT_VERSION:
        raise InstanceError(f"unsupported instance version {doc.get('version')!r}")
    family = doc.get("algebra")
    if family not in FAMILIES:
        raise InstanceError(f"unknown instance family {family!r}")
    if "graph" not in doc or "initial" not in doc:
        raise InstanceError("instance document needs 'graph' and 'initial'")
    try:
        return FAMILIES[family](doc)
    except InstanceError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise InstanceError(f"malformed {family} instance: {exc}") from exc


# --------------------------------------------------------------------------
# confluence


@dataclass
class RunSummary:
    policy: str
    seed: int | None
    status: str
    final: tuple
    digest: str
    steps: int


@dataclass
class ConfluenceReport:
    instance: str
    runs: list = field(default_factory=list)
    distinct: list = field(default_factory=list)
    decoded: list = field(default_factory=list)
    expected: dict | None = None
    verification: dict = field(default_factory=dict)

    @property
    def oracle_match(self) -> bool | None:
        if self.expected is None:
            return None
        return len(self.decoded) == 1 and self.decoded[0] == self.expected

    @property
    def all_quiescent(self) -> bool:
        return all(r.status == "quiescent" for r in self.runs)

    @property
    def passed(self) -> bool:
        return self.all_quiescent and len(self.distinct) == 1 and self.oracle_match is not False

    def to_dict(self) -> dict:
        return {
            "instance": self.instance,
            "passed": self.passed,
            "distinct_finals": len(self.distinct),
            "finals": [encode(list(f)) for f in self.distinct],
            "decoded": self.decoded,
            "expected": self.expected,
            "oracle_match": self.oracle_match,
            "verification": self.verification,
            "runs": [
                {"policy": r.policy, "seed": r.seed, "status": r.status, "digest": r.digest,
                 "steps": r.steps, "final_index": self.distinct.index(r.final)}
                for r in self.runs
            ],
        }


def _one(instance: Instance, kind: str, seed, cap: int) -> RunSummary:
    policy = SchedulePolicy(kind, seed=seed or 0, cap=cap)
    res = run(instance, policy)
    return RunSummary(kind, seed, res.status, res.vector(instance), res.trace.digest(), res.steps)


def confluence_check(instance: Instance, policies: Sequence[str] = ("random", "fifo", "synchronous"),
                     seeds: Sequence[int] = range(50), *, cap: int = DEFAULT_EVENT_CAP,
                     workers: int = 1) -> ConfluenceReport:
    """Run every policy (random once per seed) and compare final states.

    The ``synchronous`` policy is the layer-by-layer form when the instance
    has one. Runs share nothing, so ``workers > 1`` only changes wall time.
    """
    jobs = []
    for kind in policies:
        if kind == "random":
            jobs.extend(("random", s) for s in seeds)
        else:
            jobs.append((kind, None))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            runs = list(pool.map(lambda j: _one(instance, j[0], j[1], cap), jobs))
    else:
        runs = [_one(instance, k, s, cap) for k, s in jobs]
    report = ConfluenceReport(instance.name, runs)
    for r in runs:
        if r.final not in report.distinct:
            report.distinct.append(r.final)
    nodes = instance.graph.nodes
    if instance.decode is not None:
        report.decoded = [instance.decode(dict(zip(nodes, f))) for f in report.distinct]
    if instance.oracle is not None:
        report.expected = instance.oracle()
    report.verification = {k: r.passed for k, r in instance.reports.items()}
    return report


# --------------------------------------------------------------------------
# files


def dumps_instance(inst_or_doc) -> str:
    """Canonical text of an instance document (sorted keys, no spaces)."""
    doc = inst_or_doc.doc if isinstance(inst_or_doc, Instance) else inst_or_doc
    return canonical_dumps(doc)


def load_instance(path) -> Instance:
    with open(path) as fh:
        return build_instance(json.load(fh))


def save_instance(inst_or_doc, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps_instance(inst_or_doc) + "\n")
