"""Discrete-event execution of an :class:`~asyncmp.fabric.Instance`.

Two event kinds exist: ``deliver`` (a message reaches a node and acts on it)
and ``compute`` (an edge turns its buffered argument into a message). A
policy picks the next event among the eligible pending ones. Runs are
single-threaded and fully determined by the instance and the policy.
"""
from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, field
from typing import Any, Hashable, Iterable

from .codec import canonical_dumps, encode
from .fabric import ConfigurationError, Instance, NodeRuntime, apply_message, compute_message, gather_scatter_round

DEFAULT_EVENT_CAP = 10**6
DEFAULT_ENUM_BOUND = 10**5
DEFAULT_ROUND_CAP = 10**4
RNG_NAME = "python-random-mt19937-randrange"

POLICIES = ("synchronous", "fifo", "random", "scripted", "enumerate")


class SchedulingError(RuntimeError):
    """A policy selected an event that was not pending or not eligible."""


@dataclass(frozen=True)
class Event:
    kind: str  # "deliver" | "compute"
    seq: int
    node: Hashable
    edge: Hashable | None = None
    payload: Any = None


@dataclass
class WorldState:
    instance: Instance
    runtimes: dict
    pending: dict = field(default_factory=dict)  # seq -> Event, in seq order
    step: int = 0
    next_seq: int = 0
    computing: set = field(default_factory=set)  # edges with a pending compute

    def states(self) -> dict:
        return {u: rt.state for u, rt in self.runtimes.items()}

    def vector(self) -> tuple:
        return tuple(self.runtimes[u].state for u in self.instance.graph.nodes)

    def copy(self) -> "WorldState":
        return WorldState(self.instance, dict(self.runtimes), dict(self.pending), self.step,
                          self.next_seq, set(self.computing))

    def signature(self):
        """Hashable summary that determines all futures of this world."""
        g = self.instance.graph
        nodes = tuple((self.runtimes[u].state, tuple(self.runtimes[u].out_buffers.values()))
                      for u in g.nodes)
        pend = sorted(repr((e.kind, e.node, e.edge, e.payload)) for e in self.pending.values())
        return nodes, tuple(pend)


@dataclass(frozen=True)
class SchedulePolicy:
    kind: str = "fifo"
    seed: int = 0
    script: tuple | None = None
    cap: int = DEFAULT_EVENT_CAP
    rounds: int | None = None

    def __post_init__(self):
        if self.kind not in POLICIES:
            raise ValueError(f"unknown policy {self.kind!r}")
        if self.cap <= 0:
            raise ValueError("event cap must be positive")
        if self.kind == "scripted" and self.script is None:
            raise ValueError("scripted policy needs a script")

    def header(self) -> dict:
        h = {"policy": self.kind, "seed": self.seed, "cap": self.cap}
        if self.kind == "random":
            h["rng"] = RNG_NAME
        if self.rounds is not None:
            h["rounds"] = self.rounds
        return h


@dataclass(frozen=True)
class TraceRecord:
    step: int
    seq: int
    kind: str
    node: Hashable
    edge: Hashable | None
    payload: Any
    state_before: Any
    state_after: Any
    argument: Any
    message: Any
    delivered: bool

    def to_dict(self) -> dict:
        return {
            "step": self.step, "seq": self.seq, "kind": self.kind, "node": encode(self.node),
            "edge": encode(self.edge), "payload": encode(self.payload),
            "state_before": encode(self.state_before), "state_after": encode(self.state_after),
            "argument": encode(self.argument), "message": encode(self.message),
            "delivered": self.delivered,
        }


@dataclass
class Trace:
    header: dict
    records: list = field(default_factory=list)

    def lines(self) -> Iterable[str]:
        yield canonical_dumps(self.header)
        for r in self.records:
            yield canonical_dumps(r.to_dict())

    def to_jsonl(self) -> str:
        return "\n".join(self.lines()) + "\n"

    def digest(self) -> str:
        h = hashlib.sha256()
        for line in self.lines():
            h.update(line.encode())
            h.update(b"\n")
        return h.hexdigest()

    def script(self) -> tuple:
        return tuple(r.seq for r in self.records)

    @classmethod
    def from_jsonl(cls, text: str) -> "Trace":
        """Header and raw record dicts; enough to drive a scripted replay."""
        lines = [json.loads(x) for x in text.splitlines() if x.strip()]
        return cls(lines[0], [_RawRecord(d) for d in lines[1:]])


class _RawRecord(dict):
    @property
    def seq(self):
        return self["seq"]

    def to_dict(self):
        return dict(self)


@dataclass
class RunResult:
    status: str  # "quiescent" | "cap_exceeded" | "deadlock" | "script_exhausted"
    states: dict
    trace: Trace | None
    steps: int
    world: WorldState | None = None

    @property
    def ok(self) -> bool:
        return self.status == "quiescent"

    def vector(self, instance: Instance) -> tuple:
        return instance.state_vector(self.states)


def instance_digest(instance: Instance) -> str:
    if instance.doc is None:
        return ""
    return hashlib.sha256(canonical_dumps(instance.doc).encode()).hexdigest()


# --------------------------------------------------------------------------
# world construction and single steps


def _enqueue(w: WorldState, kind, node, edge=None, payload=None) -> Event:
    e = Event(kind, w.next_seq, node, edge, payload)
    w.pending[e.seq] = e
    w.next_seq += 1
    if kind == "compute":
        w.computing.add(edge)
    return e


def init_world(instance: Instance) -> WorldState:
    g = instance.graph
    runtimes = {
        u: NodeRuntime.fresh(instance.initial[u], g.out_edges(u), instance.algebras[u].args.unit)
        for u in g.nodes
    }
    w = WorldState(instance, runtimes)
    for node, m in instance.inject:
        if m != instance.algebras[node].messages.unit:
            _enqueue(w, "deliver", node, None, m)
    return w


def _blocked(w: WorldState, ev: Event) -> bool:
    """Conservative check that some other pending event may still change an input."""
    g = w.instance.graph
    edge = g.edge(ev.edge)
    watched = {edge.src}
    if w.instance.psi[ev.edge].arity == 2:
        watched.add(edge.dst)
    for other in w.pending.values():
        if other.seq == ev.seq:
            continue
        target = other.node if other.kind == "deliver" else g.edge(other.edge).dst
        if watched & g.reachable(target):
            return True
    return False


def is_eligible(w: WorldState, ev: Event) -> bool:
    if ev.kind == "deliver":
        return True
    if w.instance.psi[ev.edge].mode == "incremental":
        return True
    return not _blocked(w, ev)


def eligible(w: WorldState) -> list[Event]:
    events = list(w.pending.values())
    if any(w.instance.psi[e.edge].mode == "blocking" for e in events if e.kind == "compute"):
        events = [e for e in events if is_eligible(w, e)]
    return events


def _deliver(w: WorldState, node, m, edge, seq, trace: Trace | None):
    inst = w.instance
    alg = inst.algebras[node]
    rt = w.runtimes[node]
    new_rt, arg = apply_message(rt, m, alg)
    w.runtimes[node] = new_rt
    zero = alg.args.unit
    if arg != zero:
        for e in inst.graph.out_edges(node):
            if e.id in w.computing:
                continue
            buf = new_rt.out_buffers[e.id]
            if buf == zero:
                continue
            if inst.psi[e.id].mode == "blocking" and buf == rt.out_buffers[e.id]:
                continue
            _enqueue(w, "compute", node, e.id)
    if trace is not None:
        trace.records.append(TraceRecord(w.step, seq, "deliver", node, edge, m, rt.state,
                                         new_rt.state, arg, None, True))


def _compute(w: WorldState, edge_id, seq, trace: Trace | None):
    inst = w.instance
    g = inst.graph
    e = g.edge(edge_id)
    w.computing.discard(edge_id)
    rt = w.runtimes[e.src]
    buf = rt.out_buffers[edge_id]
    src_alg, dst_alg = inst.algebras[e.src], inst.algebras[e.dst]
    msg, new_buf = compute_message(e, buf, inst.psi[edge_id], args=src_alg.args,
                                   msgs=dst_alg.messages,
                                   receiver_state=w.runtimes[e.dst].state)
    if new_buf is not buf:
        bufs = dict(rt.out_buffers)
        bufs[edge_id] = new_buf
        w.runtimes[e.src] = NodeRuntime(rt.state, bufs)
    delivered = msg != dst_alg.messages.unit
    if delivered:
        _enqueue(w, "deliver", e.dst, edge_id, msg)
    if trace is not None:
        trace.records.append(TraceRecord(w.step, seq, "compute", e.src, edge_id, buf, rt.state,
                                         rt.state, buf, msg, delivered))


def step(w: WorldState, e: Event, trace: Trace | None = None) -> WorldState:
    """Execute one pending event in place and return the same world."""
    if w.pending.get(e.seq) != e:
        raise SchedulingError(f"event {e.seq} is not pending")
    if not is_eligible(w, e):
        raise SchedulingError(f"event {e.seq} is not eligible")
    del w.pending[e.seq]
    if e.kind == "deliver":
        _deliver(w, e.node, e.payload, e.edge, e.seq, trace)
    else:
        _compute(w, e.edge, e.seq, trace)
    w.step += 1
    return w


def detect_quiescence(w: WorldState) -> bool:
    if w.pending:
        return False
    inst = w.instance
    for u, rt in w.runtimes.items():
        zero = inst.algebras[u].args.unit
        for eid, buf in rt.out_buffers.items():
            if inst.psi[eid].mode == "incremental" and buf != zero:
                return False
    return True


# --------------------------------------------------------------------------
# runs


def _require_verified(instance: Instance, allow_unverified: bool):
    if not instance.verified and not allow_unverified:
        raise ConfigurationError(f"instance {instance.name!r} has not passed verification")


def run(instance: Instance, policy: SchedulePolicy, *, trace: bool = True,
        allow_unverified: bool = False) -> RunResult:
    """Execute until quiescence, the event cap, a deadlock, or the end of a script."""
    _require_verified(instance, allow_unverified)
    if policy.kind == "synchronous":
        return _run_synchronous(instance, policy, trace)
    if policy.kind == "enumerate":
        raise ValueError("use enumerate_interleavings for exhaustive exploration")
    w = init_world(instance)
    tr = Trace({"instance": instance_digest(instance), **policy.header()}) if trace else None
    rng = random.Random(policy.seed)
    script = iter(policy.script) if policy.kind == "scripted" else None
    status = "quiescent"
    while w.pending:
        if w.step >= policy.cap:
            status = "cap_exceeded"
            break
        if script is not None:
            seq = next(script, None)
            if seq is None:
                status = "script_exhausted"
                break
            ev = w.pending.get(seq)
            if ev is None:
                raise SchedulingError(f"scripted event {seq} is not pending")
        else:
            choices = eligible(w)
            if not choices:
                status = "deadlock"
                break
            ev = choices[0] if policy.kind == "fifo" else choices[rng.randrange(len(choices))]
        step(w, ev, tr)
    if status == "quiescent" and not detect_quiescence(w):
        status = "deadlock"
    return RunResult(status, w.states(), tr, w.step, w)


def _run_synchronous(instance: Instance, policy: SchedulePolicy, trace: bool) -> RunResult:
    tr = Trace({"instance": instance_digest(instance), **policy.header()}) if trace else None
    if instance.sync is None:
        return _lockstep(instance, policy, tr)
    states, status, steps = _layers(instance, policy.rounds, policy.cap, tr)
    return RunResult(status, states, tr, steps)


def _inject_states(instance: Instance) -> dict:
    states = dict(instance.initial)
    for node, m in instance.inject:
        states[node] = instance.algebras[node].act(m, states[node])
    return states


def _layers(instance: Instance, rounds: int | None, cap: int, tr: Trace | None):
    psi, aggregate, update = instance.sync
    states = _inject_states(instance)
    limit = rounds if rounds is not None else min(cap, DEFAULT_ROUND_CAP)
    steps = 0
    status = "quiescent"
    for r in range(limit):
        new = gather_scatter_round(instance.graph, states, psi, aggregate, update)
        changed = [u for u in instance.graph.nodes if new[u] != states[u]]
        if tr is not None:
            for u in changed:
                tr.records.append(TraceRecord(steps, r, "round", u, None, None, states[u], new[u],
                                              None, None, False))
                steps += 1
        states = new
        if not changed and rounds is None:
            break
    else:
        if rounds is None:
            status = "cap_exceeded"
    return states, status, steps


def synchronous_run(instance: Instance, rounds: int | None = None, *,
                    cap: int = DEFAULT_ROUND_CAP) -> dict:
    """Apply the synchronous layer ``rounds`` times (to a fixed point if ``None``).

    Injected messages are applied to the initial states first.
    """
    if instance.sync is None:
        raise ConfigurationError(f"instance {instance.name!r} has no synchronous layer form")
    states, _, _ = _layers(instance, rounds, cap, None)
    return states


def _lockstep(instance: Instance, policy: SchedulePolicy, tr: Trace | None) -> RunResult:
    """Barrier rounds over the event pool: all deliveries, then all computes.

    Deliveries to one node within a round are combined with the message
    monoid and applied once.
    """
    w = init_world(instance)
    status = "quiescent"
    rounds = 0
    while w.pending:
        if w.step >= policy.cap or (policy.rounds is not None and rounds >= policy.rounds):
            status = "cap_exceeded" if w.step >= policy.cap else "quiescent"
            break
        delivers = [e for e in w.pending.values() if e.kind == "deliver"]
        batch: dict = {}
        for e in delivers:
            del w.pending[e.seq]
            batch.setdefault(e.node, []).append(e)
        for node in instance.graph.nodes:
            if node not in batch:
                continue
            evs = batch[node]
            msgs = instance.algebras[node].messages
            m = msgs.combine(e.payload for e in evs)
            if m != msgs.unit:
                _deliver(w, node, m, evs[0].edge if len(evs) == 1 else None, evs[0].seq, tr)
                w.step += 1
        for e in [e for e in w.pending.values() if e.kind == "compute"]:
            del w.pending[e.seq]
            _compute(w, e.edge, e.seq, tr)
            w.step += 1
        rounds += 1
    if status == "quiescent" and policy.rounds is None and not detect_quiescence(w):
        status = "deadlock"
    return RunResult(status, w.states(), tr, w.step, w)


# --------------------------------------------------------------------------
# exhaustive exploration


@dataclass
class EnumerationReport:
    finals: set
    explored: int
    distinct_worlds: int
    complete: bool
    capped_runs: int = 0
    interleavings: int | None = None  # None if a world can recur

    @property
    def confluent(self) -> bool:
        return self.complete and len(self.finals) == 1 and self.capped_runs == 0

    def to_dict(self) -> dict:
        return {
            "finals": sorted((encode(list(f)) for f in self.finals), key=canonical_dumps),
            "explored": self.explored,
            "distinct_worlds": self.distinct_worlds,
            "interleavings": self.interleavings,
            "complete": self.complete,
            "capped_runs": self.capped_runs,
            "confluent": self.confluent,
        }


def enumerate_interleavings(instance: Instance, *, bound: int = DEFAULT_ENUM_BOUND,
                            event_cap: int = 10_000, allow_unverified: bool = False) -> EnumerationReport:
    """Depth-first exploration of every eligible choice from the initial world.

    Worlds with equal :meth:`WorldState.signature` share their futures, so
    each is expanded once; ``interleavings`` still counts every complete
    event ordering, by summing path counts over the shared worlds.
    Exploration stops (``complete=False``) after ``bound`` expansions.
    """
    _require_verified(instance, allow_unverified)
    root = init_world(instance)
    finals: set = set()
    paths: dict = {}  # signature -> number of complete orderings from there
    open_: set = set()
    capped = 0
    cyclic = False
    complete = True
    explored = 0
    stack = [[root, root.signature(), None, 0]]
    while stack:
        frame = stack[-1]
        w, sig, kids, i = frame
        if kids is None:
            if sig in paths or sig in open_:
                cyclic = cyclic or sig in open_
                stack.pop()
                continue
            if explored >= bound:
                complete = False
                break
            explored += 1
            if not w.pending:
                finals.add(w.vector())
                paths[sig] = 1
                stack.pop()
                continue
            choices = eligible(w) if w.step < event_cap else []
            if not choices:
                capped += 1
                paths[sig] = 0
                stack.pop()
                continue
            open_.add(sig)
            kids = [step(w.copy(), ev) for ev in choices]
            frame[2] = [(k, k.signature()) for k in kids]
            continue
        if i < len(kids):
            frame[3] += 1
            k, ksig = kids[i]
            stack.append([k, ksig, None, 0])
            continue
        paths[sig] = sum(paths.get(ks, 0) for _, ks in kids)
        open_.discard(sig)
        stack.pop()
    total = paths.get(root.signature()) if complete and not cyclic else None
    return EnumerationReport(finals, explored, len(paths) + len(open_), complete, capped, total)
