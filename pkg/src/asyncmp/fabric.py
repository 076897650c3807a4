"""Graphs, per-node runtime state and message functions.

A node holds a persistent state and one argument buffer per outgoing edge.
Receiving a message acts on the state and adds the emitted argument to
every buffer; an edge turns its buffer into a message for the receiver.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Any, Callable, Hashable, Mapping, Sequence

import numpy as np

from .algebra import (
    BOT,
    ActionSpec,
    ArgumentFn,
    MonoidSpec,
    ViolationReport,
    _opts,
    _scan,
    law,
    tadd,
)


class ConfigurationError(RuntimeError):
    """An instance was wired in a way the engine refuses to run."""


@dataclass(frozen=True)
class Edge:
    id: Hashable
    src: Hashable
    dst: Hashable
    payload: Any = None


class Graph:
    """Directed multigraph with ordered nodes and edges; self-loops allowed."""

    def __init__(self, nodes: Sequence[Hashable], edges: Sequence[Edge]):
        self.nodes = tuple(nodes)
        self.edges = tuple(edges)
        known = set(self.nodes)
        if len(known) != len(self.nodes):
            raise ValueError("duplicate node ids")
        self._edges = {}
        self._in = {u: [] for u in self.nodes}
        self._out = {u: [] for u in self.nodes}
        for e in self.edges:
            if e.id in self._edges:
                raise ValueError(f"duplicate edge id {e.id!r}")
            if e.src not in known or e.dst not in known:
                raise ValueError(f"edge {e.id!r} references an unknown node")
            self._edges[e.id] = e
            self._in[e.dst].append(e)
            self._out[e.src].append(e)
        self._reach = None

    def __repr__(self):
        return f"Graph({len(self.nodes)} nodes, {len(self.edges)} edges)"

    def edge(self, eid) -> Edge:
        return self._edges[eid]

    def in_edges(self, u) -> list[Edge]:
        return self._in[u]

    def out_edges(self, u) -> list[Edge]:
        return self._out[u]

    def neighbors(self, u) -> list:
        """Senders into ``u`` (with multiplicity), in edge order."""
        return [e.src for e in self._in[u]]

    def reachable(self, u) -> frozenset:
        """Nodes reachable from ``u`` along edges, including ``u`` itself."""
        if self._reach is None:
            reach = {}
            for v in self.nodes:
                seen, stack = {v}, [v]
                while stack:
                    x = stack.pop()
                    for e in self._out[x]:
                        if e.dst not in seen:
                            seen.add(e.dst)
                            stack.append(e.dst)
                reach[v] = frozenset(seen)
            self._reach = reach
        return self._reach[u]

    def max_outdegree(self) -> int:
        return max((len(v) for v in self._out.values()), default=0)


@dataclass(frozen=True)
class NodeRuntime:
    state: Any
    out_buffers: Mapping[Hashable, Any] = field(default_factory=dict)

    @classmethod
    def fresh(cls, state, out_edges: Sequence[Edge], zero) -> "NodeRuntime":
        return cls(state, {e.id: zero for e in out_edges})


def apply_message(n: NodeRuntime, m, alg: ArgumentFn) -> tuple[NodeRuntime, Any]:
    """Act with ``m`` on the node and broadcast the emitted argument."""
    if m == alg.messages.unit:
        raise ValueError("unit messages are dropped before delivery")
    arg = alg.delta(m, n.state)
    state = alg.act(m, n.state)
    if arg == alg.args.unit:
        return NodeRuntime(state, n.out_buffers), arg
    op = alg.args.op
    return NodeRuntime(state, {e: op(b, arg) for e, b in n.out_buffers.items()}), arg


@dataclass(frozen=True)
class MessageFn:
    """Per-edge message function.

    ``incremental`` functions take the sender's accumulated argument and may
    be re-invoked on partial arguments; they must be monoid maps, which
    :func:`check_homomorphism` establishes and ``hom_verified`` records.
    ``blocking`` functions run only once their inputs can no longer change.
    An arity-2 blocking function also receives the receiver's state.
    """

    fn: Callable = field(compare=False)
    mode: str = "incremental"
    arity: int = 1
    hom_verified: bool = False
    name: str = ""

    def __post_init__(self):
        if self.mode not in ("incremental", "blocking"):
            raise ValueError(f"unknown message function mode {self.mode!r}")
        if self.mode == "incremental" and self.arity != 1:
            raise ValueError("incremental message functions take exactly one argument")
        if self.arity < 1:
            raise ValueError("arity must be positive")

    def __call__(self, *args):
        return self.fn(*args)


@law("hom_unit")
def _hom_unit(subject, ):
    psi, args, msgs = subject
    return psi(args.unit), msgs.unit


@law("hom_product")
def _hom_product(subject, a, b):
    psi, args, msgs = subject
    return psi(args.op(a, b)), msgs.op(psi(a), psi(b))


class _HomSubject(tuple):
    @property
    def name(self):
        return self[0].name


def check_homomorphism(psi: MessageFn, samples: Sequence | None = None, *, args: MonoidSpec,
                       msgs: MonoidSpec, **kw) -> ViolationReport:
    """``psi(0) == 1`` and ``psi(a + b) == psi(a) . psi(b)`` over sample pairs."""
    if psi.arity != 1:
        raise ValueError("homomorphism check needs a single-argument message function")
    xs = list(samples) if samples is not None else list(args.carrier.elements)
    subject = _HomSubject((psi, args, msgs))
    o = _opts(kw)
    report = ViolationReport(subject=psi.name)
    report.merge(_scan(subject, "hom_unit", {}, **o))
    report.merge(_scan(subject, "hom_product", {"a": xs, "b": xs}, **o))
    return report


def verified(psi: MessageFn, report: ViolationReport) -> MessageFn:
    return replace(psi, hom_verified=report.passed)


def compute_message(e: Edge, buffer, psi: MessageFn, *, args: MonoidSpec, msgs: MonoidSpec,
                    receiver_state=None) -> tuple[Any, Any]:
    """Turn an edge buffer into a message; returns ``(message, new buffer)``.

    Incremental edges reset the buffer to zero. Blocking edges keep it and
    always read the full accumulated argument. A unit result means nothing
    is to be delivered.
    """
    if psi.mode == "incremental":
        if not psi.hom_verified:
            raise ConfigurationError(f"edge {e.id!r}: incremental message function is not a verified homomorphism")
        if buffer == args.unit:
            return msgs.unit, buffer
        return psi(buffer), args.unit
    if psi.arity == 2:
        return psi(buffer, receiver_state), buffer
    return psi(buffer), buffer


@dataclass(frozen=True)
class TropicalMatrix:
    rows: tuple

    def __post_init__(self):
        rows = tuple(tuple(r) for r in self.rows)
        if rows and len({len(r) for r in rows}) != 1:
            raise ValueError("ragged tropical matrix")
        object.__setattr__(self, "rows", rows)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), (len(self.rows[0]) if self.rows else 0)

    @classmethod
    def identity(cls, k: int) -> "TropicalMatrix":
        return cls(tuple(tuple(0 if i == j else BOT for j in range(k)) for i in range(k)))

    def __call__(self, x):
        return tropical_apply(self, x)


def tropical_apply(W: TropicalMatrix, x: Sequence) -> tuple:
    """Max-plus matrix-vector product: ``y_i = max_j (W_ij + x_j)``."""
    if W.shape[1] != len(x):
        raise ValueError(f"dimension mismatch: matrix {W.shape} vs vector of length {len(x)}")
    out = []
    for row in W.rows:
        best = BOT
        for w, v in zip(row, x):
            t = tadd(w, v)
            if t is not BOT and (best is BOT or t > best):
                best = t
        out.append(best)
    return tuple(out)


def gather_scatter_round(g: Graph, states: Mapping, psi: Mapping[Hashable, Callable],
                         aggregate: MonoidSpec, update: ActionSpec) -> dict:
    """One synchronous layer ``x'_u = phi(x_u, (+)_{v in N_u} psi_e(x_v))``.

    All messages are computed from the round-start states.
    """
    new = {}
    for u in g.nodes:
        acc = aggregate.unit
        for e in g.in_edges(u):
            m = psi[e.id](states[e.src])
            if m not in aggregate.carrier:
                raise TypeError(f"edge {e.id!r} produced {m!r}, outside {aggregate.name}")
            acc = aggregate.op(acc, m)
        new[u] = update.act(acc, states[u])
    return new


def attention_coefficients(q, keys) -> np.ndarray:
    q = np.asarray(q, dtype=np.float64)
    k = np.asarray(keys, dtype=np.float64)
    if k.ndim != 2 or len(k) == 0:
        raise ValueError("attention needs at least one key")
    logits = k @ q
    logits = logits - logits.max()
    w = np.exp(logits)
    return w / w.sum()


def attention_message(q, keys, values) -> list[np.ndarray]:
    """Softmax-weighted values, one message per incoming edge.

    Normalisation needs every key at once, so this is only meaningful as a
    blocking message function over all of a receiver's in-edges.
    """
    if len(keys) == 0 or len(keys) != len(values):
        raise ValueError("keys and values must be non-empty and of equal length")
    alpha = attention_coefficients(q, keys)
    return [a * np.asarray(v, dtype=np.float64) for a, v in zip(alpha, values)]


@dataclass
class Instance:
    """Everything needed to execute message passing on a graph.

    ``algebras`` gives each node its argument function, ``psi`` each edge its
    message function. ``sync`` optionally carries the state-level message
    functions, aggregate and update used for the synchronous layer form.
    """

    graph: Graph
    algebras: dict
    psi: dict
    initial: dict
    inject: list
    name: str = ""
    doc: dict | None = None
    sync: tuple | None = None
    decode: Callable[[dict], dict] | None = None
    oracle: Callable[[], dict] | None = None
    verified: bool = False
    reports: dict = field(default_factory=dict)

    def state_vector(self, states: Mapping) -> tuple:
        return tuple(states[u] for u in self.graph.nodes)
