"""Monoids, actions, argument functions and their law checkers.

Everything here is value-level and deterministic. Infinite carriers are
handled through explicit windows: a law is checked exhaustively over the
window when the number of tuples is below a cap, otherwise on a seeded
random sample. The coverage actually used is recorded on the report.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterable, Sequence

EXHAUSTIVE_CAP = 2_000_000
SAMPLE_SIZE = 20_000
MAX_WITNESSES = 8


class SpecificationError(ValueError):
    """An algebra was described inconsistently (unit outside carrier etc.)."""


class _Bottom:
    """Bottom element of an ordered carrier.

    Compares below every other value, including tuples, so the builtin
    ``max`` acts as a join with ``BOT`` as unit.
    """

    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "BOT"

    def __reduce__(self):
        return (_Bottom, ())

    def __lt__(self, other):
        return other is not self

    def __le__(self, other):
        return True

    def __gt__(self, other):
        return False

    def __ge__(self, other):
        return other is self

    def __hash__(self):
        return 0x5F0B07


BOT = _Bottom()


def join(a, b):
    """Max in a total order with ``BOT`` at the bottom."""
    return a if b is BOT or (a is not BOT and a >= b) else b


def tadd(a, b):
    """Tropical product: ordinary ``+`` with ``BOT`` absorbing."""
    if a is BOT or b is BOT:
        return BOT
    return a + b


@dataclass(frozen=True)
class Carrier:
    """A finite list of values standing for a (possibly infinite) set.

    ``elements`` is the whole set when ``enumerable`` is true, otherwise the
    test window described by ``window``. ``contains`` decides membership in
    the full set and is used for closure checks.
    """

    elements: tuple
    enumerable: bool = True
    window: Any = None
    contains: Callable[[Any], bool] | None = field(default=None, compare=False)
    name: str = ""

    def __post_init__(self):
        elements = tuple(self.elements)
        object.__setattr__(self, "elements", elements)
        members = frozenset(elements)
        if len(members) != len(elements):
            raise SpecificationError(f"carrier {self.name!r} has repeated elements")
        if not self.enumerable and self.window is None:
            raise SpecificationError(f"carrier {self.name!r} is infinite but has no window")
        object.__setattr__(self, "_members", members)

    def __contains__(self, x):
        if self.contains is not None:
            return self.contains(x)
        try:
            return x in self._members
        except TypeError:
            return False

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def describe(self):
        if self.enumerable:
            return {"carrier": self.name, "size": len(self.elements)}
        return {"carrier": self.name, "window": _plain(self.window)}


def _plain(x):
    if x is BOT:
        return "bot"
    if isinstance(x, (tuple, list)):
        return [_plain(v) for v in x]
    return x


def finite_carrier(elements: Iterable, name: str = "") -> Carrier:
    return Carrier(tuple(elements), True, None, None, name)


def nat_carrier(lo: int = 0, hi: int = 200) -> Carrier:
    """The natural numbers, tested on ``[lo, hi]``."""
    return Carrier(
        tuple(range(lo, hi + 1)), False, (lo, hi),
        lambda x: isinstance(x, int) and not isinstance(x, bool) and x >= 0,
        f"N[{lo},{hi}]",
    )


def ordered_carrier(lo: int = 0, hi: int = 20) -> Carrier:
    """The integers with a bottom element, tested on ``{BOT, lo..hi}``."""
    return Carrier(
        (BOT,) + tuple(range(lo, hi + 1)), False, ("bot", lo, hi),
        lambda x: x is BOT or (isinstance(x, int) and not isinstance(x, bool)),
        f"Z+bot[{lo},{hi}]",
    )


@dataclass(frozen=True)
class MonoidSpec:
    carrier: Carrier
    op: Callable[[Any, Any], Any] = field(compare=False)
    unit: Any
    commutative: bool = False
    idempotent: bool = False
    name: str = ""

    def __post_init__(self):
        if self.unit not in self.carrier:
            raise SpecificationError(f"unit {self.unit!r} of {self.name!r} is not in its carrier")

    @property
    def zero(self):
        return self.unit

    def combine(self, items: Iterable):
        acc = self.unit
        for x in items:
            acc = self.op(acc, x)
        return acc


@dataclass(frozen=True)
class ActionSpec:
    """A left action ``act(m, s)`` of ``monoid`` on ``states``."""

    monoid: MonoidSpec
    states: Carrier
    act: Callable[[Any, Any], Any] = field(compare=False)
    name: str = ""


@dataclass(frozen=True)
class ArgumentFn:
    """An argument function ``delta(m, s)`` with values in a commutative monoid."""

    action: ActionSpec
    args: MonoidSpec
    delta: Callable[[Any, Any], Any] = field(compare=False)
    name: str = ""

    @property
    def messages(self) -> MonoidSpec:
        return self.action.monoid

    @property
    def states(self) -> Carrier:
        return self.action.states

    def act(self, m, s):
        return self.action.act(m, s)

    def __call__(self, m, s):
        return self.delta(m, s)


# --------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class Witness:
    law: str
    inputs: dict
    lhs: Any
    rhs: Any


@dataclass(frozen=True)
class Coverage:
    mode: str  # "exhaustive" or "sampled"
    windows: dict
    checked: int
    seed: int | None = None


@dataclass
class ViolationReport:
    witnesses: list = field(default_factory=list)
    coverage: list = field(default_factory=list)
    subject: str = ""

    @property
    def passed(self) -> bool:
        return not self.witnesses

    def merge(self, other: "ViolationReport") -> "ViolationReport":
        self.witnesses.extend(other.witnesses)
        self.coverage.extend(other.coverage)
        return self

    def to_dict(self) -> dict:
        return {
            "subject": self.subject,
            "passed": self.passed,
            "witnesses": [
                {"law": w.law, "inputs": {k: _plain(v) for k, v in w.inputs.items()},
                 "lhs": _plain(w.lhs), "rhs": _plain(w.rhs)}
                for w in self.witnesses
            ],
            "coverage": [
                {"mode": c.mode, "windows": c.windows, "checked": c.checked, "seed": c.seed}
                for c in self.coverage
            ],
        }


OUTSIDE = "<outside carrier>"

# Each law takes the subject and named inputs and returns (lhs, rhs); the law
# is violated iff lhs != rhs. Witnesses are replayed through the same table.
LAWS: dict[str, Callable[..., tuple]] = {}


def law(name):
    def register(fn):
        LAWS[name] = fn
        return fn
    return register


def replay(subject, witness: Witness) -> tuple:
    """Re-evaluate a witness against ``subject``; returns ``(lhs, rhs)``."""
    return LAWS[witness.law](subject, **witness.inputs)


def _scan(subject, law_name, domains: dict[str, Sequence], *, cap, samples, seed,
          max_witnesses) -> ViolationReport:
    fn = LAWS[law_name]
    names = list(domains)
    pools = [domains[n] for n in names]
    total = 1
    for p in pools:
        total *= len(p)
    windows = {n: len(domains[n]) for n in names}
    report = ViolationReport(subject=getattr(subject, "name", ""))
    if total <= cap:
        tuples: Iterable = itertools.product(*pools)
        cov = Coverage("exhaustive", windows, total)
    else:
        rng = random.Random(seed)
        tuples = (tuple(rng.choice(p) for p in pools) for _ in range(samples))
        cov = Coverage("sampled", windows, samples, seed)
    report.coverage.append(cov)
    for values in tuples:
        inputs = dict(zip(names, values))
        lhs, rhs = fn(subject, **inputs)
        if lhs != rhs:
            report.witnesses.append(Witness(law_name, inputs, lhs, rhs))
            if len(report.witnesses) >= max_witnesses:
                break
    return report


def _opts(kw):
    return dict(cap=kw.get("cap", EXHAUSTIVE_CAP), samples=kw.get("samples", SAMPLE_SIZE),
                seed=kw.get("seed", 0), max_witnesses=kw.get("max_witnesses", MAX_WITNESSES))


# --------------------------------------------------------------------------
# monoids


@law("closure")
def _closure(m: MonoidSpec, a, b):
    v = m.op(a, b)
    return v, (v if v in m.carrier else OUTSIDE)


@law("associativity")
def _assoc(m: MonoidSpec, a, b, c):
    return m.op(m.op(a, b), c), m.op(a, m.op(b, c))


@law("left_unit")
def _left_unit(m: MonoidSpec, a):
    return m.op(m.unit, a), a


@law("right_unit")
def _right_unit(m: MonoidSpec, a):
    return m.op(a, m.unit), a


@law("commutativity")
def _comm(m: MonoidSpec, a, b):
    return m.op(a, b), m.op(b, a)


@law("idempotence")
def _idem(m: MonoidSpec, a):
    return m.op(a, a), a


def check_monoid_laws(m: MonoidSpec, **kw) -> ViolationReport:
    """Closure, associativity, both unit laws and (if claimed) commutativity."""
    if m.unit not in m.carrier:
        raise SpecificationError(f"unit of {m.name!r} is not in its carrier")
    xs = m.carrier.elements
    o = _opts(kw)
    report = ViolationReport(subject=m.name)
    report.merge(_scan(m, "closure", {"a": xs, "b": xs}, **o))
    report.merge(_scan(m, "associativity", {"a": xs, "b": xs, "c": xs}, **o))
    report.merge(_scan(m, "left_unit", {"a": xs}, **o))
    report.merge(_scan(m, "right_unit", {"a": xs}, **o))
    if m.commutative:
        report.merge(_scan(m, "commutativity", {"a": xs, "b": xs}, **o))
    return report


def is_idempotent(m: MonoidSpec) -> tuple[bool, Any]:
    """``(True, None)`` if ``a + a == a`` on the carrier, else ``(False, a)``."""
    for a in m.carrier.elements:
        if m.op(a, a) != a:
            return False, a
    return True, None


# --------------------------------------------------------------------------
# actions


@law("action_closure")
def _act_closure(a: ActionSpec, m, s):
    v = a.act(m, s)
    return v, (v if v in a.states else OUTSIDE)


@law("action_unit")
def _act_unit(a: ActionSpec, s):
    return a.act(a.monoid.unit, s), s


@law("action_associativity")
def _act_assoc(a: ActionSpec, n, m, s):
    return a.act(a.monoid.op(n, m), s), a.act(n, a.act(m, s))


def check_action(a: ActionSpec, **kw) -> ViolationReport:
    """Unit and associativity axioms of a monoid action (plus closure)."""
    ms, ss = a.monoid.carrier.elements, a.states.elements
    o = _opts(kw)
    report = ViolationReport(subject=a.name)
    report.merge(_scan(a, "action_closure", {"m": ms, "s": ss}, **o))
    report.merge(_scan(a, "action_unit", {"s": ss}, **o))
    report.merge(_scan(a, "action_associativity", {"n": ms, "m": ms, "s": ss}, **o))
    return report


# --------------------------------------------------------------------------
# argument functions


@law("cocycle_unit")
def _cocycle_unit(d: ArgumentFn, s):
    return d.delta(d.messages.unit, s), d.args.unit


@law("cocycle_associativity")
def _cocycle_assoc(d: ArgumentFn, n, m, s):
    lhs = d.delta(d.messages.op(n, m), s)
    rhs = d.args.op(d.delta(m, s), d.delta(n, d.act(m, s)))
    return lhs, rhs


def check_cocycle(d: ArgumentFn, **kw) -> ViolationReport:
    """The two argument axioms: zero on the unit, and the 1-cocycle rule."""
    ms, ss = d.messages.carrier.elements, d.states.elements
    o = _opts(kw)
    report = ViolationReport(subject=d.name)
    report.merge(_scan(d, "cocycle_unit", {"s": ss}, **o))
    report.merge(_scan(d, "cocycle_associativity", {"n": ms, "m": ms, "s": ss}, **o))
    return report


def naive_delta(m: MonoidSpec | ActionSpec) -> ArgumentFn:
    """``delta_m(s) = 0`` for the unit message, else ``m . s``, with M = S = A.

    Passing an :class:`ActionSpec` requires its states to be the monoid's own
    carrier; the action used is always the monoid operation.
    """
    if isinstance(m, ActionSpec):
        if m.states.elements != m.monoid.carrier.elements:
            raise SpecificationError("naive_delta needs M = S = A")
        m = m.monoid
    unit, op = m.unit, m.op
    action = ActionSpec(m, m.carrier, op, name=f"{m.name} on itself")

    def delta(msg, s):
        return unit if msg == unit else op(msg, s)

    return ArgumentFn(action, m, delta, name=f"naive[{m.name}]")


def star_act(m, pair: tuple, d: ArgumentFn) -> tuple:
    """Act on a state extended by its accumulated outgoing argument."""
    s, a = pair
    return d.act(m, s), d.args.op(a, d.delta(m, s))


def star_action(d: ArgumentFn, arg_sample: Sequence | None = None) -> ActionSpec:
    """The action ``m * (s, a)`` on ``S x A`` as an :class:`ActionSpec`.

    ``arg_sample`` always gets the zero argument prepended; with it in the
    sample, the associativity verdict of this action equals the cocycle
    verdict even for idempotent ``A``.
    """
    zero = d.args.unit
    if arg_sample is None:
        arg_sample = d.args.carrier.elements[:3]
    sample = [zero] + [a for a in arg_sample if a != zero]
    pairs = tuple(itertools.product(d.states.elements, sample))
    states = Carrier(
        pairs, False, {"states": d.states.describe(), "args": len(sample)},
        lambda p: isinstance(p, tuple) and len(p) == 2 and p[0] in d.states and p[1] in d.args.carrier,
        f"{d.states.name} x {d.args.carrier.name}",
    )
    return ActionSpec(d.messages, states, lambda m, p: star_act(m, p, d), name=f"star[{d.name}]")


# --------------------------------------------------------------------------
# readout functions and the semidirect product


@dataclass(frozen=True, eq=False)
class ReadoutTable:
    """An explicit map from a finite state set to arguments."""

    values: tuple
    action: ActionSpec
    args: MonoidSpec

    def __post_init__(self):
        if not self.action.states.enumerable:
            raise SpecificationError("readout tables need a finite state set")
        object.__setattr__(self, "values", tuple(self.values))
        if len(self.values) != len(self.action.states.elements):
            raise SpecificationError("readout table does not cover the state set")

    @classmethod
    def from_function(cls, fn, action: ActionSpec, args: MonoidSpec) -> "ReadoutTable":
        return cls(tuple(fn(s) for s in action.states.elements), action, args)

    @classmethod
    def zero(cls, action: ActionSpec, args: MonoidSpec) -> "ReadoutTable":
        return cls((args.unit,) * len(action.states.elements), action, args)

    def __call__(self, s):
        return self.values[self.action.states.elements.index(s)]

    def __eq__(self, other):
        return (isinstance(other, ReadoutTable) and self.values == other.values
                and self.action.states.elements == other.action.states.elements)

    def __hash__(self):
        return hash(self.values)

    def __repr__(self):
        return f"ReadoutTable({list(self.values)!r})"


def _same_shape(f: ReadoutTable, g: ReadoutTable):
    if (f.action.states.elements != g.action.states.elements
            or f.args.carrier.elements != g.args.carrier.elements):
        raise SpecificationError("readout tables over different carriers")


def readout_add(f: ReadoutTable, g: ReadoutTable) -> ReadoutTable:
    _same_shape(f, g)
    op = f.args.op
    return ReadoutTable(tuple(op(x, y) for x, y in zip(f.values, g.values)), f.action, f.args)


def readout_ract(f: ReadoutTable, m) -> ReadoutTable:
    """Right translation ``(f . m)(s) = f(m . s)``."""
    states = f.action.states
    index = {s: i for i, s in enumerate(states.elements)}
    out = []
    for s in states.elements:
        t = f.action.act(m, s)
        if t not in index:
            raise SpecificationError(f"action leaves the state set: {m!r} . {s!r} = {t!r}")
        out.append(f.values[index[t]])
    return ReadoutTable(tuple(out), f.action, f.args)


def curry(d: ArgumentFn, m) -> ReadoutTable:
    """``D(m)``: the argument function at a fixed message, as a table."""
    return ReadoutTable.from_function(lambda s: d.delta(m, s), d.action, d.args)


@dataclass(frozen=True)
class SemidirectElement:
    f: ReadoutTable
    a: Any


def semidirect_mul(x: SemidirectElement, y: SemidirectElement) -> SemidirectElement:
    """``(f, a) * (g, b) = (f . b + g, a . b)``."""
    mop = x.f.action.monoid.op
    return SemidirectElement(readout_add(readout_ract(x.f, y.a), y.f), mop(x.a, y.a))


def semidirect_monoid(action: ActionSpec, args: MonoidSpec, tables: Sequence[ReadoutTable]) -> MonoidSpec:
    """The semidirect product restricted to ``tables x M`` for law checking.

    Closure is judged against the full product, so products landing outside
    the sampled tables are still members.
    """
    zero = ReadoutTable.zero(action, args)
    tabs = list(dict.fromkeys([zero, *tables]))
    elements = tuple(SemidirectElement(t, a) for t in tabs for a in action.monoid.carrier.elements)
    m = action.monoid
    carrier = Carrier(
        elements, False, {"tables": len(tabs), "messages": len(m.carrier)},
        lambda x: (isinstance(x, SemidirectElement) and x.a in m.carrier
                   and x.f.action.states.elements == action.states.elements),
        f"[{action.states.name},{args.carrier.name}] x| {m.name}",
    )
    return MonoidSpec(carrier, semidirect_mul, SemidirectElement(zero, m.unit),
                      name=f"semidirect[{action.name}]")


def _section_product(d: ArgumentFn, a, b):
    """``s(a . b)`` and ``s(a) * s(b)`` as comparable (values, message) pairs."""
    mop = d.messages.op
    if d.states.enumerable:
        lhs = SemidirectElement(curry(d, mop(a, b)), mop(a, b))
        rhs = semidirect_mul(SemidirectElement(curry(d, a), a), SemidirectElement(curry(d, b), b))
        return (lhs.f.values, lhs.a), (rhs.f.values, rhs.a)
    # Infinite S: same formula, evaluated pointwise on the state window.
    ss = d.states.elements
    ab = mop(a, b)
    lhs = tuple(d.delta(ab, s) for s in ss)
    rhs = tuple(d.args.op(d.delta(a, d.act(b, s)), d.delta(b, s)) for s in ss)
    return (lhs, ab), (rhs, ab)


@law("splitting_unit")
def _split_unit(d: ArgumentFn):
    u = d.messages.unit
    return (tuple(d.delta(u, s) for s in d.states.elements), u), \
        ((d.args.unit,) * len(d.states.elements), u)


@law("splitting_product")
def _split_product(d: ArgumentFn, a, b):
    return _section_product(d, a, b)


def check_splitting(d: ArgumentFn, **kw) -> ViolationReport:
    """Whether ``a -> (D(a), a)`` is a monoid map into the semidirect product."""
    ms = d.messages.carrier.elements
    o = _opts(kw)
    report = ViolationReport(subject=d.name)
    report.merge(_scan(d, "splitting_unit", {}, **o))
    report.merge(_scan(d, "splitting_product", {"a": ms, "b": ms}, **o))
    return report


def splitting_is_hom(d: ArgumentFn, **kw) -> bool:
    return check_splitting(d, **kw).passed


def cocycle_from_pointwise(omega: ReadoutTable, action: ActionSpec | None = None) -> ArgumentFn:
    """The unique cocycle of an N-action with ``delta_1 = omega``.

    ``delta_n(s)`` sums ``omega`` along the orbit ``s, pi(s), ..., pi^(n-1)(s)``
    where ``pi = act(1, -)``. Partial sums are cached per starting state.
    """
    action = action or omega.action
    nat = action.monoid
    if nat.unit != 0 or 1 not in nat.carrier or nat.op(1, 1) != 2:
        raise SpecificationError("cocycle_from_pointwise needs the monoid (N, +, 0)")
    args = omega.args
    index = {s: i for i, s in enumerate(omega.action.states.elements)}
    prefix: dict[Hashable, tuple[list, Any]] = {}

    def delta(n, s):
        sums, cur = prefix.get(s, ([args.unit], s))
        while len(sums) <= n:
            sums.append(args.op(sums[-1], omega.values[index[cur]]))
            cur = action.act(1, cur)
        prefix[s] = (sums, cur)
        return sums[n]

    return ArgumentFn(action, args, delta, name=f"pointwise[{action.name}]")
