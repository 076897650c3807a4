"""Shipped monoids, actions and argument functions, addressable by name.

Factories are cached so a name always maps to the same object; instance
verification results are cached against these names.
"""
from __future__ import annotations

import itertools
from functools import lru_cache

from .algebra import (
    BOT,
    ActionSpec,
    ArgumentFn,
    Carrier,
    MonoidSpec,
    ReadoutTable,
    cocycle_from_pointwise,
    finite_carrier,
    join,
    naive_delta,
    nat_carrier,
    ordered_carrier,
)

# Default verification windows.
NAT_WINDOW = (0, 200)
ORDER_WINDOW = (0, 20)


# -- monoids ---------------------------------------------------------------

@lru_cache(maxsize=None)
def max_bottom(lo: int = ORDER_WINDOW[0], hi: int = ORDER_WINDOW[1]) -> MonoidSpec:
    return MonoidSpec(ordered_carrier(lo, hi), join, BOT, commutative=True, idempotent=True,
                      name="max_bottom")


@lru_cache(maxsize=None)
def nat_add(lo: int = NAT_WINDOW[0], hi: int = NAT_WINDOW[1]) -> MonoidSpec:
    return MonoidSpec(nat_carrier(lo, hi), lambda a, b: a + b, 0, commutative=True, name="nat_add")


@lru_cache(maxsize=None)
def nat_mul(lo: int = 1, hi: int = 20) -> MonoidSpec:
    carrier = Carrier(tuple(range(lo, hi + 1)), False, (lo, hi),
                      lambda x: isinstance(x, int) and x >= 0, f"N[{lo},{hi}]")
    return MonoidSpec(carrier, lambda a, b: a * b, 1, commutative=True, name="nat_mul")


@lru_cache(maxsize=None)
def bool_or() -> MonoidSpec:
    return MonoidSpec(finite_carrier((False, True), "bool"), lambda a, b: a or b, False,
                      commutative=True, idempotent=True, name="bool_or")


@lru_cache(maxsize=None)
def trivial() -> MonoidSpec:
    return MonoidSpec(finite_carrier((0,), "one"), lambda a, b: 0, 0, commutative=True,
                      idempotent=True, name="trivial")


@lru_cache(maxsize=None)
def saturating_sub(n: int = 3) -> MonoidSpec:
    """Truncated subtraction on ``{0..n}``; not associative, kept as a negative case."""
    return MonoidSpec(finite_carrier(range(n + 1), f"0..{n}"), lambda a, b: max(a - b, 0), 0,
                      name="saturating_sub")


def _vec_join(a, b):
    return tuple(join(x, y) for x, y in zip(a, b))


@lru_cache(maxsize=None)
def max_vectors(width: int, values: tuple = (BOT, 0, 1, 2)) -> MonoidSpec:
    """Width-``width`` tropical vectors under componentwise max."""
    elements = tuple(itertools.product(values, repeat=width))
    carrier = Carrier(
        elements, False, {"width": width, "values": [v if v is not BOT else "bot" for v in values]},
        lambda x: isinstance(x, tuple) and len(x) == width
        and all(v is BOT or isinstance(v, int) for v in x),
        f"vec{width}",
    )
    return MonoidSpec(carrier, _vec_join, (BOT,) * width, commutative=True, idempotent=True,
                      name=f"max_vectors[{width}]")


# -- actions ---------------------------------------------------------------

@lru_cache(maxsize=None)
def digit_action() -> ActionSpec:
    """(N, +) acting on base-10 digits by repeated successor mod 10."""
    return ActionSpec(nat_add(), finite_carrier(range(10), "digits"), lambda m, s: (s + m) % 10,
                      name="add_mod10")


@lru_cache(maxsize=None)
def counter_action() -> ActionSpec:
    """(N, +) acting on N by addition."""
    return ActionSpec(nat_add(), nat_carrier(*NAT_WINDOW), lambda m, s: s + m, name="counter")


def self_action(m: MonoidSpec) -> ActionSpec:
    return ActionSpec(m, m.carrier, m.op, name=f"{m.name} on itself")


# -- argument functions ----------------------------------------------------

def semilattice_delta(m, s):
    """Emit the joined state only when the message improves it."""
    if m <= s:
        return BOT
    return join(m, s)


@lru_cache(maxsize=None)
def bellman_ford() -> ArgumentFn:
    m = max_bottom()
    return ArgumentFn(self_action(m), m, semilattice_delta, name="bellman_ford")


def carry_delta(m, s):
    return (m + s) // 10


@lru_cache(maxsize=None)
def carry() -> ArgumentFn:
    return ArgumentFn(digit_action(), nat_add(), carry_delta, name="carry")


@lru_cache(maxsize=None)
def counter() -> ArgumentFn:
    """Terminal accumulator: adds messages, never emits."""
    return ArgumentFn(counter_action(), nat_add(), lambda m, s: 0, name="counter")


@lru_cache(maxsize=None)
def relay() -> ArgumentFn:
    """Accumulator that forwards every message as an argument."""
    return ArgumentFn(counter_action(), nat_add(), lambda m, s: m, name="relay")


@lru_cache(maxsize=None)
def carry_zero() -> ArgumentFn:
    return ArgumentFn(digit_action(), nat_add(), lambda m, s: 0, name="carry_zero")


@lru_cache(maxsize=None)
def carry_touch() -> ArgumentFn:
    """Emits one carry whenever the digit is touched; not a cocycle."""
    return ArgumentFn(digit_action(), nat_add(), lambda m, s: 1 if m else 0, name="carry_touch")


@lru_cache(maxsize=None)
def carry_pointwise() -> ArgumentFn:
    omega = ReadoutTable.from_function(lambda s: (1 + s) // 10, digit_action(), nat_add())
    d = cocycle_from_pointwise(omega)
    return ArgumentFn(d.action, d.args, d.delta, name="carry_pointwise")


@lru_cache(maxsize=None)
def maxmax(width: int) -> ArgumentFn:
    """Componentwise semilattice argument function on tropical vectors."""
    values = (BOT, 0, 1, 2) if width <= 2 else (BOT, 0, 1)
    m = max_vectors(width, values)

    def delta(msg, s):
        return tuple(semilattice_delta(x, y) for x, y in zip(msg, s))

    return ArgumentFn(self_action(m), m, delta, name=f"maxmax[{width}]")


@lru_cache(maxsize=None)
def bellman_ford_lex() -> ArgumentFn:
    """Path values ``(-length, -predecessor)`` ordered lexicographically.

    Equal lengths tie-break toward the smaller predecessor id.
    """
    elements = (BOT,) + tuple(itertools.product(range(-5, 1), range(-3, 1)))
    carrier = Carrier(elements, False, {"lengths": [-5, 0], "preds": [-3, 0]},
                      lambda x: x is BOT or (isinstance(x, tuple) and len(x) == 2), "lexpairs")
    m = MonoidSpec(carrier, join, BOT, commutative=True, idempotent=True, name="lex_max")
    return ArgumentFn(self_action(m), m, semilattice_delta, name="bellman_ford_lex")


def _named(d: ArgumentFn, name: str) -> ArgumentFn:
    return ArgumentFn(d.action, d.args, d.delta, name=name)


ALGEBRAS = {
    "bellman_ford": bellman_ford,
    "bellman_ford_lex": bellman_ford_lex,
    "bellman_ford_naive": lambda: _named(naive_delta(max_bottom()), "bellman_ford_naive"),
    "carry": carry,
    "carry_pointwise": carry_pointwise,
    "carry_zero": carry_zero,
    "carry_touch": carry_touch,
    "counter": counter,
    "relay": relay,
    "naive_or": lambda: _named(naive_delta(bool_or()), "naive_or"),
    "naive_nat_add": lambda: _named(naive_delta(nat_add(0, 50)), "naive_nat_add"),
    "naive_nat_mul": lambda: _named(naive_delta(nat_mul(1, 20)), "naive_nat_mul"),
    "maxmax1": lambda: maxmax(1),
    "maxmax2": lambda: maxmax(2),
}

MONOIDS = {
    "max_bottom": max_bottom,
    "nat_add": nat_add,
    "nat_mul": nat_mul,
    "bool_or": bool_or,
    "trivial": trivial,
    "saturating_sub": saturating_sub,
}

_built: dict[str, ArgumentFn] = {}


def algebra(name: str) -> ArgumentFn:
    """Look up a shipped argument function; raises ``KeyError`` if unknown.

    ``maxmax<k>`` resolves for any positive width ``k``.
    """
    if name not in _built:
        if name not in ALGEBRAS and name.startswith("maxmax") and name[6:].isdigit():
            _built[name] = _named(maxmax(int(name[6:])), name)
        else:
            _built[name] = _named(ALGEBRAS[name](), name)
    return _built[name]


def monoid(name: str) -> MonoidSpec:
    return MONOIDS[name]()
