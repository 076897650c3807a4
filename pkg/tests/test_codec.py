import numpy as np
from hypothesis import given, strategies as st

from asyncmp.algebra import BOT
from asyncmp.codec import canonical_dumps, decode, encode

values = st.recursive(
    st.one_of(st.just(BOT), st.integers(), st.booleans()),
    lambda inner: st.lists(inner, max_size=4).map(tuple),
    max_leaves=12,
)


@given(values)
def test_roundtrip(x):
    assert decode(encode(x)) == x


def test_bottom_token():
    assert encode(BOT) == "bot" and decode("bot") is BOT
    assert encode((1, BOT)) == [1, "bot"]


def test_numpy_values():
    assert encode(np.array([1, 2])) == [1, 2]
    assert type(encode(np.int64(3))) is int


def test_canonical_dumps():
    assert canonical_dumps({"b": 1, "a": [1, "bot"]}) == '{"a":[1,"bot"],"b":1}'
    assert canonical_dumps({"x": "⊥"}).isascii()
