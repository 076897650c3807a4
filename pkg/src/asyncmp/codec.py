"""JSON encoding of carrier values and canonical serialization.

Bottom is written as the ASCII token ``"bot"``; tuples become arrays and
arrays decode back to tuples.
"""
from __future__ import annotations

import json
from typing import Any

import numpy as np

from .algebra import BOT

BOT_TOKEN = "bot"


def encode(x: Any) -> Any:
    if x is BOT:
        return BOT_TOKEN
    if isinstance(x, (tuple, list)):
        return [encode(v) for v in x]
    if isinstance(x, np.ndarray):
        return [encode(v) for v in x.tolist()]
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    if isinstance(x, dict):
        return {str(k): encode(v) for k, v in x.items()}
    return x


def decode(x: Any) -> Any:
    if x == BOT_TOKEN:
        return BOT
    if isinstance(x, list):
        return tuple(decode(v) for v in x)
    return x


def canonical_dumps(obj: Any) -> str:
    """Sorted keys, no insignificant whitespace, ASCII only."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True)
