"""Reference results computed without any of the engine's code.

Each oracle reads the plain instance document (the JSON dict) and returns
the decoded output the engine should produce. Unreachable or bottom values
are ``None`` internally and mapped to the document conventions at the end.
"""
from __future__ import annotations

import math


def bellman_ford_distances(nodes, edges, source):
    """Textbook |V|-1 round relaxation; ``edges`` are ``(u, v, w)``."""
    dist = {u: math.inf for u in nodes}
    dist[source] = 0
    for _ in range(len(nodes) - 1):
        changed = False
        for u, v, w in edges:
            if dist[u] + w < dist[v]:
                dist[v] = dist[u] + w
                changed = True
        if not changed:
            break
    return dist


def bellman_ford_predecessors(nodes, edges, source, dist):
    """Smallest-id predecessor among tight edges; the source also counts itself."""
    pred = {}
    for v in nodes:
        if dist[v] == math.inf:
            pred[v] = None
            continue
        cands = [u for u, x, w in edges if x == v and dist[u] + w == dist[v]]
        if v == source:
            cands.append(source)
        pred[v] = min(cands)
    return pred


def _edges(doc, key):
    return [(e["src"], e["dst"], e["payload"][key]) for e in doc["graph"]["edges"]]


def oracle_bellman_ford(doc) -> dict:
    nodes = doc["graph"]["nodes"]
    edges = _edges(doc, "length")
    source = doc["params"]["source"]
    dist = bellman_ford_distances(nodes, edges, source)
    out = {"distances": [None if dist[u] == math.inf else dist[u] for u in nodes]}
    if doc["params"].get("predecessors"):
        pred = bellman_ford_predecessors(nodes, edges, source, dist)
        out["predecessors"] = [pred[u] for u in nodes]
    return out


def oracle_integer_addition(doc) -> dict:
    x = doc["params"]["x"]
    y = doc["params"]["y"]
    k = len(x)
    total = sum(d * 10**i for i, d in enumerate(x)) + sum(d * 10**i for i, d in enumerate(y))
    return {"digits": [(total // 10**i) % 10 for i in range(k)], "overflow": total // 10**k}


def oracle_maxmax_fixpoint(doc) -> dict:
    """Iterate ``x_u <- max(x_u, max_e W_e x_src)`` from the features until stable."""
    nodes = doc["graph"]["nodes"]
    k = doc["params"]["width"]
    ninf = -math.inf

    def num(v):
        return ninf if v == "bot" else v

    x = {u: [num(v) for v in f] for u, f in zip(nodes, doc["params"]["features"])}
    mats = [(e["src"], e["dst"], [[num(v) for v in row] for row in e["payload"]["matrix"]])
            for e in doc["graph"]["edges"]]
    while True:
        new = {u: list(x[u]) for u in nodes}
        for src, dst, W in mats:
            for i in range(k):
                best = max(W[i][j] + x[src][j] for j in range(k))
                if best > new[dst][i]:
                    new[dst][i] = best
        if new == x:
            break
        x = new
    return {"features": [["bot" if v == ninf else int(v) for v in x[u]] for u in nodes]}


ORACLES = {
    "bellman_ford": oracle_bellman_ford,
    "integer_addition": oracle_integer_addition,
    "maxmax_fixpoint": oracle_maxmax_fixpoint,
}
