"""Reference implementations, checked against hand-computed values."""
import math

from asyncmp.instances import bellman_ford_doc, carry_doc, maxmax_doc, weighted_graph
from asyncmp.oracles import (
    bellman_ford_distances,
    bellman_ford_predecessors,
    oracle_bellman_ford,
    oracle_integer_addition,
    oracle_maxmax_fixpoint,
)
from asyncmp import BOT

from conftest import DEMO_EDGES


def test_single_node():
    assert oracle_bellman_ford(bellman_ford_doc(weighted_graph([0], []), 0)) == {"distances": [0]}


def test_two_nodes():
    doc = bellman_ford_doc(weighted_graph([0, 1], [(0, 1, 5)]), 0)
    assert oracle_bellman_ford(doc) == {"distances": [0, 5]}


def test_disconnected_node_is_none():
    doc = bellman_ford_doc(weighted_graph([0, 1, 2], [(0, 1, 2)]), 0)
    assert oracle_bellman_ford(doc) == {"distances": [0, 2, None]}


def test_demo_graph_by_hand():
    # 0->2 (1), 2->1 (2) beats 0->1 (4); 1->3 (1) beats 2->3 (5)
    dist = bellman_ford_distances([0, 1, 2, 3], DEMO_EDGES, 0)
    assert dist == {0: 0, 1: 3, 2: 1, 3: 4}
    assert bellman_ford_predecessors([0, 1, 2, 3], DEMO_EDGES, 0, dist) == {0: 0, 1: 2, 2: 0, 3: 1}


def test_predecessor_tie_breaks_to_smaller_id():
    edges = [(0, 1, 1), (0, 2, 1), (1, 3, 1), (2, 3, 1)]
    dist = bellman_ford_distances(range(4), edges, 0)
    assert bellman_ford_predecessors(range(4), edges, 0, dist)[3] == 1


def test_unreachable_distance_is_inf():
    assert bellman_ford_distances([0, 1], [], 0)[1] == math.inf


def test_integer_addition():
    assert oracle_integer_addition(carry_doc([9, 9], [1, 0])) == {"digits": [0, 0], "overflow": 1}
    # 457 + 968 = 1425, little-endian digits
    assert oracle_integer_addition(carry_doc([7, 5, 4], [8, 6, 9])) == {"digits": [5, 2, 4], "overflow": 1}


def test_maxmax_fixpoint_hand_case():
    # 0 -> 1 with W = [[-1]]: x1 = max(2, 5 - 1) = 4
    g = weighted_graph([0, 1], [(0, 1, 0)])
    doc = maxmax_doc(g, [[5], [2]], [[[-1]]])
    assert oracle_maxmax_fixpoint(doc) == {"features": [[5], [4]]}


def test_maxmax_all_bottom():
    g = weighted_graph([0, 1], [(0, 1, 0), (1, 0, 0)])
    doc = maxmax_doc(g, [[BOT, BOT], [BOT, BOT]], [[[0, BOT], [BOT, 0]]] * 2)
    assert oracle_maxmax_fixpoint(doc) == {"features": [["bot", "bot"], ["bot", "bot"]]}
