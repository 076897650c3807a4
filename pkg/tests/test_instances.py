import json
import random
from importlib import resources

import pytest

from asyncmp import BOT, weighted_graph
from asyncmp.instances import (
    InstanceError,
    bellman_ford_doc,
    build_instance,
    carry_doc,
    confluence_check,
    digits_of,
    dumps_instance,
    load_instance,
    make_bellman_ford,
    make_carry_adder,
    make_maxmax_layer,
    make_sabotaged,
    maxmax_doc,
    random_weighted_graph,
    sabotaged_doc,
    save_instance,
)
from asyncmp.scheduler import SchedulePolicy, run, synchronous_run

from conftest import DEMO_EDGES, LINE3_EDGES


def test_single_node_distance():
    inst = make_bellman_ford(weighted_graph([0], []), 0)
    assert inst.decode(run(inst, SchedulePolicy()).states) == {"distances": [0]}


def test_two_node_distance():
    inst = make_bellman_ford(weighted_graph([0, 1], [(0, 1, 5)]), 0)
    assert inst.verified
    assert inst.decode(run(inst, SchedulePolicy("random", seed=7)).states) == {"distances": [0, 5]}


def test_unreachable_decodes_to_none():
    inst = make_bellman_ford(weighted_graph([0, 1, 2], [(0, 1, 3)]), 0)
    assert inst.decode(run(inst, SchedulePolicy()).states) == {"distances": [0, 3, None]}


def test_negative_weight_rejected():
    with pytest.raises(InstanceError):
        make_bellman_ford(weighted_graph([0, 1], [(0, 1, -1)]), 0)


def test_unknown_source_rejected():
    with pytest.raises(InstanceError):
        make_bellman_ford(weighted_graph([0, 1], [(0, 1, 1)]), 7)


def test_demo_synchronous_three_rounds(demo_graph):
    inst = make_bellman_ford(demo_graph, 0)
    assert inst.decode(synchronous_run(inst, 2)) != {"distances": [0, 3, 1, 4]}
    assert inst.decode(synchronous_run(inst, 3)) == {"distances": [0, 3, 1, 4]}


def test_predecessor_tracking(demo_graph):
    inst = make_bellman_ford(demo_graph, 0, predecessors=True)
    assert inst.verified
    for s in range(10):
        out = inst.decode(run(inst, SchedulePolicy("random", seed=s)).states)
        assert out == inst.oracle() == {"distances": [0, 3, 1, 4], "predecessors": [0, 2, 0, 1]}


def test_predecessor_ties_on_random_graphs():
    rng = random.Random(17)
    for _ in range(20):
        g = random_weighted_graph(rng, n_max=6, m_max=14, w_max=3)
        inst = make_bellman_ford(g, 0, predecessors=True)
        rep = confluence_check(inst, seeds=range(8))
        assert rep.passed, rep.to_dict()


def test_carry_99_plus_1():
    inst = make_carry_adder([9, 9], [1, 0])
    assert inst.verified
    assert inst.decode(run(inst, SchedulePolicy("fifo")).states) == {"digits": [0, 0], "overflow": 1}


def test_carry_plus_zero_runs_no_events():
    inst = make_carry_adder([3, 4, 5], [0, 0, 0])
    res = run(inst, SchedulePolicy("random", seed=1))
    assert res.steps == 0 and inst.decode(res.states) == {"digits": [3, 4, 5], "overflow": 0}


def test_carry_rejects_bad_digits():
    with pytest.raises(InstanceError):
        make_carry_adder([10], [1])
    with pytest.raises(InstanceError):
        build_instance({**carry_doc([1], [2]), "params": {"x": [1], "y": [-2]}})


def test_digits_of():
    assert digits_of(1425, 5) == [5, 2, 4, 1, 0]
    with pytest.raises(ValueError):
        digits_of(100, 2)


def test_maxmax_identity_matrices():
    g = weighted_graph([0, 1, 2], [(0, 1, 0), (1, 2, 0)])
    eye = [[0, BOT], [BOT, 0]]
    inst = make_maxmax_layer(g, [[1, BOT], [BOT, 5], [0, 0]], [eye, eye])
    assert inst.verified
    res = run(inst, SchedulePolicy("random", seed=2))
    assert inst.decode(res.states) == {"features": [[1, "bot"], [1, 5], [1, 5]]} == inst.oracle()


def test_maxmax_all_bottom():
    g = weighted_graph([0, 1], [(0, 1, 0), (1, 0, 0)])
    inst = make_maxmax_layer(g, [[BOT, BOT], [BOT, BOT]], [[[0, 1], [2, 3]]] * 2)
    res = run(inst, SchedulePolicy("fifo"))
    assert res.steps == 0 and all(v == (BOT, BOT) for v in res.states.values())


def test_maxmax_shape_mismatch():
    g = weighted_graph([0, 1], [(0, 1, 0)])
    with pytest.raises(InstanceError):
        make_maxmax_layer(g, [[0, 0], [0, 0]], [[[0]]])


def test_maxmax_fixed_rounds_and_quiescence():
    g = weighted_graph([0, 1, 2], [(0, 1, 0), (1, 2, 0)])
    inst = make_maxmax_layer(g, [[0], [BOT], [BOT]], [[[-1]], [[-1]]])
    assert inst.decode(synchronous_run(inst, 1)) == {"features": [[0], [-1], ["bot"]]}
    assert inst.decode(synchronous_run(inst)) == {"features": [[0], [-1], [-2]]}


def test_sabotaged_is_flagged_but_forced():
    inst = make_sabotaged()
    assert inst.verified
    assert not inst.reports["edge[0].homomorphism"].passed


def test_sabotaged_without_force_is_not_runnable():
    doc = sabotaged_doc()
    doc["params"] = {}
    inst = build_instance(doc)
    assert not inst.verified


@pytest.mark.parametrize("doc, msg", [
    ({}, "version"),
    ({"version": 2}, "version"),
    ({"version": 1, "algebra": "nope", "graph": {}, "initial": []}, "family"),
    ({"version": 1, "algebra": "bellman_ford"}, "graph"),
])
def test_malformed_documents(doc, msg):
    with pytest.raises(InstanceError, match=msg):
        build_instance(doc)


def test_wrong_number_of_initial_states():
    doc = bellman_ford_doc(weighted_graph([0, 1], [(0, 1, 1)]), 0)
    doc["initial"] = ["bot"]
    with pytest.raises(InstanceError):
        build_instance(doc)


def test_load_save_is_canonical(tmp_path, demo_graph):
    inst = make_bellman_ford(demo_graph, 0)
    p = tmp_path / "bf.json"
    save_instance(inst, p)
    again = load_instance(p)
    assert dumps_instance(again) == dumps_instance(inst)
    assert p.read_text() == dumps_instance(inst) + "\n"


BUNDLED = {
    "bf_demo": lambda: bellman_ford_doc(weighted_graph([0, 1, 2, 3], DEMO_EDGES), 0),
    "two_node": lambda: bellman_ford_doc(weighted_graph([0, 1], [(0, 1, 5)]), 0),
    "bf_line3": lambda: bellman_ford_doc(weighted_graph([0, 1, 2], LINE3_EDGES), 0),
    "carry_99_1": lambda: carry_doc([9, 9], [1, 0]),
    "sabotaged": sabotaged_doc,
    "naive_nat": lambda: {"version": 1, "algebra": "naive_nat_add"},
    "maxmax_demo": lambda: maxmax_doc(
        weighted_graph([0, 1, 2], [(0, 1, 0), (1, 2, 0), (2, 0, 0)]),
        [[3, BOT], [BOT, 1], [0, 0]],
        [[[0, -1], [BOT, 0]], [[-2, BOT], [0, -1]], [[BOT, BOT], [-1, -3]]]),
}


@pytest.mark.parametrize("name", sorted(BUNDLED))
def test_bundled_files_match_builders(name):
    text = resources.files("asyncmp").joinpath("data", f"{name}.json").read_text()
    assert text == dumps_instance(BUNDLED[name]()) + "\n"
    json.loads(text)


def test_confluence_report_shape(demo_graph):
    rep = confluence_check(make_bellman_ford(demo_graph, 0), seeds=range(5))
    d = rep.to_dict()
    assert d["passed"] and d["distinct_finals"] == 1 and d["oracle_match"]
    assert len(d["runs"]) == 7
    assert {r["policy"] for r in d["runs"]} == {"random", "fifo", "synchronous"}


def test_confluence_parallel_equals_serial(demo_graph):
    inst = make_bellman_ford(demo_graph, 0)
    a = confluence_check(inst, seeds=range(10)).to_dict()
    b = confluence_check(inst, seeds=range(10), workers=4).to_dict()
    assert a == b


def test_confluence_sabotaged_disagrees():
    rep = confluence_check(make_sabotaged(), seeds=range(50))
    assert len(rep.distinct) >= 2 and not rep.passed
