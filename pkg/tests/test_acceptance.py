"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v``; the summary block at
the end of the session lists every criterion with its wall time.
"""
import random

import numpy as np

from asyncmp import catalog
from asyncmp.algebra import BOT, check_action, check_cocycle, naive_delta, replay, splitting_is_hom, star_action
from asyncmp.fabric import MessageFn, attention_coefficients, check_homomorphism
from asyncmp.instances import (
    confluence_check,
    digits_of,
    make_bellman_ford,
    make_carry_adder,
    make_maxmax_layer,
    make_sabotaged,
    random_weighted_graph,
)
from asyncmp.oracles import bellman_ford_distances
from asyncmp.scheduler import SchedulePolicy, Trace, enumerate_interleavings, run
from asyncmp import weighted_graph

from conftest import LINE3_EDGES


def test_c01_cocycle_bellman_ford(criterion):
    with criterion(1, "Bellman-Ford delta is a cocycle on {bot,0..20}", limit=1.0) as c:
        rep = check_cocycle(catalog.algebra("bellman_ford"))
        assert all(cv.mode == "exhaustive" for cv in rep.coverage)
        assoc = next(cv for cv in rep.coverage if len(cv.windows) == 3)
        assert assoc.checked == 22 ** 3
        assert rep.witnesses == []
        c.note(f"{assoc.checked} triples, 0 witnesses")


def test_c02_cocycle_carry(criterion):
    with criterion(2, "carry identity for m,n in [0,200], s in 0..9", limit=5.0) as c:
        count = 0
        for m in range(201):
            for n in range(201):
                for s in range(10):
                    assert (m + n + s) // 10 == (m + (n + s) % 10) // 10 + (n + s) // 10, (m, n, s)
                    count += 1
        assert count == 404_010
        rep = check_cocycle(catalog.algebra("carry"))
        assert rep.passed and max(cv.checked for cv in rep.coverage) == 404_010
        c.note(f"{count} triples exact; checker agrees")


def test_c03_idempotence_dichotomy(criterion):
    with criterion(3, "naive delta: idempotent pass, non-idempotent fail with witness") as c:
        for m in (catalog.max_bottom(), catalog.bool_or()):
            assert check_cocycle(naive_delta(m)).passed, m.name
        for m in (catalog.nat_add(0, 50), catalog.nat_mul(1, 20)):
            d = naive_delta(m)
            rep = check_cocycle(d)
            assert not rep.passed, m.name
            lhs, rhs = replay(d, rep.witnesses[0])
            assert lhs != rhs and (lhs, rhs) == (rep.witnesses[0].lhs, rep.witnesses[0].rhs)
            c.note(f"{m.name}: {rep.witnesses[0].inputs} gives {lhs} != {rhs}")


def test_c04_equivalent_verdicts(criterion):
    with criterion(4, "cocycle, star-action and splitting verdicts agree") as c:
        verdicts = {}
        for name in catalog.ALGEBRAS:
            d = catalog.algebra(name)
            v = (check_cocycle(d).passed, check_action(star_action(d)).passed, splitting_is_hom(d))
            assert len(set(v)) == 1, (name, v)
            verdicts[name] = v[0]
        assert len(verdicts) >= 6 and set(verdicts.values()) == {True, False}
        c.note(f"{len(verdicts)} functions, {sum(verdicts.values())} pass, "
               f"{len(verdicts) - sum(verdicts.values())} fail")


def test_c05_bellman_ford_confluence(criterion):
    with criterion(5, "Bellman-Ford confluence on 100 random graphs", limit=30.0) as c:
        rng = random.Random(2024)
        runs = 0
        for _ in range(100):
            g = random_weighted_graph(rng, n_max=8, m_max=20, w_max=10)
            source = rng.choice(g.nodes)
            inst = make_bellman_ford(g, source)
            rep = confluence_check(inst, ("random", "fifo", "synchronous"), range(50))
            assert rep.all_quiescent and len(rep.distinct) == 1
            edges = [(e.src, e.dst, e.payload["length"]) for e in g.edges]
            dist = bellman_ford_distances(g.nodes, edges, source)
            expected = [None if dist[u] == float("inf") else dist[u] for u in g.nodes]
            assert rep.decoded == [{"distances": expected}]
            runs += len(rep.runs)
        c.note(f"{runs} runs, 1 final per graph, all equal to the oracle")


def test_c06_exhaustive_interleavings(criterion):
    with criterion(6, "all interleavings on the 3-node line agree", limit=10.0) as c:
        inst = make_bellman_ford(weighted_graph([0, 1, 2], LINE3_EDGES), 0)
        rep = enumerate_interleavings(inst)
        assert rep.complete and rep.capped_runs == 0
        assert len(rep.finals) == 1
        (final,) = rep.finals
        assert inst.decode(dict(zip(inst.graph.nodes, final))) == inst.oracle()
        c.note(f"{rep.interleavings} interleavings over {rep.distinct_worlds} worlds")


def test_c07_non_homomorphism_breaks_confluence(criterion):
    with criterion(7, "mis-flagged non-homomorphic psi diverges") as c:
        inst = make_sabotaged()
        rep = confluence_check(inst, ("random",), range(50))
        assert len(rep.distinct) >= 2
        nat = catalog.nat_add()
        psi = MessageFn(inst.psi[0].fn, name="square")
        hom = check_homomorphism(psi, range(6), args=nat, msgs=nat)
        assert not hom.passed
        w = hom.witnesses[0]
        assert w.lhs != w.rhs
        c.note(f"{len(rep.distinct)} distinct finals; witness {w.inputs} gives {w.lhs} != {w.rhs}")


def test_c08_ripple_carry(criterion):
    with criterion(8, "1000 random additions x 5 schedules", limit=10.0) as c:
        rng = random.Random(99)
        for _ in range(1000):
            k = rng.randint(1, 12)
            x, y = rng.randrange(10 ** k), rng.randrange(10 ** k)
            inst = make_carry_adder(digits_of(x, k), digits_of(y, k))
            for _ in range(5):
                res = run(inst, SchedulePolicy("random", seed=rng.randrange(2 ** 32)), trace=False)
                assert res.status == "quiescent"
                out = inst.decode(res.states)
                got = sum(d * 10 ** i for i, d in enumerate(out["digits"])) + out["overflow"] * 10 ** k
                assert got == x + y, (x, y, out)
        c.note("5000 runs exact")


def test_c09_maxmax_matches_bellman_ford(criterion):
    with criterion(9, "width-1 max-max layer equals Bellman-Ford") as c:
        rng = random.Random(7)
        compared = 0
        for _ in range(20):
            g = random_weighted_graph(rng)
            source = rng.choice(g.nodes)
            bf = make_bellman_ford(g, source)
            feats = [[0] if u == source else [BOT] for u in g.nodes]
            mm = make_maxmax_layer(g, feats, [[[-e.payload["length"]]] for e in g.edges])
            assert bf.verified and mm.verified
            policies = [SchedulePolicy("synchronous")] + \
                [SchedulePolicy("random", seed=s) for s in range(10)]
            for p in policies:
                a, b = run(bf, p, trace=False), run(mm, p, trace=False)
                assert a.status == b.status == "quiescent"
                assert [a.states[u] for u in g.nodes] == [b.states[u][0] for u in g.nodes]
                compared += 1
        c.note(f"{compared} paired runs identical")


def test_c10_determinism_and_replay(criterion):
    with criterion(10, "equal seeds give equal traces; replay is exact") as c:
        rng = random.Random(5)
        instances = [make_bellman_ford(random_weighted_graph(rng), 0) for _ in range(10)]
        instances.append(make_carry_adder(digits_of(98765, 6), digits_of(43210, 6)))
        g = weighted_graph([0, 1, 2], [(0, 1, 0), (1, 2, 0), (2, 0, 0)])
        instances.append(make_maxmax_layer(g, [[3, BOT], [BOT, 1], [0, 0]],
                                           [[[0, -1], [BOT, 0]], [[-2, BOT], [0, -1]], [[BOT, BOT], [-1, -3]]]))
        checked = 0
        for inst in instances:
            for seed in range(5):
                t1 = run(inst, SchedulePolicy("random", seed=seed)).trace.to_jsonl()
                t2 = run(inst, SchedulePolicy("random", seed=seed)).trace.to_jsonl()
                assert t1 == t2
                script = Trace.from_jsonl(t1).script()
                t3 = run(inst, SchedulePolicy("scripted", script=script)).trace.to_jsonl()
                assert t1.splitlines()[1:] == t3.splitlines()[1:]
                checked += 1
        c.note(f"{checked} traces reproduced byte for byte")


def test_c11_attention_softmax(criterion):
    with criterion(11, "attention coefficients normalise") as c:
        gen = np.random.default_rng(11)
        worst = 0.0
        for _ in range(1000):
            n, dim = gen.integers(1, 21), gen.integers(1, 17)
            q = gen.normal(scale=3.0, size=dim)
            keys = gen.normal(scale=3.0, size=(n, dim))
            worst = max(worst, abs(attention_coefficients(q, keys).sum() - 1.0))
        assert worst <= 1e-12
        assert abs(attention_coefficients([0.5, -2.0], [[4.0, 1.0]])[0] - 1.0) <= 1e-12
        for n in (2, 3, 7, 16):
            a = attention_coefficients(gen.normal(size=4), np.tile(gen.normal(size=4), (n, 1)))
            assert np.max(np.abs(a - 1.0 / n)) <= 1e-12
        c.note(f"max |sum - 1| = {worst:.1e}")
