"""Shortest paths with messages delivered in any order.

Distances are stored negated so that "better" means "larger" and nodes
combine messages with max. Whatever order the scheduler picks, the final
distances are the same.
"""
import random

from asyncmp import SchedulePolicy, confluence_check, make_bellman_ford, run, synchronous_run, weighted_graph
from asyncmp.instances import random_weighted_graph

g = weighted_graph([0, 1, 2, 3], [(0, 1, 4), (0, 2, 1), (2, 1, 2), (1, 3, 1), (2, 3, 5)])
inst = make_bellman_ford(g, source=0)

for policy in (SchedulePolicy("fifo"), SchedulePolicy("random", seed=1), SchedulePolicy("random", seed=2)):
    res = run(inst, policy)
    print(f"{policy.kind:>6} seed={policy.seed}: {inst.decode(res.states)} after {res.steps} events")

# The layer-by-layer version needs three rounds on this graph.
for rounds in range(5):
    print("synchronous rounds", rounds, inst.decode(synchronous_run(inst, rounds)))

report = confluence_check(inst, seeds=range(50))
print("distinct finals over 52 runs:", len(report.distinct), "matches oracle:", report.oracle_match)

# The same holds on random graphs.
rng = random.Random(0)
ok = all(confluence_check(make_bellman_ford(random_weighted_graph(rng), 0), seeds=range(20)).passed
         for _ in range(20))
print("20 random graphs confluent:", ok)
