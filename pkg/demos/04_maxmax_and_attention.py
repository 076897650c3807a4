"""Tropical message functions and why attention has to wait.

Edges apply a max-plus matrix to the sender's argument. These maps respect
max, so partial arguments can be sent early. A width-1 layer with weights
-w reproduces Bellman-Ford.

Softmax attention is different: every coefficient depends on all keys at
once, so it can only run as a blocking message function.
"""
import numpy as np

from asyncmp import BOT, SchedulePolicy, make_bellman_ford, make_maxmax_layer, run, synchronous_run, weighted_graph
from asyncmp import attention_coefficients, tropical_apply, TropicalMatrix

print("W x =", tropical_apply(TropicalMatrix([[0, BOT], [1, 2]]), [3, 4]))

g = weighted_graph([0, 1, 2], [(0, 1, 0), (1, 2, 0), (2, 0, 0)])
mm = make_maxmax_layer(g, [[3, BOT], [BOT, 1], [0, 0]],
                       [[[0, -1], [BOT, 0]], [[-2, BOT], [0, -1]], [[BOT, BOT], [-1, -3]]])
print("one layer:      ", mm.decode(synchronous_run(mm, 1)))
print("to fixed point: ", mm.decode(synchronous_run(mm)))
print("asynchronous:   ", mm.decode(run(mm, SchedulePolicy("random", seed=3)).states))

line = weighted_graph([0, 1, 2], [(0, 1, 2), (1, 2, 3), (0, 2, 7)])
bf = make_bellman_ford(line, 0)
mm1 = make_maxmax_layer(line, [[0], [BOT], [BOT]], [[[-e.payload["length"]]] for e in line.edges])
print("Bellman-Ford:", bf.decode(run(bf, SchedulePolicy()).states)["distances"],
      " width-1 layer:", [-v[0] for v in run(mm1, SchedulePolicy()).states.values()])

q = np.array([1.0, -0.5])
keys = np.array([[0.2, 0.1], [1.5, -1.0], [-0.3, 0.4]])
alpha = attention_coefficients(q, keys)
print("attention:", np.round(alpha, 4), "sum", alpha.sum())
