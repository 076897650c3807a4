"""Ripple-carry addition where carries race each other.

Each digit node holds one digit of x; digits of y arrive as messages.
A node emits the number of carries its update produced, and the next node
treats them as more messages. Any delivery order gives the right sum.
"""
from asyncmp import SchedulePolicy, enumerate_interleavings, make_carry_adder, run
from asyncmp.instances import digits_of

x, y = 987654321, 123456789
k = 9
inst = make_carry_adder(digits_of(x, k), digits_of(y, k))
for seed in range(3):
    out = inst.decode(run(inst, SchedulePolicy("random", seed=seed)).states)
    total = sum(d * 10**i for i, d in enumerate(out["digits"])) + out["overflow"] * 10**k
    print(f"seed {seed}: {out}  ->  {total}  (expected {x + y})")

small = make_carry_adder([9, 9, 9], [1, 1, 1])
rep = enumerate_interleavings(small)
print(f"999 + 111: {rep.interleavings} orderings, finals {sorted(rep.finals)}")
