"""Which argument functions survive asynchrony?

A node that receives messages m then n must emit, in total, the same
arguments as if it had received the single combined message n.m. This
script runs the law checker over a few argument functions and prints what
it finds.
"""
from asyncmp import catalog, check_cocycle, naive_delta, replay, star_act

# The shortest-path argument function only emits when a message improves
# the state. It satisfies the law on the whole window.
bf = catalog.algebra("bellman_ford")
report = check_cocycle(bf)
print("bellman_ford:", "pass" if report.passed else "FAIL", [c.checked for c in report.coverage])

# The "send what you received" rule works for max and OR, which are
# idempotent, and breaks for addition: two 1s sent one at a time add up to 3
# downstream instead of 2.
for m in (catalog.max_bottom(), catalog.bool_or(), catalog.nat_add(0, 50)):
    d = naive_delta(m)
    rep = check_cocycle(d)
    line = f"naive delta on {m.name}: {'pass' if rep.passed else 'fail'}"
    if not rep.passed:
        w = rep.witnesses[0]
        line += f"  witness {w.inputs}: {replay(d, w)}"
    print(line)

# Carries in base-10 addition: adding 7 to a digit 5 leaves 2 and emits one carry.
carry = catalog.algebra("carry")
print("7 acting on (digit 5, no carries):", star_act(7, (5, 0), carry))
print("carry passes:", check_cocycle(carry).passed)
