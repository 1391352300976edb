"""Where computation runs out: halting, partial evaluation, and Rosolini bits.

The refuter takes a candidate halting decider ``h`` and builds the diagonal
machine that does the opposite of what ``h`` predicts about it. The evidence
it returns can be replayed. S-m-n specializes a two-argument program to one
argument. A run that may or may not halt becomes a bit sequence with at most
one 1.
"""

from kleene import godel
from kleene import natnum as nn
from kleene import rectheory as R
from kleene import universal as U
from kleene.machine import botM, const_machine, machine_of_comb, succM
from kleene.stdlib import add, to_unary

for label, h in [("always 0", const_machine(0)), ("never halts", botM), ("always 1", const_machine(1))]:
    report = U.halting_refuter(h, 2000)
    v = report.verdict
    why = v.reason if report.refuted else f"no contradiction within {v.fuel} steps"
    print(f"h = {label}: {type(v).__name__}, {why}; replay ok: {U.replay(report, h)}")

adder = godel.encode_machine(machine_of_comb(to_unary(add)))
plus2 = U.smn(adder, 2)
print("specialized adder on 5:", godel.bracket(plus2, 5, 10**4).value, "; original on <2, 5>:",
      godel.bracket(adder, nn.pair(2, 5), 10**4).value)

bits = R.machine_to_rosolini(succM, 3)
print("succ on 3 as a bit sequence:", bits.prefix(6), "witness index", bits.witness(10))
print("bot as a bit sequence:", R.machine_to_rosolini(botM, 0).prefix(6))
