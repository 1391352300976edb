"""Every halting run leaves a checkable receipt.

``produce_witness`` records a run of a machine as an evaluation tree, a single
number. ``kleene_t`` checks such a receipt with bounded work, and
``kleene_u`` reads the answer off its root. Changing any bit of the root
label makes the receipt invalid.
"""

from kleene import godel
from kleene import natnum as nn
from kleene.machine import zoo

m = zoo()["countdown"]
e = godel.encode_machine(m)
x = 3
print("bracket:", godel.bracket(e, x, 1000))

w = godel.produce_witness(e, x, 1000)
k, tree = nn.unpair(w)
print(f"witness: {k} steps, tree code of {tree.bit_length()} bits")
print("T accepts:", godel.kleene_t(e, x, w), "and U reads", godel.kleene_u(w))

# The root label sits in the leading bits of the tree code. Flip one of them.
top = (tree + 1).bit_length() - 1
forged = nn.pair(k, ((tree + 1) ^ (1 << (top - 3))) - 1)
print("a receipt with one root bit flipped is accepted:", godel.kleene_t(e, x, forged))
print("the same receipt for input 4 is accepted:", godel.kleene_t(e, 4, w))
