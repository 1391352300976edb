"""Numbers that stand for other things.

Everything in the library is a natural number in disguise: pairs, lists,
programs and whole computations. This walk-through builds each disguise and
takes it apart again.
"""

from kleene import godel
from kleene import natnum as nn
from kleene import stdlib as L
from kleene.combinator import evaluate, parse_comb, show

# Cantor pairing packs two numbers into one, and unpair gets them back.
z = nn.pair(3, 4)
print(f"pair(3, 4) = {z}, unpair({z}) = {nn.unpair(z)}")

# Lists of any length get a single self-delimiting code.
code = nn.seq_encode([5, 0, 2])
print(f"seq_encode([5, 0, 2]) = {code}, decodes to {nn.seq_decode(code)}")

# The beta function reads list entries out of one number with arithmetic only.
b = nn.beta_encode([7, 1, 4])
print(f"beta code of [7, 1, 4] is {b}; entries {[nn.beta(b, i) for i in range(3)]}")

# Programs are numbers too. Parse a combinator, run it, then encode it.
twice_succ = parse_comb("(comp S [S])")
print(f"{show(twice_succ)} on 3 gives {evaluate(twice_succ, (3,))}")
print(f"its code is {godel.encode_comb(twice_succ)}")
print(f"the library's add has code {godel.encode_comb(L.add)}")
assert godel.decode_comb(godel.encode_comb(L.add)) is L.add  # codes round-trip to the very same node
