"""Machines: primitive recursive steps, iterated until they say stop.

A machine is an initial-state combinator and a step combinator. The step's
result is even to continue and odd to halt. The files in ``machines/`` use
the same text format as the ``kleene run`` command.
"""

from pathlib import Path

from kleene.machine import as_delay, compose, eval_machine, parse_machine, zoo
from kleene.partiality import bind, bisim

HERE = Path(__file__).parent / "machines"
succ = parse_machine((HERE / "succ.pm").read_text())
bot = parse_machine((HERE / "bot.pm").read_text())

print("succ on 3:", eval_machine(succ, 3, 100))
print("bot on 3, 100 steps of fuel:", eval_machine(bot, 3, 100))  # never halts, so fuel runs out

# Composition runs one machine and feeds its answer to the next; step counts add.
twice = compose(succ, succ)
print("succ; succ on 3:", eval_machine(twice, 3, 100))

# The same composite as a bind of delayed values. Only the answers are compared.
countdown = zoo()["countdown"]
for x in range(4):
    glued = compose(countdown, succ)
    chained = bind(lambda v: as_delay(succ, v), as_delay(countdown, x))
    print(f"countdown; succ on {x}: {eval_machine(glued, x, 1000)}, bisim with bind: "
          f"{bisim(as_delay(glued, x), chained, 1000).name}")
