"""Computability with primitive recursive combinators and recursive machines.

A recursive machine is a pair of unary primitive recursive functions, an
initializer and a step function whose output says "continue" or "halt".
Partial computable functions are exactly what such machines compute. The
package builds the combinators, runs machines with explicit fuel, codes
everything as natural numbers, and derives the classical theorems
(normal form, S-m-n, recursion theorems, undecidability of halting) as
executable constructions.
"""

from .combinator import (ArityError, Comb, MalformedComb, ResourceExhausted, C, P, S, comp, evaluate,
                         parse_comb, rec, show)
from .godel import bracket, decode_comb, decode_machine, encode_comb, encode_machine, kleene_t, kleene_u, \
    produce_witness
from .machine import Machine, botM, compose, eval_machine, machine_mu, machine_of_comb, succM
from .partiality import Bisim, BitSeq, Halted, Malformed, Pending

__version__ = "0.1.0"
