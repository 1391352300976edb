"""Recursively enumerable sets and the bridge between machines and ℕ∞.

A set is presented by a machine in one of two ways: as the inputs on which it
halts (its domain) or as the values it halts with (its range). The
conversions below turn one presentation into the other, race an enumeration
against its complement to decide membership, and translate halting into
bit sequences with at most one 1 and back.

Bit convention: a sequence "hits" when it contains a 1, so searches look for
the value 1 in both directions.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

from .combinator import DEFAULT_METER, Comb, S, evaluate
from .dsl import if_, lam, let_
from .machine import Machine, eval_machine, machine_mu, machine_of_comb, run_comb
from .partiality import BitSeq, Halted, Outcome, truncate
from .stdlib import div2, eq, fstC, inl, inr, mod2, mul, pairC, pred, snbar, sndC


class Mode(enum.Enum):
    DOMAIN = "Domain"
    RANGE = "Range"


@dataclass(frozen=True)
class REPresentation:
    """The set ``{x : m(x) halts}`` (domain mode) or ``{y : some m(x) halts with y}`` (range mode)."""

    machine: Machine
    mode: Mode

    def semidecider(self) -> Machine:
        """A machine halting exactly on the members."""
        return self.machine if self.mode is Mode.DOMAIN else range_to_domain(self.machine)

    def enumerator(self) -> Machine:
        """A machine whose range is the set."""
        return self.machine if self.mode is Mode.RANGE else domain_to_range(self.machine)

    def contains(self, x: int, fuel: int, *, meter: int = DEFAULT_METER) -> Outcome:
        return eval_machine(self.semidecider(), x, fuel, meter=meter)


# -- domain and range ---------------------------------------------------------------

def domain_to_range(m: Machine) -> Machine:
    """Run ``m`` on ``x`` while remembering ``x``; on halting, output ``x`` instead.

    State ``<x, c>`` with ``c`` the state of ``m``. Steps match ``m`` one for one.
    """
    init = lam(1, lambda x: pairC(x, m.init(x)))
    step = lam(1, lambda st: let_(m.step(sndC(st)), lambda q: if_(
        mod2(q), inr(fstC(st)), inl(pairC(fstC(st), div2(q))))))
    return Machine(init, step)


def _hits(m: Machine) -> Comb:
    """``<x, z> -> [run_k(m, y) = inr x]`` for ``z = <k, y>``."""
    run = run_comb(m)
    return lam(1, lambda p: let_(sndC(p), lambda z: eq(run(fstC(z), sndC(z)), inr(fstC(p)))))


def range_to_domain(m: Machine) -> Machine:
    """Halts on ``x`` exactly when ``m`` outputs ``x`` somewhere.

    Searches ``z = 0, 1, ...`` for ``z = <k, y>`` with ``run_k(m, y) = inr x``;
    the output is that ``z``.
    """
    return machine_mu(machine_of_comb(_hits(m)))


def re_and_core_to_rec(m_a: Machine, m_co: Machine) -> Machine:
    """Decide membership given enumerations of a set and of its complement.

    Both enumerations are scanned together over ``z = <k, y>``. The first ``z``
    at which either produces ``x`` settles the answer: 1 for ``m_a``, 0 for
    ``m_co``. If both produce ``x`` at the same ``z``, ``m_a`` wins.
    """
    in_a, in_co = _hits(m_a), _hits(m_co)
    init = lam(1, lambda x: pairC(x, 0))
    step = lam(1, lambda st: if_(
        in_a(st), inr(1),
        if_(in_co(st), inr(0), inl(pairC(fstC(st), S(sndC(st)))))))
    return Machine(init, step)


def partial_range_to_total_pr(m: Machine, a: int) -> Comb:
    """A total unary combinator with the same range as ``m``, given a member ``a``.

    ``<y, k> -> x`` when ``run_k(m, y) = inr x``, and ``a`` otherwise.
    """
    if not isinstance(a, int) or a < 0:
        raise ValueError("the fallback value must be a natural number")
    run = run_comb(m)
    return lam(1, lambda z: let_(run(sndC(z), fstC(z)), lambda r: if_(mod2(r), div2(r), a)))


# -- Rosolini propositions --------------------------------------------------------------

class _Trajectory:
    """``run_k(m, x)`` for growing ``k``, computed once per step."""

    def __init__(self, m: Machine, x: int, meter: int):
        self.m, self.meter = m, meter
        self.codes = [2 * evaluate(m.init, (x,), meter=meter)]

    def at(self, k: int) -> int:
        while len(self.codes) <= k:
            last = self.codes[-1]
            self.codes.append(last if last & 1 else evaluate(self.m.step, (last >> 1,), meter=self.meter))
        return self.codes[k]


def machine_to_rosolini(m: Machine, x: int, *, meter: int = DEFAULT_METER) -> BitSeq:
    """Bit ``k`` is 1 iff ``run_k(m, x)`` is the first halted configuration."""
    traj = _Trajectory(m, x, meter)
    return truncate(lambda k: traj.at(k) & 1)


def rosolini_witness(m: Machine, x: int, bound: int, *, meter: int = DEFAULT_METER) -> Optional[int]:
    return machine_to_rosolini(m, x, meter=meter).witness(bound)


def machine_to_semidecision(m: Machine, x: int) -> Machine:
    """A one-step total machine computing bit ``k`` of :func:`machine_to_rosolini`.

    ``bit(k) = halted(run_k) * not halted(run_{k-1})``, with ``run_{-1}`` taken
    as running.
    """
    run = run_comb(m)
    bit = lam(1, lambda k: mul(mod2(run(k, x)), if_(k, snbar(mod2(run(pred(k), x))), 1)))
    return machine_of_comb(bit)


def rosolini_to_machine(alpha: Machine) -> Machine:
    """Halts (on any input) iff ``alpha`` outputs 1 somewhere; the output is that index.

    ``alpha`` must be total with values in {0, 1}. Each index costs the steps
    ``alpha`` takes on it.
    """
    probe = Machine(lam(1, lambda p: alpha.init(sndC(p))), alpha.step)
    return machine_mu(probe)


def halts_within(m: Machine, x: int, fuel: int, *, meter: int = DEFAULT_METER) -> bool:
    return isinstance(eval_machine(m, x, fuel, meter=meter), Halted)


__all__ = [
    "Mode", "REPresentation", "domain_to_range", "range_to_domain", "re_and_core_to_rec",
    "partial_range_to_total_pr", "machine_to_rosolini", "rosolini_witness",
    "machine_to_semidecision", "rosolini_to_machine", "halts_within",
]
