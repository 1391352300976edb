"""Partial values as explicit step systems, and ℕ∞ bit sequences.

A :class:`DelayVal` is a state plus a step function. Stepping either finishes
with a value or yields the next state. Nothing here ever loops unboundedly:
every observation takes a fuel budget, and each call of a step function costs
one unit of fuel. So ``now(v)`` is observed after 1 step and
``delay(delay(now(v)))`` after 3.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any, Callable, Optional, Union

StepResult = tuple[bool, Any]  # (True, value) finishes, (False, state) continues


@dataclass(frozen=True)
class DelayVal:
    init: Any
    step: Callable[[Any], StepResult]


@dataclass(frozen=True)
class Halted:
    value: int
    steps: int


@dataclass(frozen=True)
class Pending:
    fuel_spent: int


@dataclass(frozen=True)
class Malformed:
    """Returned instead of running when a code does not denote a machine."""

    reason: str


Outcome = Union[Halted, Pending]


class Bisim(enum.Enum):
    BISIMILAR = "Bisimilar"
    DISTINGUISHED = "Distinguished"
    UNKNOWN = "Unknown"

    def __str__(self) -> str:
        return self.value


def _check_fuel(fuel: int) -> None:
    if not isinstance(fuel, int) or isinstance(fuel, bool) or fuel < 0:
        raise ValueError(f"fuel must be a natural number, got {fuel!r}")


def now(value: int) -> DelayVal:
    return DelayVal(None, lambda _s: (True, value))


def delay(d: DelayVal) -> DelayVal:
    def step(s):
        if s[0] == 0:
            return False, (1, s[1])
        done, out = d.step(s[1])
        return (True, out) if done else (False, (1, out))

    return DelayVal((0, d.init), step)


def bottom() -> DelayVal:
    return DelayVal(0, lambda s: (False, s))


def force(d: DelayVal, fuel: int) -> Outcome:
    _check_fuel(fuel)
    s = d.init
    for k in range(1, fuel + 1):
        done, out = d.step(s)
        if done:
            return Halted(out, k)
        s = out
    return Pending(fuel)


def bind(f: Callable[[int], DelayVal], d: DelayVal) -> DelayVal:
    """Kleisli extension. Steps to finish = steps of ``d`` + steps of ``f(v)``."""

    def step(s):
        if s[0] == "L":
            done, out = d.step(s[1])
            if not done:
                return False, ("L", out)
            nxt = f(out)
            return False, ("R", nxt, nxt.init)
        _, inner, st = s
        done, out = inner.step(st)
        return (True, out) if done else (False, ("R", inner, out))

    return DelayVal(("L", d.init), step)


def fmap(f: Callable[[int], int], d: DelayVal) -> DelayVal:
    def step(s):
        done, out = d.step(s)
        return (True, f(out)) if done else (False, out)

    return DelayVal(d.init, step)


def mu(f: Callable[[int], DelayVal]) -> DelayVal:
    """Least ``k`` with ``f(k)`` finishing at 0, forcing ``f(0), f(1), ...`` in order."""

    def step(s):
        k, dk, st = s
        done, out = dk.step(st)
        if not done:
            return False, (k, dk, out)
        if out == 0:
            return True, k
        nxt = f(k + 1)
        return False, (k + 1, nxt, nxt.init)

    d0 = f(0)
    return DelayVal((0, d0, d0.init), step)


def bisim(d1: DelayVal, d2: DelayVal, fuel: int) -> Bisim:
    """Compare final values only; step counts may differ."""
    a, b = force(d1, fuel), force(d2, fuel)
    if isinstance(a, Halted) and isinstance(b, Halted):
        return Bisim.BISIMILAR if a.value == b.value else Bisim.DISTINGUISHED
    return Bisim.UNKNOWN


# -- ℕ∞ -------------------------------------------------------------------------

class NotAtMostOneError(ValueError):
    """A bit sequence had a second 1."""


@dataclass
class BitSeq:
    """A decreasing-style sequence in ℕ∞, presented as bits with at most one 1.

    ``n̄`` has its single 1 at index ``n``; ``∞`` is all zeros. The at-most-one
    invariant is checked on every access.
    """

    gen: Callable[[int], int]
    probed_bound: int = 0
    _one_at: Optional[int] = field(default=None, repr=False)
    _cache: dict = field(default_factory=dict, repr=False)

    def bit(self, i: int) -> int:
        if i < 0:
            raise IndexError("bit indices are natural numbers")
        if i in self._cache:
            return self._cache[i]
        b = self.gen(i)
        if b not in (0, 1):
            raise ValueError(f"bit {i} is {b}, not 0 or 1")
        if b == 1:
            if self._one_at is not None and self._one_at != i:
                raise NotAtMostOneError(f"ones at indices {self._one_at} and {i}")
            self._one_at = i
        self._cache[i] = b
        self.probed_bound = max(self.probed_bound, i + 1)
        return b

    def prefix(self, n: int) -> list[int]:
        return [self.bit(i) for i in range(n)]

    def format_prefix(self, n: int) -> str:
        """The first ``n`` bits as ``0,0,1,0``."""
        return ",".join(map(str, self.prefix(n)))

    def probe(self, n: int) -> "BitSeq":
        """Read the first ``n`` bits, validating the invariant on them."""
        self.prefix(n)
        return self

    def witness(self, bound: int) -> Optional[int]:
        """Index of the 1 among the first ``bound`` bits, if any."""
        for i in range(bound):
            if self.bit(i):
                return i
        return None

    def __getitem__(self, i: int) -> int:
        return self.bit(i)


def nat_inf_of(n: int) -> BitSeq:
    return BitSeq(lambda i: 1 if i == n else 0)


def infinity() -> BitSeq:
    return BitSeq(lambda i: 0)


def truncate(raw: Callable[[int], int]) -> BitSeq:
    """Keep only the first 1 of an arbitrary 0/1 sequence."""
    first: list[Optional[int]] = [None]
    scanned = [0]

    def gen(i: int) -> int:
        while first[0] is None and scanned[0] <= i:
            if raw(scanned[0]):
                first[0] = scanned[0]
            scanned[0] += 1
        return 1 if first[0] == i else 0

    return BitSeq(gen)


def cond_add(alpha: BitSeq, beta: Callable[[int], BitSeq]) -> BitSeq:
    """Bit ``n`` of the raw sum is 1 iff some ``k <= n`` has ``alpha_k = 1`` and
    some ``j <= n`` has ``beta(k)_j = 1``; the result is its truncation.

    The sum is finite exactly when both ``alpha`` and ``beta(k)`` are.
    """

    def raw(n: int) -> int:
        k = alpha.witness(n + 1)
        if k is None:
            return 0
        return 1 if beta(k).witness(n + 1) is not None else 0

    return truncate(raw)


def to_delay(alpha: BitSeq) -> DelayVal:
    """The partial unit: finishes with 0 one step after ``alpha``'s 1."""

    def step(i):
        return (True, 0) if alpha.bit(i) else (False, i + 1)

    return DelayVal(0, step)
