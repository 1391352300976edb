"""Recursive machines: a unary ``init`` and a unary ``step`` combinator.

``step`` outputs a sum code: even ``2n`` means "continue in state ``n``", odd
``2y + 1`` means "halt with ``y``". All constructions below are ordinary
combinators built with the DSL, so every derived machine is again a pair of
primitive recursive functions.

State codings used by the constructions (all pinned):

* composition ``m; n``: state ``2k`` runs ``m`` in ``k``, ``2k+1`` runs ``n`` in ``k``
* case analysis on a machine predicate: ``2<x,c>`` runs the predicate,
  ``4b+1`` runs the first branch, ``4b+3`` the second
* minimization: ``<x, y, c>`` with ``c`` the predicate state on ``<x, y>``
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence, Union

from . import natnum as nn
from .combinator import (DEFAULT_METER, ArityError, Comb, Comp, Const, MalformedComb, Proj,
                         S, evaluate, parse_comb, show)
from .dsl import if_, lam, let_
from .partiality import DelayVal, Halted, Pending
from .stdlib import (add, betaC, div, div2, double, eq, fstC, inl, inr, le, mod2, mul, pairC,
                     pred, sndC, to_unary, tupleC)


@dataclass(frozen=True)
class Machine:
    init: Comb
    step: Comb

    def __post_init__(self):
        if self.init.arity != 1 or self.step.arity != 1:
            raise ArityError("machine components must be unary combinators")


Outcome = Union[Halted, Pending]


# -- running -------------------------------------------------------------------

def lifted_step(m: Machine) -> Comb:
    """The step extended to sum codes, fixing halted values: ``inr y -> inr y``."""
    return lam(1, lambda n: if_(mod2(n), n, m.step(div2(n))))


def run_comb(m: Machine) -> Comb:
    """Binary combinator ``(k, y) -> run_k(m, y)`` as a sum code."""
    return lam(2, lambda k, y: _run_loop(m, k, y))


def _run_loop(m: Machine, k, y):
    from .dsl import loop

    s = lifted_step(m)
    return loop(k, inl(m.init(y)), lambda i, acc: s(acc))


def run_k(m: Machine, x: int, k: int, *, meter: int = DEFAULT_METER) -> nn.Inl | nn.Inr:
    v = 2 * evaluate(m.init, (x,), meter=meter)
    for _ in range(k):
        if v & 1:
            break
        v = evaluate(m.step, (v >> 1,), meter=meter)
    return nn.sum_case(v)


def eval_machine(m: Machine, x: int, fuel: int, *, meter: int = DEFAULT_METER) -> Outcome:
    """Halted(y, k) for the least ``k <= fuel`` with ``run_k = inr y``, else Pending."""
    if fuel < 0:
        raise ValueError("fuel must be a natural number")
    state = evaluate(m.init, (x,), meter=meter)
    for k in range(1, fuel + 1):
        r = evaluate(m.step, (state,), meter=meter)
        if r & 1:
            return Halted(r >> 1, k)
        state = r >> 1
    return Pending(fuel)


def as_delay(m: Machine, x: int, *, meter: int = DEFAULT_METER) -> DelayVal:
    """The same step system as a delayed value; step ``k`` of the delay is machine step ``k``."""

    def step(s):
        st = evaluate(m.init, (x,), meter=meter) if s is None else s
        r = evaluate(m.step, (st,), meter=meter)
        return (True, r >> 1) if r & 1 else (False, r >> 1)

    return DelayVal(None, step)


# -- basic machines ----------------------------------------------------------------

def machine_of_comb(c: Comb) -> Machine:
    """One-step machine computing the total function ``c``."""
    if c.arity != 1:
        raise ArityError("machine_of_comb needs a unary combinator")
    return Machine(c, inr)


succM = Machine(Proj(1, 0), Comp(inr, [S]))
botM = Machine(Proj(1, 0), inl)


def const_machine(k: int) -> Machine:
    return machine_of_comb(Const(1, k))


const0M = const_machine(0)


def postcompose(m: Machine, c: Comb) -> Machine:
    """``c`` applied to ``m``'s result, in the same number of steps."""
    return Machine(m.init, lam(1, lambda st: let_(m.step(st), lambda r: if_(mod2(r), inr(c(div2(r))), r))))


# -- composition -------------------------------------------------------------------

def compose(m: Machine, n: Machine) -> Machine:
    """``m; n``: run ``m``, feed its result to ``n``. Steps add up."""
    init = lam(1, lambda x: double(m.init(x)))
    step = lam(1, lambda st: if_(
        mod2(st),
        let_(n.step(div2(st)), lambda r: if_(mod2(r), r, add(2, double(r)))),
        let_(m.step(div2(st)), lambda r: if_(mod2(r), add(2, mul(4, n.init(div2(r)))), double(r)))))
    return Machine(init, step)


# -- case analysis -----------------------------------------------------------------

def machine_case(r: Comb | Machine, m1: Machine, m2: Machine) -> Machine:
    """Behave as ``m1`` where ``r`` is 1 and as ``m2`` elsewhere.

    ``r`` may be a characteristic combinator (decided during ``init``) or a
    machine, in which case it is run first as a separate phase.
    """
    if isinstance(r, Machine):
        return _machine_case_general(r, m1, m2)
    if r.arity != 1:
        raise ArityError("case predicate must be unary")
    init = lam(1, lambda x: if_(eq(r(x), 1), double(m1.init(x)), inr(m2.init(x))))
    step = lam(1, lambda st: if_(
        mod2(st),
        let_(m2.step(div2(st)), lambda q: if_(mod2(q), q, add(2, double(q)))),
        let_(m1.step(div2(st)), lambda q: if_(mod2(q), q, double(q)))))
    return Machine(init, step)


def _machine_case_general(r: Machine, m1: Machine, m2: Machine) -> Machine:
    init = lam(1, lambda x: double(pairC(x, r.init(x))))

    def branches(st):
        b = div(st, 4)
        return if_(mod2(div2(st)),
                   let_(m2.step(b), lambda q: if_(mod2(q), q, add(6, mul(4, q)))),
                   let_(m1.step(b), lambda q: if_(mod2(q), q, add(2, mul(4, q)))))

    def predicate(st):
        return let_(div2(st), lambda xc: let_(fstC(xc), lambda x: let_(r.step(sndC(xc)), lambda q: if_(
            mod2(q),
            if_(eq(div2(q), 1), double(add(1, mul(4, m1.init(x)))), double(add(3, mul(4, m2.init(x))))),
            mul(4, pairC(x, div2(q)))))))

    return Machine(init, lam(1, lambda st: if_(mod2(st), branches(st), predicate(st))))


# -- minimization --------------------------------------------------------------------

def _triple(a, b, c):
    return pairC(a, pairC(b, c))


def machine_mu_then(r: Machine, post: Comb) -> Machine:
    """Search ``y = 0, 1, ...`` until ``r<x, y>`` finishes with 1, then emit ``post(x, y)``.

    One machine step advances ``r`` by one step; a finished 0 restarts ``r`` at
    ``<x, y+1>``.
    """
    if post.arity != 2:
        raise ArityError("post-processing combinator must be binary")
    init = lam(1, lambda x: _triple(x, 0, r.init(pairC(x, 0))))

    def step(st):
        return let_(fstC(st), lambda x: let_(fstC(sndC(st)), lambda y: let_(
            r.step(sndC(sndC(st))), lambda q: if_(
                mod2(q),
                if_(eq(div2(q), 1), inr(post(x, y)), inl(_triple(x, S(y), r.init(pairC(x, S(y)))))),
                inl(_triple(x, y, div2(q)))))))

    return Machine(init, lam(1, step))


def machine_mu(r: Machine) -> Machine:
    """``x -> mu y. r<x, y> = 1``."""
    return machine_mu_then(r, Proj(2, 1))


def _select(i, options: Sequence):
    out = options[-1]
    for j in range(len(options) - 2, -1, -1):
        out = if_(eq(i, j), options[j], out)
    return out


def _tuple5(a, b, c, d, e):
    return pairC(a, pairC(b, pairC(c, pairC(d, e))))


def _t5(st, i):
    for _ in range(i):
        st = sndC(st)
    return fstC(st) if i < 4 else st


def beta_recursion_predicate(f: Machine, g: Machine) -> Machine:
    """Machine deciding, on ``<<x, y>, z>``, whether ``z`` beta-codes the course of
    values ``h(x, 0..y)`` of ``h(x,0) = g(x)``, ``h(x,i+1) = f<x, i, h(x,i)>``."""
    init = lam(1, lambda n: let_(fstC(n), lambda inp: _tuple5(inp, sndC(n), 0, 0, g.init(fstC(inp)))))

    def finished(inp, z, i, phase, q):
        return let_(if_(phase, S(i), 0), lambda idx: if_(
            eq(div2(q), betaC(z, idx)),
            if_(eq(idx, sndC(inp)), inr(1),
                inl(_tuple5(inp, z, idx, 1, f.init(_triple(fstC(inp), idx, betaC(z, idx)))))),
            inr(0)))

    def step(st):
        def body(inp, z, i, phase, sub):
            return let_(if_(phase, f.step(sub), g.step(sub)), lambda q: if_(
                mod2(q), finished(inp, z, i, phase, q), inl(_tuple5(inp, z, i, phase, div2(q)))))

        return let_(_t5(st, 0), lambda inp: let_(_t5(st, 1), lambda z: let_(_t5(st, 2), lambda i: let_(
            _t5(st, 3), lambda phase: let_(_t5(st, 4), lambda sub: body(inp, z, i, phase, sub))))))

    return Machine(init, lam(1, step))


def machine_primrec(f: Machine, g: Machine) -> Machine:
    """``<x, y> -> h(x, y)`` with ``h(x,0) = g(x)``, ``h(x,i+1) = f<x, i, h(x,i)>``.

    Computed as ``beta(t, y)`` where ``t`` is the least beta-code of the whole
    course of values, found by minimization.
    """
    post = lam(2, lambda inp, z: betaC(z, sndC(inp)))
    return machine_mu_then(beta_recursion_predicate(f, g), post)


def machine_compose_kary(f: Machine, gs: Sequence[Machine]) -> Machine:
    """``x -> f<g0(x), ..., g_{k-1}(x)>``, collecting the inner results through beta."""
    gs = list(gs)
    k = len(gs)
    if k == 0:
        raise ValueError("need at least one inner machine")

    init = lam(1, lambda n: let_(fstC(n), lambda x: pairC(x, pairC(sndC(n), pairC(0, gs[0].init(x))))))

    def state(x, z, i, sub):
        return pairC(x, pairC(z, pairC(i, sub)))

    def finished(x, z, i, q):
        return if_(eq(div2(q), betaC(z, i)),
                   if_(eq(S(i), k), inr(1), inl(state(x, z, S(i), _select(S(i), [g.init(x) for g in gs])))),
                   inr(0))

    def body(x, z, i, sub):
        return let_(_select(i, [g.step(sub) for g in gs]), lambda q: if_(
            mod2(q), finished(x, z, i, q), inl(state(x, z, i, div2(q)))))

    def step(st):
        return let_(fstC(st), lambda x: let_(fstC(sndC(st)), lambda z: let_(
            fstC(sndC(sndC(st))), lambda i: let_(sndC(sndC(sndC(st))), lambda sub: body(x, z, i, sub)))))

    collect = tupleC(k)
    post = lam(2, lambda x, z: collect(*[betaC(z, j) for j in range(k)]))
    return compose(machine_mu_then(Machine(init, lam(1, step)), post), f)


# -- zoo -------------------------------------------------------------------------------

def countdown_machine() -> Machine:
    """Counts its input down to 0, then halts with 0 (x + 1 steps)."""
    return Machine(Proj(1, 0), lam(1, lambda n: if_(n, inl(pred(n)), inr(0))))


def triangle_machine() -> Machine:
    """Halts with ``0 + 1 + ... + x`` after ``x + 1`` steps (state ``<acc, n>``)."""
    init = lam(1, lambda x: pairC(0, x))
    step = lam(1, lambda st: let_(fstC(st), lambda acc: let_(sndC(st), lambda n: if_(
        n, inl(pairC(add(acc, n), pred(n))), inr(acc)))))
    return Machine(init, step)


def parity_gate_machine() -> Machine:
    """Halts (with x) exactly on even inputs; loops on odd ones."""
    return Machine(Proj(1, 0), lam(1, lambda n: if_(mod2(n), inl(n), inr(n))))


def sqrt_mu_machine() -> Machine:
    """``x -> least y with y*y >= x``, by minimization over a one-step predicate."""
    return machine_mu(machine_of_comb(to_unary(lam(2, lambda x, y: le(x, mul(y, y))))))


def zoo() -> dict[str, Machine]:
    """Named sample machines used in tests, demos and the CLI."""
    from .stdlib import div2 as half, double as dbl

    even = lam(1, lambda x: eq(mod2(x), 0))
    return {
        "succ": succM,
        "bot": botM,
        "const0": const0M,
        "const1": const_machine(1),
        "const7": const_machine(7),
        "id": machine_of_comb(Proj(1, 0)),
        "pred": machine_of_comb(pred),
        "double": machine_of_comb(dbl),
        "half": machine_of_comb(half),
        "succ_succ": compose(succM, succM),
        "const7_succ": compose(const_machine(7), succM),
        "succ_double": compose(succM, machine_of_comb(dbl)),
        "countdown": countdown_machine(),
        "triangle": triangle_machine(),
        "parity_gate": parity_gate_machine(),
        "case_even": machine_case(even, succM, const0M),
        "case_machine": machine_case(machine_of_comb(even), const_machine(1), succM),
        "sqrt_mu": sqrt_mu_machine(),
    }


# -- machine files ---------------------------------------------------------------------

def parse_machine(text: str) -> Machine:
    """Parse the two-line format ``init: <comb>`` / ``step: <comb>``."""
    fields: dict[str, Comb] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, body = line.partition(":")
        key = key.strip()
        if not sep or key not in ("init", "step"):
            raise MalformedComb(f"line {lineno}: expected 'init: <comb>' or 'step: <comb>'")
        if key in fields:
            raise MalformedComb(f"line {lineno}: duplicate '{key}' line")
        try:
            fields[key] = parse_comb(body)
        except MalformedComb as e:
            raise MalformedComb(f"line {lineno} ({key}): {e}") from None
    missing = [k for k in ("init", "step") if k not in fields]
    if missing:
        raise MalformedComb(f"missing '{missing[0]}' line")
    try:
        return Machine(fields["init"], fields["step"])
    except ArityError as e:
        raise MalformedComb(str(e)) from None


def format_machine(m: Machine) -> str:
    return f"init: {show(m.init)}\nstep: {show(m.step)}\n"


def machine_runner(m: Machine) -> Callable[[int, int], Outcome]:
    return lambda x, fuel: eval_machine(m, x, fuel)
