"""The arithmetized universal machine and what it buys: S-m-n, fixed points, the halting refuter.

Two tiers of universality live here. :func:`kleene.godel.bracket` decodes a
machine and runs it on the host. The machine :func:`build_universal` does the
same job as a machine: its state is a number, and every step applies one
primitive recursive combinator. The recursion theorems need the second tier,
because they feed the code of an interpreter to itself.

Interpreter states are sequence codes ``<flag, prog, frames>``. ``prog`` is a
combinator code, ``flag`` switches jet acceleration on, and ``frames`` is the
sequence of ``<offset, args, aux>`` frames of the small-step evaluator in
:mod:`kleene.combinator`. One application of the step interpreter is exactly
one small step.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Union

from . import natnum as nn
from .combinator import (DEFAULT_METER, Comb, Comp, Const, Frame, MalformedComb, Proj, StepState,
                         evaluate, flatten, stepwise_jets)
from .dsl import if_, lam, let_, loop
from .godel import bracket, decode_machine, encode_comb, encode_machine
from .machine import Machine, botM, const0M, eval_machine, machine_case, machine_of_comb
from .partiality import Halted, Malformed, Outcome, Pending
from .stdlib import (add, and_, code_match, code_parse, eq, fstC, inl, inr, le, lt, mod2, mul,
                     or_, pairC, seq_concat, seq_cons, seq_last, seq_len, seq_of, seq_pop, seq_proj, seq_single,
                     seq_snoc, seq_tail, sn, sndC, div2)
from .combinator import S

STUCK = 0  # inl 0: the next "state" is 0, which is not a state, so the run never finishes


class DivergenceError(RuntimeError):
    """A construction needed a value from a machine that did not halt within fuel."""


# -- interpreter states ---------------------------------------------------------------

def encode_interp(st: StepState) -> int:
    frames = [nn.seq_encode([f.offset, nn.seq_encode(f.args), nn.seq_encode(f.aux)]) for f in st.frames]
    return nn.seq_encode([int(st.accelerate), encode_comb(st.root), nn.seq_encode(frames)])


def decode_interp(c: int) -> Optional[StepState]:
    """The :class:`StepState` coded by ``c``, or ``None`` if ``c`` codes none."""
    from .combinator import node_offsets
    from .godel import decode_comb

    if not nn.is_seq(c):
        return None
    parts = nn.seq_decode(c)
    if len(parts) != 3 or parts[0] not in (0, 1) or not nn.is_seq(parts[2]):
        return None
    try:
        root = decode_comb(parts[1])
    except MalformedComb:
        return None
    offsets = node_offsets(root)
    frames = []
    for fc in nn.seq_decode(parts[2]):
        if not nn.is_seq(fc):
            return None
        fp = nn.seq_decode(fc)
        if len(fp) != 3 or fp[0] not in offsets or not (nn.is_seq(fp[1]) and nn.is_seq(fp[2])):
            return None
        frames.append(Frame(fp[0], nn.seq_decode(fp[1]), nn.seq_decode(fp[2])))
    if not frames:
        return None
    return StepState(root, tuple(frames), bool(parts[0]))


def init_interp_code(prog: int, x: int, accelerate: bool = True) -> int:
    """Interpreter state for a unary program code applied to ``x``."""
    frame = nn.seq_encode([0, nn.seq_encode([x]), 0])
    return nn.seq_encode([int(accelerate), prog, nn.seq_encode([frame])])


def _init_interp(prog, x):
    return seq_of(1, prog, seq_single(seq_of(0, seq_single(x), 0)))


# -- the step interpreter ------------------------------------------------------------------

def _jet_terms():
    table = stepwise_jets()
    codes = [encode_comb(j.comb) for j in table]
    if len(set(codes)) != len(codes):
        raise AssertionError("two jets share a combinator")
    return table, nn.seq_encode(codes)


def _deliver(flag, prog, rest, value):
    return let_(value, lambda v: _deliver_var(flag, prog, rest, v))


def _deliver_var(flag, prog, rest, v):
    def rebuilt(parent):
        return let_(seq_proj(parent, 2), lambda paux: let_(
            if_(eq(seq_proj(prog, seq_proj(parent, 0)), 3), seq_snoc(paux, v),
                if_(sn(seq_len(paux)), seq_of(S(seq_proj(paux, 0)), v), seq_of(0, v))), lambda aux: inl(
                seq_of(flag, prog, seq_snoc(seq_pop(rest), seq_of(seq_proj(parent, 0), seq_proj(parent, 1), aux))))))

    return if_(sn(seq_len(rest)), rebuilt(seq_last(rest)), inr(v))


def _step_body(c):
    table, codes = _jet_terms()

    def matched(prog, off):
        # 1 + index of the jet whose code sits at ``off``, or 0
        return loop(len(table), 0, lambda j, acc: add(mul(S(j), code_match(prog, off, seq_proj(codes, j))), acc))

    def jet_value(jm, args):
        return let_(seq_proj(args, 0), lambda a0: let_(seq_proj(args, 1), lambda a1: let_(
            seq_proj(args, 2), lambda a2: _jet_sum(jm, (a0, a1, a2)))))

    def _jet_sum(jm, xs):
        # a chain of conditionals with each call in "then" position: only the matched jet runs
        out = 0
        for j in range(len(table) - 1, -1, -1):
            jet = table[j]
            out = if_(eq(jm, j + 1), jet.comb(*xs[:jet.comb.arity]), out)
        return out

    def child_and_arity(prog, off, count):
        # offset of child number ``count`` of the node at ``off``, and the arity of its first child
        return loop(count, pairC(S(off), 0), lambda i, st: let_(code_parse(prog, fstC(st)), lambda r: pairC(
            fstC(r), if_(sn(i), sndC(st), sndC(r)))))

    def at_node(flag, prog, frames, rest, off, args, aux, tag):
        def decide(jm, nd, ca):
            is_val = or_(sn(jm), or_(le(tag, 2), and_(eq(tag, 4), and_(sn(nd), eq(seq_proj(aux, 0), seq_proj(args, 0))))))
            value = if_(sn(jm), jet_value(jm, args), let_(seq_proj(prog, add(off, 2)), lambda k: if_(
                eq(tag, 0), S(seq_proj(args, 0)), if_(eq(tag, 1), seq_proj(args, k), if_(eq(tag, 2), k, seq_proj(aux, 1))))))
            comp_frames = if_(lt(nd, sndC(ca)),
                              seq_snoc(frames, seq_of(fstC(ca), args, 0)),
                              seq_snoc(rest, seq_of(S(off), aux, 0)))
            rec_frames = seq_snoc(frames, if_(
                sn(nd), seq_of(S(off), seq_cons(seq_proj(aux, 0), seq_cons(seq_proj(aux, 1), seq_tail(args))), 0),
                seq_of(fstC(ca), seq_tail(args), 0)))
            return if_(is_val, _deliver(flag, prog, rest, value),
                       inl(seq_of(flag, prog, if_(eq(tag, 3), comp_frames, rec_frames))))

        return let_(if_(sn(flag), matched(prog, off), 0), lambda jm: let_(seq_len(aux), lambda nd: let_(
            child_and_arity(prog, off, if_(eq(tag, 3), S(nd), 1)), lambda ca: decide(jm, nd, ca))))

    def with_top(flag, prog, frames):
        return let_(seq_last(frames), lambda top: let_(seq_proj(top, 0), lambda off: let_(
            seq_proj(prog, off), lambda tag: if_(
                and_(eq(seq_len(top), 3), and_(lt(off, seq_len(prog)), le(tag, 4))),
                let_(seq_pop(frames), lambda rest: let_(seq_proj(top, 1), lambda args: let_(
                    seq_proj(top, 2), lambda aux: at_node(flag, prog, frames, rest, off, args, aux, tag)))),
                STUCK))))

    return let_(seq_proj(c, 0), lambda flag: let_(seq_proj(c, 1), lambda prog: let_(
        seq_proj(c, 2), lambda frames: if_(and_(eq(seq_len(c), 3), sn(seq_len(frames))),
                                           with_top(flag, prog, frames), STUCK))))


@lru_cache(maxsize=None)
def build_step_interpreter() -> Comb:
    """Unary combinator: interpreter state -> ``inl next`` or ``inr value``; junk -> ``STUCK``."""
    return lam(1, _step_body)


def interp_step(c: int, *, meter: int = DEFAULT_METER) -> int:
    return evaluate(build_step_interpreter(), (c,), meter=meter)


def drive_interp(c: int, max_steps: int, *, meter: int = DEFAULT_METER) -> tuple[Optional[int], int]:
    """Iterate the step interpreter: ``(value, steps)``, or ``(None, max_steps)`` if unfinished."""
    for k in range(1, max_steps + 1):
        r = interp_step(c, meter=meter)
        if r & 1:
            return r >> 1, k
        c = r >> 1
    return None, max_steps


# -- the universal machine -----------------------------------------------------------------
#
# State <phase, es, interp>: phase 0 runs the simulated init, phase 1 its step
# function; es is the code of the simulated step combinator.

@lru_cache(maxsize=None)
def build_universal() -> Machine:
    """Machine ``u`` with ``u<e, x> ~ {e}(x)`` (as partial values)."""
    stepI = build_step_interpreter()
    init = lam(1, lambda n: let_(fstC(n), lambda e: seq_of(0, sndC(e), _init_interp(fstC(e), sndC(n)))))

    def step(st):
        return let_(seq_proj(st, 0), lambda phase: let_(seq_proj(st, 1), lambda es: let_(
            stepI(seq_proj(st, 2)), lambda r: if_(
                mod2(r),
                let_(div2(r), lambda v: if_(and_(phase, mod2(v)), inr(div2(v)), inl(
                    seq_of(1, es, _init_interp(es, if_(phase, div2(v), v)))))),
                inl(seq_of(phase, es, div2(r)))))))

    return Machine(init, lam(1, step))


def universal_code() -> int:
    return encode_machine(build_universal())


# -- S-m-n ------------------------------------------------------------------------------------

def _prefix_code(c: Comb) -> int:
    return nn.seq_encode(flatten(c))


def smn(e: int, x: int) -> int:
    """Code of the machine ``y -> {e}<x, y>``: the init of ``e`` after ``y -> pair(x, y)``."""
    m = decode_machine(e)
    init = Comp(m.init, [Comp(pairC, [Const(1, x), Proj(1, 0)])])
    return encode_machine(Machine(init, m.step))


@lru_cache(maxsize=None)
def smn_comb() -> Comb:
    """Binary primitive recursive ``(e, x) -> smn(e, x)``, by splicing flat codes."""
    head = nn.seq_encode(flatten(Comp(pairC, [Const(1, 0), Proj(1, 0)]))[:-4])  # "<3> ++ pair ++ <2, 1>"
    tail = _prefix_code(Proj(1, 0))
    return lam(2, lambda e, x: pairC(
        seq_cons(3, seq_concat(fstC(e), seq_concat(head, seq_concat(seq_single(x), tail)))),
        sndC(e)))


def smn_fixed(e: int) -> Comb:
    """Unary ``x -> smn(e, x)``."""
    return Comp(smn_comb(), [Const(1, e), Proj(1, 0)])


# -- recursion theorems --------------------------------------------------------------------------

@lru_cache(maxsize=None)
def application_machine() -> Machine:
    """``<x, y> -> {{x}(x)}(y)``: two universal runs back to back.

    State ``<stage, y, ustate>``; stage 0 computes ``{x}(x)``, stage 1 applies the result to ``y``.
    """
    u = build_universal()
    init = lam(1, lambda n: let_(fstC(n), lambda x: seq_of(0, sndC(n), u.init(pairC(x, x)))))

    def step(st):
        return let_(seq_proj(st, 0), lambda stage: let_(seq_proj(st, 1), lambda y: let_(
            u.step(seq_proj(st, 2)), lambda q: if_(
                mod2(q),
                if_(stage, q, inl(seq_of(1, y, u.init(pairC(div2(q), y))))),
                inl(seq_of(stage, y, div2(q)))))))

    return Machine(init, lam(1, step))


def _probe(m: Machine, x: int, fuel: int, meter: int) -> int:
    out = eval_machine(m, x, fuel, meter=meter)
    if not isinstance(out, Halted):
        raise DivergenceError(f"code transformer did not halt within {fuel} steps (input of {x.bit_length()} bits)")
    return out.value


def rogers_fixed_point(f: Machine, *, fuel: int = 10**6, meter: int = DEFAULT_METER) -> int:
    """``n`` with ``{n} = {f(n)}``.

    With ``g<x, y> = {{x}(x)}(y)`` and ``h(x) = smn(code(g), x)``, take
    ``n = h(code(f . h))``: then ``{n}(y) = {{f.h}(f.h)}(y) = {f(h(code(f.h)))}(y) = {f(n)}(y)``.
    """
    eg = encode_machine(application_machine())
    h = machine_of_comb(smn_fixed(eg))
    from .machine import compose

    efh = encode_machine(compose(h, f))
    n = smn(eg, efh)
    _probe(f, n, fuel, meter)  # f must be total where the construction will call it
    return n


def kleene_srt(f: Machine, *, fuel: int = 10**6, meter: int = DEFAULT_METER) -> int:
    """``p`` with ``{p}(y) = f<p, y>``: Rogers applied to ``x -> smn(code(f), x)``."""
    return rogers_fixed_point(machine_of_comb(smn_fixed(encode_machine(f))), fuel=fuel, meter=meter)


# -- the halting refuter --------------------------------------------------------------------------

@dataclass(frozen=True)
class Evidence:
    """The cited computations: ``h`` on ``code`` and ``{code}(code)``, with their budgets."""

    code: int
    claimed: Outcome
    observed: Optional[Outcome]
    fuel: int


@dataclass(frozen=True)
class Refuted:
    reason: str
    evidence: Evidence


@dataclass(frozen=True)
class ConsistentWithinFuel:
    fuel: int
    evidence: Evidence


@dataclass(frozen=True)
class RefutationReport:
    target_code: int
    verdict: Union[Refuted, ConsistentWithinFuel]

    @property
    def refuted(self) -> bool:
        return isinstance(self.verdict, Refuted)


def diagonal_machine(h: Machine) -> Machine:
    """``d(x)`` diverges where ``h(x) = 1`` and is 0 elsewhere."""
    return machine_case(h, botM, const0M)


def halting_refuter(h: Machine, fuel: int, *, meter: int = DEFAULT_METER) -> RefutationReport:
    """Test the claim "``h(x) = 1`` iff ``{x}(x)`` halts" on the diagonal code of ``h``."""
    e = encode_machine(diagonal_machine(h))
    claim = eval_machine(h, e, fuel, meter=meter)
    if isinstance(claim, Pending):
        ev = Evidence(e, claim, None, fuel)
        return RefutationReport(e, Refuted("h is not total: no answer on the diagonal code", ev))
    if claim.value not in (0, 1):
        ev = Evidence(e, claim, None, fuel)
        return RefutationReport(e, Refuted(f"h is not 0/1-valued: answered {claim.value}", ev))
    run = bracket(e, e, fuel, meter=meter)
    ev = Evidence(e, claim, run, fuel)
    if isinstance(run, Halted):
        if claim.value == 1:
            raise AssertionError("diagonal machine halted on its 1-branch")
        return RefutationReport(e, Refuted("h says the diagonal run diverges, but it halts", ev))
    return RefutationReport(e, ConsistentWithinFuel(fuel, ev))


def replay(report: RefutationReport, h: Machine, *, meter: int = DEFAULT_METER) -> bool:
    """Re-run the cited computations and check that they reproduce the recorded outcomes."""
    ev = report.verdict.evidence
    if encode_machine(diagonal_machine(h)) != ev.code:
        return False
    if eval_machine(h, ev.code, ev.fuel, meter=meter) != ev.claimed:
        return False
    return ev.observed is None or bracket(ev.code, ev.code, ev.fuel, meter=meter) == ev.observed


__all__ = [
    "STUCK", "DivergenceError", "encode_interp", "decode_interp", "init_interp_code", "build_step_interpreter",
    "interp_step", "drive_interp", "build_universal", "universal_code", "smn", "smn_comb", "smn_fixed",
    "application_machine", "rogers_fixed_point", "kleene_srt", "Evidence", "Refuted", "ConsistentWithinFuel",
    "RefutationReport", "diagonal_machine", "halting_refuter", "replay", "Malformed",
]
