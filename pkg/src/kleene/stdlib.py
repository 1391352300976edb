"""The combinator standard library.

Every fixed combinator here is defined by an honest primitive recursive body.
Most are also registered as jets (see :mod:`kleene.combinator`): the body
defines the semantics, the host function only makes it fast. Jets are limited
to operations whose result size is polynomial in the argument size, so that
evaluating one on junk input can never blow up.

Parametric builders (``bounded_sum(f)``, ``piecewise(r, f, g)``, ...) take
combinators and return combinators; the counter is always the first argument.
"""

from __future__ import annotations

from functools import lru_cache

from . import natnum as nn
from .combinator import Comb, Comp, Const, Proj, Rec, S, register_jet
from .dsl import if_, lam, let_, loop


def _b(x: bool) -> int:
    return 1 if x else 0


def _jet(name: str, comb: Comb, fn, stepwise: bool = True) -> Comb:
    return register_jet(name, comb, fn, stepwise=stepwise)


# -- arithmetic ----------------------------------------------------------------
#
# add recurses on its first argument, so bodies pass the small addend first and
# the growing accumulator second: plain evaluation then costs about the value.

pred = _jet("pred", Rec(Proj(2, 0), Const(0, 0)), lambda n: max(n - 1, 0))
add = _jet("add", Rec(Comp(S, [Proj(3, 1)]), Proj(1, 0)), lambda a, b: a + b)
mul = _jet("mul", Rec(Comp(add, [Proj(3, 2), Proj(3, 1)]), Const(1, 0)), lambda a, b: a * b)
_monus_rev = Rec(Comp(pred, [Proj(3, 1)]), Proj(1, 0))
monus = _jet("monus", Comp(_monus_rev, [Proj(2, 1), Proj(2, 0)]), lambda a, b: max(a - b, 0))
sn = _jet("sn", Rec(Const(2, 1), Const(0, 0)), lambda n: _b(n > 0))
snbar = _jet("snbar", Rec(Const(2, 0), Const(0, 1)), lambda n: _b(n == 0))

le = _jet("le", lam(2, lambda x, y: snbar(monus(x, y))), lambda x, y: _b(x <= y))
lt = _jet("lt", lam(2, lambda x, y: sn(monus(y, x))), lambda x, y: _b(x < y))
eq = _jet("eq", lam(2, lambda x, y: snbar(add(monus(x, y), monus(y, x)))), lambda x, y: _b(x == y))
min_ = _jet("min", lam(2, lambda x, y: monus(x, monus(x, y))), min)
max_ = _jet("max", lam(2, lambda x, y: add(y, monus(x, y))), max)

# logic on {0,1}-valued arguments (any non-zero value counts as true)
and_ = _jet("and", lam(2, lambda p, q: sn(mul(p, q))), lambda p, q: _b(p > 0 and q > 0))
or_ = _jet("or", lam(2, lambda p, q: sn(add(p, q))), lambda p, q: _b(p > 0 or q > 0))
not_ = snbar
implies = _jet("implies", lam(2, lambda p, q: or_(snbar(p), q)), lambda p, q: _b(p == 0 or q > 0))

double = _jet("double", lam(1, lambda x: add(x, x)), lambda x: 2 * x)
inl = double
inr = _jet("inr", lam(1, lambda x: S(double(x))), lambda x: 2 * x + 1)
mod2 = _jet("mod2", Rec(Comp(snbar, [Proj(2, 1)]), Const(0, 0)), lambda n: n & 1)

mod = _jet("mod", Rec(lam(3, lambda k, acc, m: mul(S(acc), snbar(eq(S(acc), m)))), Const(1, 0)),
           lambda n, m: n % m if m else n)
div = _jet("div", Rec(lam(3, lambda k, acc, m: add(eq(S(mod(k, m)), m), acc)), Const(1, 0)),
           lambda n, m: n // m if m else 0)
# floor((k+1)/2) = floor(k/2) + k mod 2; the small summand goes first since add recurses on it
div2 = _jet("div2", Rec(lam(2, lambda k, acc: add(mod2(k), acc)), Const(0, 0)), lambda n: n >> 1)

triangle = _jet("triangle", Rec(lam(2, lambda k, acc: add(S(k), acc)), Const(0, 0)), nn.triangle)
# not a jet: 2**n is exponentially larger than n
pow2 = Rec(lam(2, lambda k, acc: double(acc)), Const(0, 1))
bitlen = _jet("bitlen", Rec(lam(2, lambda k, acc: add(eq(S(k), pow2(acc)), acc)), Const(0, 0)),
              lambda n: n.bit_length())

# -- Cantor pairing ------------------------------------------------------------

_root = Rec(lam(2, lambda k, acc: add(eq(S(k), triangle(S(acc))), acc)), Const(0, 0))
pairC = _jet("pair", lam(2, lambda a, b: add(b, triangle(add(a, b)))), nn.pair)
sndC = _jet("snd", lam(1, lambda n: monus(n, triangle(_root(n)))), nn.snd)
fstC = _jet("fst", lam(1, lambda n: monus(_root(n), sndC(n))), nn.fst)
unpairC = (fstC, sndC)


def projC(k: int, i: int) -> Comb:
    """Component ``i`` of a right-nested Cantor ``k``-tuple (unary)."""
    if not 0 <= i < k:
        raise ValueError(f"no component {i} in a {k}-tuple")
    c: Comb = Proj(1, 0)
    for _ in range(i):
        c = Comp(sndC, [c])
    return Comp(fstC, [c]) if i < k - 1 else c


def tupleC(k: int) -> Comb:
    """``(x0, ..., x_{k-1}) -> <x0, ..., x_{k-1}>`` as a combinator of arity ``k``."""
    if k < 1:
        raise ValueError("tuples need at least one component")

    def build(*xs):
        acc = xs[-1]
        for x in reversed(xs[:-1]):
            acc = pairC(x, acc)
        return acc

    return lam(k, build)


def to_unary(c: Comb) -> Comb:
    """``c`` as a unary combinator on Cantor tuples; identity on unary ``c``."""
    if c.arity == 1:
        return c
    if c.arity == 0:
        raise ValueError("nullary combinators have no unary form")
    return Comp(c, [projC(c.arity, i) for i in range(c.arity)])


betaC = _jet("beta", lam(2, lambda z, i: mod(fstC(z), S(mul(S(i), sndC(z))))), nn.beta)

# -- builders --------------------------------------------------------------------


def bounded_sum(f: Comb) -> Comb:
    """``(n, xs) -> sum of f(k, xs) for k < n``."""
    return Rec(lam(f.arity + 1, lambda k, acc, *xs: add(f(k, *xs), acc)), Const(f.arity - 1, 0))


def bounded_prod(f: Comb) -> Comb:
    return Rec(lam(f.arity + 1, lambda k, acc, *xs: mul(acc, f(k, *xs))), Const(f.arity - 1, 1))


def bounded_exists(p: Comb) -> Comb:
    return Comp(sn, [bounded_sum(p)])


def bounded_forall(p: Comb) -> Comb:
    return Comp(sn, [bounded_prod(p)])


def bounded_min(p: Comb) -> Comb:
    """``(n, xs) ->`` least ``k < n`` with ``p(k, xs) != 0``, or ``n`` if none."""
    return Rec(lam(p.arity + 1, lambda k, acc, *xs: add(mul(eq(acc, k), snbar(p(k, *xs))), acc)),
               Const(p.arity - 1, 0))


def piecewise(r: Comb, f: Comb, g: Comb) -> Comb:
    """``f`` where ``r`` holds, ``g`` elsewhere (built by recursion on ``r``)."""
    return lam(r.arity, lambda *xs: if_(r(*xs), f(*xs), g(*xs)))


def sum_caseC(f: Comb, g: Comb) -> Comb:
    """``inl n -> f(n)``, ``inr n -> g(n)``."""
    return lam(1, lambda n: if_(mod2(n), g(div2(n)), f(div2(n))))


factorial = bounded_prod(S)

# -- sequences -----------------------------------------------------------------

_L = lam(1, lambda c: monus(bitlen(S(c)), 1))
_Sbits = lam(1, lambda c: monus(S(c), pow2(_L(c))))
_suffix = lam(2, lambda c, p: mod(_Sbits(c), pow2(monus(_L(c), p))))
# the same on an already split code (bits sb, length l); keeps compiled bodies small
_sfx = lam(3, lambda sb, l, p: mod(sb, pow2(monus(l, p))))
_rd = lam(4, lambda sb, l, p, m: div(_sfx(sb, l, p), pow2(monus(monus(l, p), m))))
_mk = lam(2, lambda bits, length: monus(add(pow2(length), bits), 1))


def _elem_parts(c, p, emit):
    return let_(_L(c), lambda l: let_(monus(S(c), pow2(l)), lambda sb: let_(
        monus(monus(l, p), bitlen(_sfx(sb, l, p))), lambda z: let_(
            _rd(sb, l, add(p, z), S(z)), lambda n: let_(
                S(add(p, add(z, z))), lambda q: let_(
                    min_(pred(n), monus(l, q)), lambda k: emit(sb, l, q, k)))))))


seq_elem = _jet("seq_elem", lam(2, lambda c, p: _elem_parts(
    c, p, lambda sb, l, q, k: monus(add(pow2(k), _rd(sb, l, q, k)), 1))), lambda c, p: nn.raw_elem_at(c, p)[0])
seq_next = _jet("seq_next", lam(2, lambda c, p: _elem_parts(c, p, lambda sb, l, q, k: add(q, k))),
                lambda c, p: nn.raw_elem_at(c, p)[1])

seq_len = _jet("seq_len", lam(1, lambda c: sndC(loop(
    _L(c), 0, lambda i, st: if_(lt(fstC(st), _L(c)), pairC(seq_next(c, fstC(st)), S(sndC(st))), st)))),
    nn.raw_seq_len)
seq_pos = _jet("seq_pos", lam(2, lambda c, i: loop(i, 0, lambda j, p: seq_next(c, p))), nn.raw_seq_pos)
seq_proj = _jet("seq_proj", lam(2, lambda c, i: seq_elem(c, seq_pos(c, i))), nn.raw_seq_proj)
seq_last = _jet("seq_last", lam(1, lambda c: seq_proj(c, pred(seq_len(c)))), nn.raw_seq_last)
seq_pop = _jet("seq_pop", lam(1, lambda c: let_(seq_pos(c, pred(seq_len(c))), lambda p: _mk(
    div(_Sbits(c), pow2(monus(_L(c), p))), min_(p, _L(c))))), nn.raw_seq_pop)
seq_tail = _jet("seq_tail", lam(1, lambda c: let_(min_(seq_next(c, 0), _L(c)), lambda p: _mk(
    _suffix(c, p), monus(_L(c), p)))), nn.raw_seq_tail)
seq_concat = _jet("seq_concat", lam(2, lambda a, b: _mk(
    add(mul(_Sbits(a), pow2(_L(b))), _Sbits(b)), add(_L(a), _L(b)))), nn.raw_seq_concat)
seq_single = _jet("seq_single", lam(1, lambda a: let_(S(a), lambda v: let_(bitlen(v), lambda n: let_(
    bitlen(n), lambda m: _mk(add(mul(n, pow2(pred(n))), monus(v, pow2(pred(n)))),
                             monus(add(add(m, m), n), 2)))))), nn.raw_seq_single)
seq_snoc = _jet("seq_snoc", lam(2, lambda c, a: seq_concat(c, seq_single(a))),
                lambda c, a: nn.raw_seq_concat(c, nn.raw_seq_single(a)))
seq_cons = _jet("seq_cons", lam(2, lambda a, c: seq_concat(seq_single(a), c)),
                lambda a, c: nn.raw_seq_concat(nn.raw_seq_single(a), c))


def seq_of(*items) -> "object":
    """DSL helper: an expression building the sequence of the given expressions."""
    if not items:
        return 0
    acc = seq_single(items[0])
    for x in items[1:]:
        acc = seq_snoc(acc, x)
    return acc


# -- flat-code parsing ---------------------------------------------------------
#
# code_parse(prog, o) reads one combinator from the flat code ``prog`` (a
# sequence code) starting at offset ``o`` and returns <end, arity>. It is a
# bounded loop over a small stack machine. Pending stack entries are
# 4*payload + kind with kind 0 = comp awaiting its outer combinator, 1 = rec
# awaiting its step, 2 = rec awaiting its base, 3 = comp awaiting <remaining,
# arity+1> inner combinators (arity+1 = 0 while still unknown).

_ST_POS, _ST_STACK, _ST_PEND, _ST_A, _ST_DONE = range(5)


def _pstate(pos, stack, pend, a, done):
    return seq_of(pos, stack, pend, a, done)


def _parse_iter(prog, st):
    # Each component of the next state is selected separately, so that the
    # (large) sequence constructors occur once in the compiled body.
    def body(pos, stack, pend, a, done):
        return let_(and_(sn(pend), sn(seq_len(stack))), lambda popping: let_(
            seq_last(stack), lambda top: let_(mod(top, 4), lambda kind: let_(div(top, 4), lambda pay: let_(
                seq_proj(prog, pos), lambda tag: let_(
                    if_(sndC(pay), sndC(pay), S(a)), lambda ar1: let_(
                        sn(pred(fstC(pay))), lambda more: let_(
                            and_(popping, eq(kind, 0)), lambda k0: let_(
                                and_(popping, eq(kind, 1)), lambda k1: let_(
                                    and_(popping, eq(kind, 2)), lambda k2: let_(
                                        and_(popping, and_(snbar(k0), and_(snbar(k1), snbar(k2)))), lambda k3: let_(
                                            snbar(pend), lambda consuming: step(
                                                pos, stack, pend, a, popping, tag, ar1, more,
                                                pay, k0, k1, k2, k3, consuming)))))))))))))

    def step(pos, stack, pend, a, popping, tag, ar1, more, pay, k0, k1, k2, k3, consuming):
        def finish(opens, push):
            pushed = if_(k0, add(3, mul(4, pairC(a, 0))),
                         if_(k1, 2, if_(k3, add(3, mul(4, pairC(pred(fstC(pay)), ar1))), monus(tag, 3))))
            new_stack = let_(if_(popping, seq_pop(stack), stack), lambda base: if_(
                push, seq_snoc(base, pushed), base))
            new_pos = if_(consuming, add(pos, if_(and_(sn(tag), le(tag, 2)), 3, 1)), pos)
            new_pend = if_(consuming, snbar(opens), if_(popping, snbar(push), 0))
            new_a = if_(consuming,
                        if_(eq(tag, 0), 1, if_(le(tag, 2), seq_proj(prog, S(pos)), if_(le(tag, 4), a, 0))),
                        if_(k2, S(a), if_(and_(k3, snbar(more)), pred(ar1), a)))
            return _pstate(new_pos, new_stack, new_pend, new_a, and_(pend, snbar(popping)))

        return let_(and_(consuming, and_(le(3, tag), le(tag, 4))), lambda opens: let_(
            or_(and_(k0, sn(a)), or_(k1, or_(and_(k3, more), opens))), lambda push: finish(opens, push)))

    return let_(seq_proj(st, _ST_DONE), lambda done: if_(done, st, let_(
        seq_proj(st, _ST_POS), lambda pos: let_(seq_proj(st, _ST_STACK), lambda stack: let_(
            seq_proj(st, _ST_PEND), lambda pend: let_(
                seq_proj(st, _ST_A), lambda a: body(pos, stack, pend, a, done)))))))


@lru_cache(maxsize=65536)
def _host_parse(prog: int, o: int) -> int:
    xs = nn._decode_cached(prog)
    if xs is None:
        n = nn.raw_seq_len(prog)
        tok = lambda i: nn.raw_seq_proj(prog, i)  # noqa: E731
    else:
        n = len(xs)
        tok = lambda i: xs[i] if i < n else 0  # noqa: E731
    pos, stack, pend, a, done = o, [], 0, 0, 0
    for _ in range(2 * max(n - o, 0) + 2):
        if done:
            break
        if pend:
            if not stack:
                done = 1
                continue
            top = stack.pop()
            kind, pay = top % 4, top // 4
            if kind == 0:
                if a:
                    stack.append(3 + 4 * nn.pair(a, 0))
                    pend = 0
                else:
                    a = 0
            elif kind == 1:
                stack.append(2)
                pend = 0
            elif kind == 2:
                a += 1
            else:
                rem, ar1 = nn.unpair(pay)
                if ar1 == 0:
                    ar1 = a + 1
                if rem - 1 > 0:
                    stack.append(3 + 4 * nn.pair(rem - 1, ar1))
                    pend = 0
                else:
                    a = ar1 - 1
        else:
            tag = tok(pos)
            if tag == 0:
                pos, pend, a = pos + 1, 1, 1
            elif tag <= 2:
                pos, pend, a = pos + 3, 1, tok(pos + 1)
            elif tag in (3, 4):
                stack.append(tag - 3)
                pos += 1
            else:
                pos, pend, a = pos + 1, 1, 0
    return nn.pair(pos, a)


code_parse = _jet("code_parse", lam(2, lambda prog, o: let_(
    loop(add(mul(2, monus(seq_len(prog), o)), 2), _pstate(o, 0, 0, 0, 0), lambda i, st: _parse_iter(prog, st)),
    lambda st: pairC(seq_proj(st, _ST_POS), seq_proj(st, _ST_A)))), _host_parse, stepwise=False)
code_end = _jet("code_end", lam(2, lambda prog, o: fstC(code_parse(prog, o))),
                lambda prog, o: nn.fst(_host_parse(prog, o)), stepwise=False)
code_arity = _jet("code_arity", lam(2, lambda prog, o: sndC(code_parse(prog, o))),
                  lambda prog, o: nn.snd(_host_parse(prog, o)), stepwise=False)


def _host_child(prog: int, o: int, j: int) -> int:
    n = nn.raw_seq_len(prog)
    off, i = o + 1, 0
    while i < j and off < n:
        off = nn.fst(_host_parse(prog, off))
        i += 1
    return off + (j - i)  # past the end each parse consumes one (empty) token


code_child = _jet("code_child", lam(3, lambda prog, o, j: loop(j, S(o), lambda i, off: code_end(prog, off))),
                  _host_child, stepwise=False)


def _host_match(prog: int, o: int, pat: int) -> int:
    m, n = nn.raw_seq_len(pat), nn.raw_seq_len(prog)
    ok = o + m <= n
    for i in range(m):
        if not ok:
            break
        ok = nn.raw_seq_proj(prog, o + i) == nn.raw_seq_proj(pat, i)
    return _b(ok)


code_match = _jet("code_match", lam(3, lambda prog, o, pat: loop(
    seq_len(pat), le(add(o, seq_len(pat)), seq_len(prog)),
    lambda i, acc: and_(acc, eq(seq_proj(prog, add(o, i)), seq_proj(pat, i))))), _host_match, stepwise=False)


def stdlib() -> dict[str, Comb]:
    """Named table of the fixed library combinators."""
    return {
        "pred": pred, "add": add, "mul": mul, "monus": monus, "sn": sn, "snbar": snbar,
        "le": le, "lt": lt, "eq": eq, "min": min_, "max": max_,
        "and": and_, "or": or_, "not": not_, "implies": implies,
        "double": double, "inl": inl, "inr": inr, "mod2": mod2, "div2": div2, "mod": mod, "div": div,
        "triangle": triangle, "pow2": pow2, "bitlen": bitlen, "factorial": factorial,
        "pair": pairC, "fst": fstC, "snd": sndC, "beta": betaC,
        "seq_len": seq_len, "seq_proj": seq_proj, "seq_last": seq_last, "seq_pop": seq_pop,
        "seq_tail": seq_tail, "seq_concat": seq_concat, "seq_single": seq_single,
        "seq_snoc": seq_snoc, "seq_cons": seq_cons,
        "code_end": code_end, "code_arity": code_arity, "code_child": code_child, "code_match": code_match,
    }
