"""Primitive recursive combinators.

A combinator is one of

* ``S``              successor (arity 1)
* ``P n k``          projection onto argument ``k`` of ``n`` (0-indexed)
* ``C n k``          the constant ``k`` of arity ``n`` (``n = 0`` allowed)
* ``(comp F [G..])`` ``F(G1(x), ..., Gm(x))``
* ``(rec F G)``      ``h(0, x) = G(x)``, ``h(k+1, x) = F(k, h(k, x), x)``

Nodes are hash-consed: structurally equal combinators are the same object, so
equality and hashing are identity-based and O(1).

Evaluation is metered. A *jet* table maps selected library combinators to host
functions with identical semantics; a jet node is evaluated in one metered
operation instead of by unfolding its primitive recursive body. Jets never
change results, only cost (each jet's body is tested against its host function).
"""

from __future__ import annotations

import itertools
import re
import sys
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Mapping, Sequence, Union

from .natnum import describe as _describe

DEFAULT_METER = 10**8

TAG_S, TAG_P, TAG_C, TAG_COMP, TAG_REC = 0, 1, 2, 3, 4


class ArityError(ValueError):
    pass


class MalformedComb(ValueError):
    pass


class ResourceExhausted(RuntimeError):
    """The combinator meter ran out before evaluation finished."""


_INTERN: dict[tuple, "Comb"] = {}


class Comb:
    __slots__ = ("tag", "arity", "size", "__weakref__")

    tag: int
    arity: int
    size: int  # length of the flat code

    def __call__(self, *args):
        # Builds a DSL expression; evaluation is ``evaluate(c, args)``.
        from .dsl import App

        return App(self, args)

    def __repr__(self) -> str:
        return f"<{show(self) if self.size < 200 else type(self).__name__ + ' of size ' + str(self.size)}>"

    def __str__(self) -> str:
        return show(self)


class Succ(Comb):
    __slots__ = ()

    def __new__(cls):
        node = _INTERN.get(("S",))
        if node is None:
            node = object.__new__(cls)
            node.tag, node.arity, node.size = TAG_S, 1, 1
            _INTERN[("S",)] = node
        return node

    def __reduce__(self):
        return (Succ, ())


def _nat(x, what: str) -> int:
    if not isinstance(x, int) or isinstance(x, bool) or x < 0:
        raise ArityError(f"{what} must be a natural number, got {x!r}")
    return x


class Proj(Comb):
    __slots__ = ("n", "k")

    def __new__(cls, n: int, k: int):
        key = ("P", n, k)
        node = _INTERN.get(key)
        if node is None:
            _nat(n, "projection arity")
            _nat(k, "projection index")
            if k >= n:
                raise ArityError(f"projection index {k} out of range for arity {n}")
            node = object.__new__(cls)
            node.tag, node.arity, node.size, node.n, node.k = TAG_P, n, 3, n, k
            _INTERN[key] = node
        return node

    def __reduce__(self):
        return (Proj, (self.n, self.k))


class Const(Comb):
    __slots__ = ("n", "k")

    def __new__(cls, n: int, k: int):
        key = ("C", n, k)
        node = _INTERN.get(key)
        if node is None:
            _nat(n, "constant arity")
            _nat(k, "constant value")
            node = object.__new__(cls)
            node.tag, node.arity, node.size, node.n, node.k = TAG_C, n, 3, n, k
            _INTERN[key] = node
        return node

    def __reduce__(self):
        return (Const, (self.n, self.k))


class Comp(Comb):
    __slots__ = ("f", "gs")

    def __new__(cls, f: Comb, gs: Sequence[Comb]):
        gs = tuple(gs)
        key = ("Comp", id(f), tuple(map(id, gs)))
        node = _INTERN.get(key)
        if node is None:
            if not gs:
                raise ArityError("composition needs at least one inner combinator")
            if f.arity != len(gs):
                raise ArityError(f"outer combinator has arity {f.arity} but {len(gs)} inner ones were given")
            m = gs[0].arity
            if any(g.arity != m for g in gs):
                raise ArityError("inner combinators of a composition must share one arity")
            node = object.__new__(cls)
            node.tag, node.arity, node.f, node.gs = TAG_COMP, m, f, gs
            node.size = 1 + f.size + sum(g.size for g in gs)
            _INTERN[key] = node
        return node

    def __reduce__(self):
        return (Comp, (self.f, self.gs))


class Rec(Comb):
    __slots__ = ("f", "g")

    def __new__(cls, f: Comb, g: Comb):
        key = ("Rec", id(f), id(g))
        node = _INTERN.get(key)
        if node is None:
            if f.arity != g.arity + 2:
                raise ArityError(f"recursion step has arity {f.arity}, expected {g.arity + 2}")
            node = object.__new__(cls)
            node.tag, node.arity, node.f, node.g = TAG_REC, g.arity + 1, f, g
            node.size = 1 + f.size + g.size
            _INTERN[key] = node
        return node

    def __reduce__(self):
        return (Rec, (self.f, self.g))


S = Succ()


def P(n: int, k: int) -> Proj:
    return Proj(n, k)


def C(n: int, k: int) -> Const:
    return Const(n, k)


def comp(f: Comb, *gs: Comb) -> Comp:
    return Comp(f, gs)


def rec(f: Comb, g: Comb) -> Rec:
    return Rec(f, g)


def children(c: Comb) -> tuple[Comb, ...]:
    if c.tag == TAG_COMP:
        return (c.f,) + c.gs
    if c.tag == TAG_REC:
        return (c.f, c.g)
    return ()


# -- flat code and offsets ---------------------------------------------------

def flatten(c: Comb) -> list[int]:
    """Flat prefix code: S=[0], P=[1,n,k], C=[2,n,k], comp=[3,F..,G..], rec=[4,F..,G..]."""
    out: list[int] = []
    stack = [c]
    while stack:
        node = stack.pop()
        t = node.tag
        if t == TAG_S:
            out.append(0)
        elif t == TAG_P or t == TAG_C:
            out.extend((t, node.n, node.k))
        else:
            out.append(t)
            stack.extend(reversed(children(node)))
    return out


@lru_cache(maxsize=256)
def node_offsets(c: Comb) -> dict[int, Comb]:
    """Map from offset in ``flatten(c)`` to the subterm starting there."""
    table: dict[int, Comb] = {}
    stack = [(c, 0)]
    while stack:
        node, off = stack.pop()
        table[off] = node
        pos = off + 1
        for ch in children(node):
            stack.append((ch, pos))
            pos += ch.size
    return table


def unflatten(code: Sequence[int], start: int = 0) -> tuple[Comb, int]:
    """Parse one combinator from a flat code; returns it and the end offset."""
    # Work stack of partially built nodes: [tag, pending children, needed].
    stack: list[list] = []
    pos = start
    n = len(code)

    def take() -> int:
        nonlocal pos
        if pos >= n:
            raise MalformedComb(f"code ends early at offset {pos}")
        v = code[pos]
        pos += 1
        return v

    while True:
        at = pos
        tag = take()
        if tag == TAG_S:
            done: Comb = S
        elif tag in (TAG_P, TAG_C):
            a, b = take(), take()
            try:
                done = Proj(a, b) if tag == TAG_P else Const(a, b)
            except ArityError as e:
                raise MalformedComb(f"bad leaf at offset {at}") from None
        elif tag in (TAG_COMP, TAG_REC):
            stack.append([tag, [], None, at])
            continue
        else:
            raise MalformedComb(f"unknown tag {_describe(tag)} at offset {at}")
        # Attach completed nodes upward.
        while stack:
            top = stack[-1]
            top[1].append(done)
            if top[0] == TAG_REC:
                if len(top[1]) < 2:
                    break
                try:
                    done = Rec(top[1][0], top[1][1])
                except ArityError as e:
                    raise MalformedComb(f"rec at offset {top[3]}: {e}") from None
            else:
                if top[2] is None:
                    top[2] = 1 + top[1][0].arity
                    if top[2] == 1:
                        raise MalformedComb(f"comp at offset {top[3]} has a nullary outer combinator")
                if len(top[1]) < top[2]:
                    break
                try:
                    done = Comp(top[1][0], top[1][1:])
                except ArityError as e:
                    raise MalformedComb(f"comp at offset {top[3]}: {e}") from None
            stack.pop()
        else:
            return done, pos


# -- text syntax -------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\(|\)|\[|\])|([A-Za-z_]+)|(\d+)|(\S))")


def _tokens(text: str) -> list[tuple[str, int]]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        if m.group(4) is not None:
            raise MalformedComb(f"unexpected character {m.group(4)!r} at position {m.start(4)}")
        for g in (1, 2, 3):
            if m.group(g) is not None:
                out.append((m.group(g), m.start(g)))
        pos = m.end()
    return out


def parse_comb(text: str) -> Comb:
    """Parse ``S | P n k | C n k | (comp F [G1 ... Gn]) | (rec F G)``."""
    toks = _tokens(text)
    i = 0

    def expect_nat() -> int:
        nonlocal i
        if i >= len(toks) or not toks[i][0].isdigit():
            where = f"{toks[i][0]!r} at position {toks[i][1]}" if i < len(toks) else "end of input"
            raise MalformedComb(f"expected a number, found {where}")
        i += 1
        return int(toks[i - 1][0])

    def expect(tok: str) -> None:
        nonlocal i
        if i >= len(toks) or toks[i][0] != tok:
            where = f"{toks[i][0]!r} at position {toks[i][1]}" if i < len(toks) else "end of input"
            raise MalformedComb(f"expected {tok!r}, found {where}")
        i += 1

    def term() -> Comb:
        nonlocal i
        if i >= len(toks):
            raise MalformedComb("unexpected end of input")
        tok, at = toks[i]
        i += 1
        try:
            if tok == "S":
                return S
            if tok in ("P", "C"):
                a = expect_nat()
                b = expect_nat()
                return Proj(a, b) if tok == "P" else Const(a, b)
            if tok == "(":
                if i >= len(toks):
                    raise MalformedComb("unexpected end of input after '('")
                head, hat = toks[i]
                i += 1
                if head == "comp":
                    f = term()
                    expect("[")
                    gs = []
                    while i < len(toks) and toks[i][0] != "]":
                        gs.append(term())
                    expect("]")
                    expect(")")
                    return Comp(f, gs)
                if head == "rec":
                    f = term()
                    g = term()
                    expect(")")
                    return Rec(f, g)
                raise MalformedComb(f"unknown form {head!r} at position {hat}")
        except ArityError as e:
            raise MalformedComb(f"ill-formed term starting at position {at}: {e}") from None
        raise MalformedComb(f"unexpected token {tok!r} at position {at}")

    c = term()
    if i != len(toks):
        raise MalformedComb(f"trailing input {toks[i][0]!r} at position {toks[i][1]}")
    return c


def show(c: Comb) -> str:
    parts: list[str] = []
    stack: list = [c]
    while stack:
        item = stack.pop()
        if isinstance(item, str):
            parts.append(item)
            continue
        t = item.tag
        if t == TAG_S:
            parts.append("S")
        elif t == TAG_P:
            parts.append(f"P {item.n} {item.k}")
        elif t == TAG_C:
            parts.append(f"C {item.n} {item.k}")
        elif t == TAG_REC:
            stack.extend([")", item.g, " ", item.f, "(rec "])
        else:
            seq: list = ["(comp ", item.f, " ["]
            for j, g in enumerate(item.gs):
                if j:
                    seq.append(" ")
                seq.append(g)
            seq.append("])")
            stack.extend(reversed(seq))
    return "".join(parts)


# -- jets ---------------------------------------------------------------------

@dataclass(frozen=True)
class Jet:
    """``stepwise`` jets also fire in accelerated small-step evaluation (and so
    in the arithmetized interpreter, which must recognise each of them)."""

    name: str
    comb: Comb
    fn: Callable[..., int]
    stepwise: bool = True


_JETS: list[Jet] = []
_JET_INDEX: dict[Comb, Jet] = {}


def register_jet(name: str, comb: Comb, fn: Callable[..., int], *, stepwise: bool = True) -> Comb:
    if comb in _JET_INDEX:
        raise ValueError(f"{name}: combinator already has a jet")
    jet = Jet(name, comb, fn, stepwise)
    _JETS.append(jet)
    _JET_INDEX[comb] = jet
    return comb


def jets() -> tuple[Jet, ...]:
    """All registered jets, in registration order."""
    if "kleene.stdlib" not in sys.modules:
        from . import stdlib  # noqa: F401  (registers the library jets)
    return tuple(_JETS)


def stepwise_jets() -> tuple[Jet, ...]:
    return tuple(j for j in jets() if j.stepwise)


_TABLES: dict[tuple, dict[Comb, Callable[..., int]]] = {}


def jet_table(exclude: Sequence[str] = ()) -> Mapping[Comb, Callable[..., int]]:
    """Map from jetted combinators to their host functions. Shared between calls: do not mutate."""
    all_jets = jets()
    key = (len(all_jets), tuple(exclude))  # jets are only ever appended
    if key not in _TABLES:
        _TABLES[key] = {j.comb: j.fn for j in all_jets if j.name not in exclude}
    return _TABLES[key]


JetMap = Mapping[Comb, Callable[..., int]]


# -- big-step evaluation -----------------------------------------------------

class _Meter:
    __slots__ = ("left", "limit")

    def __init__(self, limit: int):
        self.left = limit
        self.limit = limit

    @property
    def used(self) -> int:
        return self.limit - self.left


def evaluate(c: Comb, args: Sequence[int], *, jets: JetMap | None = None,
             meter: int = DEFAULT_METER) -> int:
    """Big-step semantics. ``jets=None`` uses every registered jet; ``{}`` is fully plain."""
    args = tuple(args)
    if len(args) != c.arity:
        raise ArityError(f"combinator of arity {c.arity} applied to {len(args)} arguments")
    for a in args:
        _nat(a, "argument")
    table = jet_table() if jets is None else jets
    m = _Meter(meter)
    return _run(c, args, table, m)


def eval_counted(c: Comb, args: Sequence[int], *, jets: JetMap | None = None,
                 meter: int = DEFAULT_METER) -> tuple[int, int]:
    """Like :func:`evaluate` but also returns the number of metered operations."""
    args = tuple(args)
    if len(args) != c.arity:
        raise ArityError(f"combinator of arity {c.arity} applied to {len(args)} arguments")
    table = jet_table() if jets is None else jets
    m = _Meter(meter)
    return _run(c, args, table, m), m.used


# Evaluation through per-node closures, built on first use and kept per jet
# table. Same results and the same meter charge as ``_eval``, several times faster.
_COMPILED: dict[object, dict[Comb, Callable]] = {}


def _run(c: Comb, xs: tuple, table: JetMap, m: _Meter) -> int:
    if not table:
        key: object = "plain"
    elif any(table is t for t in _TABLES.values()):
        key = id(table)  # cached tables live for the whole process
    else:
        return _eval(c, xs, table, m)  # an ad hoc table: not worth compiling for
    cache = _COMPILED.setdefault(key, {})
    return _closure(c, table, cache)(xs, m)


def _exhausted(m: _Meter):
    raise ResourceExhausted(f"combinator meter of {m.limit} operations exhausted")


def _closure(c: Comb, table: JetMap, cache: dict) -> Callable:
    fn = cache.get(c)
    if fn is None:
        fn = cache[c] = _build(c, table, cache)
    return fn


def _build(c: Comb, table: JetMap, cache: dict) -> Callable:
    jet = table.get(c)
    if jet is not None:
        def run(xs, m):
            m.left -= 1
            if m.left < 0:
                _exhausted(m)
            return jet(*xs)
        return run
    t = c.tag
    if t == TAG_P:
        k = c.k

        def run(xs, m):
            m.left -= 1
            if m.left < 0:
                _exhausted(m)
            return xs[k]
        return run
    if t == TAG_S:
        def run(xs, m):
            m.left -= 1
            if m.left < 0:
                _exhausted(m)
            return xs[0] + 1
        return run
    if t == TAG_C:
        k = c.k

        def run(xs, m):
            m.left -= 1
            if m.left < 0:
                _exhausted(m)
            return k
        return run
    kids = None  # children are looked up on first call: deep terms never recurse at build time
    if t == TAG_COMP:
        def run(xs, m):
            nonlocal kids
            m.left -= 1
            if m.left < 0:
                _exhausted(m)
            if kids is None:
                kids = (_closure(c.f, table, cache), [_closure(g, table, cache) for g in c.gs])
            f, gs = kids
            return f(tuple([g(xs, m) for g in gs]), m)
        return run

    def run(xs, m):
        nonlocal kids
        m.left -= 1
        if m.left < 0:
            _exhausted(m)
        if kids is None:
            kids = (_closure(c.f, table, cache), _closure(c.g, table, cache))
        f, g = kids
        rest = xs[1:]
        acc = g(rest, m)
        for i in range(xs[0]):
            acc = f((i, acc) + rest, m)
        return acc
    return run


def _eval(c: Comb, xs: tuple, table: JetMap, m: _Meter) -> int:
    m.left -= 1
    if m.left < 0:
        raise ResourceExhausted(f"combinator meter of {m.limit} operations exhausted")
    fn = table.get(c)
    if fn is not None:
        return fn(*xs)
    t = c.tag
    if t == TAG_P:
        return xs[c.k]
    if t == TAG_COMP:
        return _eval(c.f, tuple([_eval(g, xs, table, m) for g in c.gs]), table, m)
    if t == TAG_S:
        return xs[0] + 1
    if t == TAG_C:
        return c.k
    k = xs[0]
    rest = xs[1:]
    acc = _eval(c.g, rest, table, m)
    f = c.f
    for i in range(k):
        acc = _eval(f, (i, acc) + rest, table, m)
    return acc


def deep_recursion(limit: int = 200000):
    """Context manager raising the interpreter recursion limit."""
    import contextlib

    @contextlib.contextmanager
    def cm():
        old = sys.getrecursionlimit()
        sys.setrecursionlimit(max(old, limit))
        try:
            yield
        finally:
            sys.setrecursionlimit(old)

    return cm()


# -- small-step machine ------------------------------------------------------

@dataclass(frozen=True)
class Frame:
    """An activation: the node at ``offset`` of the root code, applied to ``args``.

    ``aux`` holds the inner results collected so far (composition) or, for
    recursion, ``()`` before the base case and ``(i, acc)`` afterwards.
    """

    offset: int
    args: tuple[int, ...]
    aux: tuple[int, ...] = ()


@dataclass(frozen=True)
class StepState:
    root: Comb
    frames: tuple[Frame, ...]
    accelerate: bool = False

    def node(self, frame: Frame) -> Comb:
        return node_offsets(self.root)[frame.offset]


def init_state(c: Comb, args: Sequence[int], accelerate: bool = False) -> StepState:
    args = tuple(args)
    if len(args) != c.arity:
        raise ArityError(f"combinator of arity {c.arity} applied to {len(args)} arguments")
    return StepState(c, (Frame(0, args, ()),), accelerate)


small_step_init = init_state


def small_step(st: StepState) -> Union[StepState, int]:
    """One step: touch the top node. Returns the next state or the final value."""
    if not st.frames:
        raise ValueError("empty frame stack")
    top = st.frames[-1]
    rest = st.frames[:-1]
    offsets = node_offsets(st.root)
    node = offsets[top.offset]
    if st.accelerate:
        if not _JETS:
            jets()
        jet = _JET_INDEX.get(node)
        if jet is not None and jet.stepwise:
            return _deliver(st, rest, jet.fn(*top.args))
    t = node.tag
    if t == TAG_S:
        return _deliver(st, rest, top.args[0] + 1)
    if t == TAG_P:
        return _deliver(st, rest, top.args[node.k])
    if t == TAG_C:
        return _deliver(st, rest, node.k)
    if t == TAG_COMP:
        done = top.aux
        if len(done) < len(node.gs):
            child = top.offset + 1 + node.f.size + sum(g.size for g in node.gs[: len(done)])
            return StepState(st.root, st.frames + (Frame(child, top.args, ()),), st.accelerate)
        return StepState(st.root, rest + (Frame(top.offset + 1, done, ()),), st.accelerate)
    # recursion
    k = top.args[0]
    xs = top.args[1:]
    if not top.aux:
        g_off = top.offset + 1 + node.f.size
        return StepState(st.root, st.frames + (Frame(g_off, xs, ()),), st.accelerate)
    i, acc = top.aux
    if i == k:
        return _deliver(st, rest, acc)
    return StepState(st.root, st.frames + (Frame(top.offset + 1, (i, acc) + xs, ()),), st.accelerate)


def _deliver(st: StepState, rest: tuple[Frame, ...], v: int) -> Union[StepState, int]:
    if not rest:
        return v
    parent = rest[-1]
    pnode = node_offsets(st.root)[parent.offset]
    if pnode.tag == TAG_COMP:
        aux = parent.aux + (v,)
    elif not parent.aux:
        aux = (0, v)
    else:
        aux = (parent.aux[0] + 1, v)
    return StepState(st.root, rest[:-1] + (Frame(parent.offset, parent.args, aux),), st.accelerate)


def run_small(c: Comb, args: Sequence[int], *, accelerate: bool = False,
              max_steps: int = DEFAULT_METER) -> tuple[int, int]:
    """Iterate :func:`small_step` to completion; returns ``(value, steps)``."""
    st: Union[StepState, int] = init_state(c, args, accelerate)
    steps = 0
    while isinstance(st, StepState):
        if steps >= max_steps:
            raise ResourceExhausted(f"small-step budget of {max_steps} exhausted")
        st = small_step(st)
        steps += 1
    return st, steps


# -- miscellany ----------------------------------------------------------------

def is_characteristic(c: Comb, probe: int | Sequence[Sequence[int]], *, jets: JetMap | None = None) -> bool:
    """Empirical check that ``c`` is {0,1}-valued.

    ``probe`` is either explicit argument tuples or a bound ``b``, meaning all
    tuples with entries below ``b``.
    """
    inputs = itertools.product(range(probe), repeat=c.arity) if isinstance(probe, int) else probe
    return all(evaluate(c, xs, jets=jets) in (0, 1) for xs in inputs)
