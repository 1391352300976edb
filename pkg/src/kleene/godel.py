"""Arithmetization: combinator codes, computation trees, the Kleene predicates.

Codes:

* a combinator's code is the sequence code of its flat prefix code
  (``S = <0>``, ``P n k = <1,n,k>``, ``C n k = <2,n,k>``, composition
  ``<3> ++ F ++ G1 ++ ...``, recursion ``<4> ++ F ++ G``)
* a machine's code is ``pair(code(init), code(step))``
* a tree with root label ``[c, x, y]`` and subtrees ``t0..`` is
  ``<<code(c), x, y>, code(t0), ...>`` where ``x`` is the sequence code of the inputs
* a machine witness is ``pair(k, tree)`` for the tree of ``run_k`` on the input
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence, Union

from . import natnum as nn
from .combinator import (DEFAULT_METER, TAG_C, TAG_COMP, TAG_P, TAG_REC, TAG_S, ArityError, Comb,
                         Comp, MalformedComb, ResourceExhausted, deep_recursion, flatten, unflatten)
from .machine import Machine, eval_machine, lifted_step
from .partiality import Halted, Malformed, Pending
from .stdlib import inl

Code = int


# -- combinator and machine codes ----------------------------------------------

@lru_cache(maxsize=4096)
def encode_comb(t: Comb) -> Code:
    return nn.seq_encode(flatten(t))


@lru_cache(maxsize=4096)
def decode_comb(c: Code) -> Comb:
    """Inverse of :func:`encode_comb`; raises :class:`MalformedComb` naming the failing clause."""
    if not isinstance(c, int) or c < 0:
        raise MalformedComb(f"{c!r} is not a natural number")
    try:
        xs = nn.seq_decode(c)
    except nn.CodingError:
        raise MalformedComb(f"{nn.describe(c)} is not a sequence code") from None
    if not xs:
        raise MalformedComb("empty code")
    t, end = unflatten(xs)
    if end != len(xs):
        raise MalformedComb(f"trailing elements after offset {end}")
    return t


def encode_machine(m: Machine) -> Code:
    return nn.pair(encode_comb(m.init), encode_comb(m.step))


def decode_machine(e: Code) -> Machine:
    a, b = nn.unpair(e)
    init, step = decode_comb(a), decode_comb(b)
    try:
        return Machine(init, step)
    except ArityError as err:
        raise MalformedComb(str(err)) from None


# -- computation trees ------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CompTree:
    comb: Comb
    inputs: tuple[int, ...]
    output: int
    children: tuple["CompTree", ...] = ()

    def label(self) -> tuple[Code, Code, int]:
        return encode_comb(self.comb), nn.seq_encode(self.inputs), self.output

    def size(self) -> int:
        n, stack = 0, [self]
        while stack:
            t = stack.pop()
            n += 1
            stack.extend(t.children)
        return n


class _Budget:
    def __init__(self, limit: int):
        self.left = limit

    def tick(self):
        self.left -= 1
        if self.left < 0:
            raise ResourceExhausted("tree construction exceeded its meter")


def build_tree(t: Comb, args: Sequence[int], *, meter: int = DEFAULT_METER) -> CompTree:
    """The unique correct computation tree for ``t`` on ``args`` (plain semantics, no jets)."""
    args = tuple(args)
    if len(args) != t.arity:
        raise ArityError(f"combinator of arity {t.arity} applied to {len(args)} arguments")
    with deep_recursion():
        return _tree(t, args, _Budget(meter))


def _tree(t: Comb, xs: tuple, budget: _Budget) -> CompTree:
    budget.tick()
    tag = t.tag
    if tag == TAG_S:
        return CompTree(t, xs, xs[0] + 1)
    if tag == TAG_P:
        return CompTree(t, xs, xs[t.k])
    if tag == TAG_C:
        return CompTree(t, xs, t.k)
    if tag == TAG_COMP:
        inner = [_tree(g, xs, budget) for g in t.gs]
        outer = _tree(t.f, tuple(b.output for b in inner), budget)
        return CompTree(t, xs, outer.output, (outer, *inner))
    k, rest = xs[0], xs[1:]
    base = _tree(t.g, rest, budget)
    node = CompTree(t, (0,) + rest, base.output, (base,))
    for i in range(k):
        budget.tick()
        fbranch = _tree(t.f, (i, node.output) + rest, budget)
        node = CompTree(t, (i + 1,) + rest, fbranch.output, (node, fbranch))
    return node


def encode_tree(tree: CompTree) -> Code:
    codes: dict[int, int] = {}
    stack: list[tuple[CompTree, bool]] = [(tree, False)]
    while stack:
        node, ready = stack.pop()
        if ready:
            lab = nn.seq_encode(node.label())
            codes[id(node)] = nn.seq_encode([lab] + [codes[id(c)] for c in node.children])
            continue
        stack.append((node, True))
        stack.extend((c, False) for c in node.children)
    return codes[id(tree)]


def _split_node(y: int) -> Optional[tuple[tuple[int, int, int], tuple[int, ...]]]:
    if not nn.is_seq(y):
        return None
    parts = nn.seq_decode(y)
    if not parts or not nn.is_seq(parts[0]):
        return None
    label = nn.seq_decode(parts[0])
    if len(label) != 3:
        return None
    return (label[0], label[1], label[2]), parts[1:]


def _child_labels(children: tuple[int, ...]):
    out = []
    for c in children:
        split = _split_node(c)
        if split is None:
            return None
        out.append(split[0])
    return out


def _inputs(xc: int) -> Optional[tuple[int, ...]]:
    return nn.seq_decode(xc) if nn.is_seq(xc) else None


def _node_ok(label, children: tuple[int, ...]) -> bool:
    cc, xc, out = label
    try:
        t = decode_comb(cc)
    except MalformedComb:
        return False
    xs = _inputs(xc)
    if xs is None or len(xs) != t.arity:
        return False
    tag = t.tag
    if tag in (TAG_S, TAG_P, TAG_C):
        if children:
            return False
        want = xs[0] + 1 if tag == TAG_S else (xs[t.k] if tag == TAG_P else t.k)
        return out == want
    labs = _child_labels(children)
    if labs is None:
        return False
    if tag == TAG_COMP:
        if len(labs) != len(t.gs) + 1:
            return False
        zs = []
        for g, (gc, gx, gz) in zip(t.gs, labs[1:]):
            if gc != encode_comb(g) or gx != xc:
                return False
            zs.append(gz)
        fc, fx, fz = labs[0]
        return fc == encode_comb(t.f) and fx == nn.seq_encode(zs) and fz == out
    k, rest = xs[0], xs[1:]
    if k == 0:
        if len(labs) != 1:
            return False
        gc, gx, gz = labs[0]
        return gc == encode_comb(t.g) and gx == nn.seq_encode(rest) and gz == out
    if len(labs) != 2:
        return False
    (rc, rx, rz), (fc, fx, fz) = labs
    return (rc == cc and rx == nn.seq_encode((k - 1,) + rest)
            and fc == encode_comb(t.f) and fx == nn.seq_encode((k - 1, rz) + rest) and fz == out)


def check_correct(y: int) -> bool:
    """Does ``y`` encode a correct computation tree? Total: junk gives ``False``."""
    if not isinstance(y, int) or y < 0:
        return False
    seen: set[int] = set()
    stack = [y]
    while stack:
        node = stack.pop()
        if node in seen:
            continue
        split = _split_node(node)
        if split is None:
            return False
        label, children = split
        if not _node_ok(label, children):
            return False
        seen.add(node)
        stack.extend(children)
    return True


def _root_label(y: int) -> Optional[tuple[int, int, int]]:
    """The root label, read from the leading bits only (cheap on huge trees)."""
    head = nn.seq_head(y)
    if head is None or not nn.is_seq(head):
        return None
    label = nn.seq_decode(head)
    return (label[0], label[1], label[2]) if len(label) == 3 else None


def kleene_t_prime(e: int, x: int, y: int) -> bool:
    """``y`` is a correct tree whose root runs the combinator coded ``e`` on inputs ``x``."""
    lab = _root_label(y)
    if lab is None or lab[0] != e or lab[1] != x:
        return False
    return check_correct(y)


def kleene_u_prime(y: int) -> int:
    """Root output of a tree code; 0 on junk."""
    return nn.raw_seq_proj(nn.raw_seq_proj(y, 0), 2)


# -- machines: source, T, U --------------------------------------------------------------

def source_comb(k: int, m: Machine) -> Comb:
    """Unary combinator computing ``run_k(m, .)``: the lifted step composed ``k`` times with inl . init."""
    s = lifted_step(m)
    c: Comb = Comp(inl, [m.init])
    for _ in range(k):
        c = Comp(s, [c])
    return c


def source(k: int, e: Code) -> Code:
    return encode_comb(source_comb(k, decode_machine(e)))


Witness = int


def kleene_t(e: int, x: int, w: int) -> bool:
    """``w = <k, y>`` with ``y`` a correct tree for ``source(k, e)`` on ``<x>`` ending in ``inr``."""
    if not all(isinstance(v, int) and v >= 0 for v in (e, x, w)):
        return False
    return kleene_t_tree(e, x, *nn.unpair(w))


def kleene_t_tree(e: int, x: int, k: int, y: int) -> bool:
    """:func:`kleene_t` on an already split witness ``<k, y>``."""
    if not all(isinstance(v, int) and v >= 0 for v in (e, x, k, y)):
        return False
    if k > y.bit_length():  # the root label must contain a code of length > k
        return False
    try:
        m = decode_machine(e)
    except MalformedComb:
        return False
    lab = _root_label(y)
    if lab is None or lab[2] % 2 == 0:
        return False
    return kleene_t_prime(encode_comb(source_comb(k, m)), nn.seq_encode([x]), y)


def kleene_u(w: int) -> int:
    return kleene_u_prime(nn.snd(w)) >> 1


def produce_witness(e: Code, x: int, fuel: int, *, meter: int = DEFAULT_METER) -> Optional[Witness]:
    m = decode_machine(e)
    out = eval_machine(m, x, fuel, meter=meter)
    if not isinstance(out, Halted):
        return None
    tree = build_tree(source_comb(out.steps, m), (x,), meter=meter)
    return nn.pair(out.steps, encode_tree(tree))


def bracket(e: Code, x: int, fuel: int, *, meter: int = DEFAULT_METER) -> Union[Halted, Pending, Malformed]:
    """``{e}(x)`` by direct simulation of the decoded machine."""
    try:
        m = decode_machine(e)
    except (MalformedComb, ValueError) as err:
        return Malformed(str(err))
    return eval_machine(m, x, fuel, meter=meter)
