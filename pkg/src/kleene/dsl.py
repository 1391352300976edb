"""A small expression language that compiles to combinators.

    add3 = lam(3, lambda x, y, z: add(x, add(y, z)))

Variables compile to projections, integer literals to constants and
``comb(args...)`` to composition. ``let_``, ``if_`` and ``loop`` compile to the
usual composition and recursion patterns:

* ``let_(v, body)``        binds ``v`` to a fresh variable for ``body``
* ``if_(c, a, b)``         ``a`` when ``c >= 1`` else ``b`` (via ``rec`` on ``c``)
* ``loop(n, init, body)``  ``acc := init; for i < n: acc := body(i, acc)``

``if_`` always evaluates ``b``; ``a`` only when the condition is non-zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

from .combinator import ArityError, Comb, Comp, Const, Proj, Rec

ExprLike = Union["Expr", int]


class Expr:
    __slots__ = ()


@dataclass(frozen=True, eq=False)
class Var(Expr):
    name: str = "v"


@dataclass(frozen=True, eq=False)
class Lit(Expr):
    value: int


@dataclass(frozen=True, eq=False)
class App(Expr):
    comb: Comb
    args: tuple


@dataclass(frozen=True, eq=False)
class Let(Expr):
    value: ExprLike
    body: Callable[[Var], ExprLike]


@dataclass(frozen=True, eq=False)
class If(Expr):
    cond: ExprLike
    then: ExprLike
    other: ExprLike


@dataclass(frozen=True, eq=False)
class Loop(Expr):
    count: ExprLike
    init: ExprLike
    body: Callable[[Var, Var], ExprLike]


def let_(value: ExprLike, body: Callable[[Var], ExprLike]) -> Let:
    return Let(value, body)


def if_(cond: ExprLike, then: ExprLike, other: ExprLike) -> If:
    return If(cond, then, other)


def loop(count: ExprLike, init: ExprLike, body: Callable[[Var, Var], ExprLike]) -> Loop:
    return Loop(count, init, body)


def _comp(f: Comb, gs: list[Comb], n: int) -> Comb:
    if f.arity == n and all(g is Proj(n, i) for i, g in enumerate(gs)):
        return f
    return Comp(f, gs)


def _ids(n: int) -> list[Comb]:
    return [Proj(n, i) for i in range(n)]


def compile_expr(e: ExprLike, env: dict, n: int) -> Comb:
    if isinstance(e, bool):
        raise TypeError("booleans are not expressions")
    if isinstance(e, int):
        return Const(n, e)
    if isinstance(e, Var):
        try:
            return Proj(n, env[e])
        except KeyError:
            raise ArityError(f"variable {e.name!r} used outside its scope") from None
    if isinstance(e, App):
        c = e.comb
        if len(e.args) != c.arity:
            raise ArityError(f"combinator of arity {c.arity} given {len(e.args)} arguments")
        if c.arity == 0:
            if isinstance(c, Const):
                return Const(n, c.k)
            raise ArityError("only constants may be applied to no arguments")
        return _comp(c, [compile_expr(a, env, n) for a in e.args], n)
    if isinstance(e, Let):
        v = Var("let")
        inner = compile_expr(e.body(v), {**env, v: n}, n + 1)
        return Comp(inner, _ids(n) + [compile_expr(e.value, env, n)])
    if isinstance(e, If):
        if n == 0:
            raise ArityError("conditionals need at least one variable in scope")
        then = compile_expr(e.then, env, n)
        other = compile_expr(e.other, env, n)
        shifted = Comp(then, [Proj(n + 2, j + 2) for j in range(n)])
        return Comp(Rec(shifted, other), [compile_expr(e.cond, env, n)] + _ids(n))
    if isinstance(e, Loop):
        i, acc = Var("i"), Var("acc")
        inner_env = {v: k + 2 for v, k in env.items()}
        inner_env[i] = 0
        inner_env[acc] = 1
        step = compile_expr(e.body(i, acc), inner_env, n + 2)
        init = compile_expr(e.init, env, n)
        return Comp(Rec(step, init), [compile_expr(e.count, env, n)] + _ids(n))
    raise TypeError(f"not an expression: {e!r}")


def lam(arity: int, fn: Callable[..., ExprLike]) -> Comb:
    """Compile ``fn`` (a Python function of ``arity`` variables) to a combinator."""
    vs = [Var(f"x{i}") for i in range(arity)]
    return compile_expr(fn(*vs), {v: i for i, v in enumerate(vs)}, arity)
