import itertools
import math

import pytest
from hypothesis import given, settings, strategies as st

from kleene import stdlib as L
from kleene.combinator import (ArityError, C, Comp, Const, MalformedComb, P, Proj, Rec, ResourceExhausted, S,
                               evaluate, flatten, init_state, is_characteristic, parse_comb, run_small, show,
                               small_step, small_step_init, unflatten)
from kleene.dsl import if_, lam, let_, loop

PLAIN: dict = {}  # evaluate with no jets: the defining clauses only

add_lit = Rec(Comp(S, [Proj(3, 1)]), Proj(1, 0))


# -- syntax and arity ----------------------------------------------------------

@pytest.mark.parametrize("c,arity", [
    (S, 1), (P(3, 1), 3), (C(0, 4), 0), (Rec(P(3, 0), S), 2), (Comp(S, [P(2, 1)]), 2)])
def test_arity(c, arity):
    assert c.arity == arity


@pytest.mark.parametrize("build", [
    lambda: P(2, 2), lambda: Comp(S, [P(1, 0), P(1, 0)]), lambda: Comp(L.add, [P(1, 0), P(2, 0)]),
    lambda: Rec(S, S), lambda: Comp(S, [])])
def test_ill_formed_rejected_at_construction(build):
    with pytest.raises(ArityError):
        build()


def test_hash_consing():
    assert Comp(S, [P(2, 1)]) is Comp(S, [P(2, 1)])
    assert P(3, 1) == P(3, 1) and P(3, 1) != P(3, 2)


def test_grammar_roundtrip_on_library():
    for name, c in L.stdlib().items():
        assert parse_comb(show(c)) is c, name


@pytest.mark.parametrize("text,where", [
    ("(comp S [S", "end of input"), ("(comp S [Q])", "position 9"), ("(rec S S)", "position 0"),
    ("P 2", "end of input"), ("S S", "trailing input 'S' at position 2"), ("(frob S)", "unknown form")])
def test_parse_errors_name_token_and_position(text, where):
    with pytest.raises(MalformedComb, match=where):
        parse_comb(text)


def test_flat_code_roundtrip():
    for c in L.stdlib().values():
        code = flatten(c)
        assert unflatten(code) == (c, len(code))


# -- evaluation -------------------------------------------------------------------

def test_eval_examples():
    assert evaluate(S, (3,)) == 4
    assert evaluate(P(3, 1), (5, 7, 9)) == 7
    assert evaluate(add_lit, (2, 3)) == 5
    assert evaluate(C(2, 9), (4, 5)) == 9
    assert evaluate(C(0, 4), ()) == 4


def test_arity_mismatch():
    with pytest.raises(ArityError):
        evaluate(L.add, (1,))


@pytest.mark.parametrize("k", range(11))
def test_recursor_law(k):
    f = lam(3, lambda i, acc, x: add_lit(acc, L.mul(i, x)))
    g = Comp(S, [P(1, 0)])
    r = Rec(f, g)
    for x in range(4):
        assert evaluate(r, (0, x), jets=PLAIN) == evaluate(g, (x,))
        assert evaluate(r, (k + 1, x), jets=PLAIN) == evaluate(f, (k, evaluate(r, (k, x)), x))


def test_meter_trips():
    with pytest.raises(ResourceExhausted):
        evaluate(L.mul, (300, 300), jets=PLAIN, meter=1000)


def test_jets_agree_with_plain_definitions():
    grid = range(6)
    for name, c in L.stdlib().items():
        if name.startswith(("seq_", "code_")) or c.arity > 2:
            continue
        for xs in itertools.product(grid, repeat=c.arity):
            assert evaluate(c, xs) == evaluate(c, xs, jets=PLAIN), (name, xs)


# -- standard library against host arithmetic ------------------------------------

B = range(9)

ORACLES = {
    "add": lambda a, b: a + b, "mul": lambda a, b: a * b, "monus": lambda a, b: max(a - b, 0),
    "pred": lambda a: max(a - 1, 0), "sn": lambda a: int(a > 0), "snbar": lambda a: int(a == 0),
    "le": lambda a, b: int(a <= b), "lt": lambda a, b: int(a < b), "eq": lambda a, b: int(a == b),
    "min": min, "max": max, "double": lambda a: 2 * a, "inr": lambda a: 2 * a + 1,
    "mod2": lambda a: a % 2, "div2": lambda a: a // 2,
    "mod": lambda a, b: a % b if b else a, "div": lambda a, b: a // b if b else 0,
    "triangle": lambda a: a * (a + 1) // 2, "pow2": lambda a: 2**a, "bitlen": lambda a: a.bit_length(),
    "factorial": math.factorial,
    "pair": lambda a, b: (a + b) * (a + b + 1) // 2 + b,
}


@pytest.mark.parametrize("name", sorted(ORACLES))
def test_stdlib_matches_oracle(name):
    c = L.stdlib()[name]
    for xs in itertools.product(B, repeat=c.arity):
        want = ORACLES[name](*xs)
        assert evaluate(c, xs) == want, (name, xs)
        if max(xs, default=0) <= 5:  # unary arithmetic makes bigger plain runs astronomically long
            assert evaluate(c, xs, jets=PLAIN) == want, (name, xs)


def test_unpair_combinators():
    for n in range(60):
        a, b = next((a, b) for a in range(n + 1) for b in range(n + 1) if (a + b) * (a + b + 1) // 2 + b == n)
        assert evaluate(L.fstC, (n,), jets=PLAIN) == a
        assert evaluate(L.sndC, (n,), jets=PLAIN) == b


def test_monus_example():
    assert evaluate(L.monus, (3, 5)) == 0


@pytest.mark.parametrize("p,q", list(itertools.product((0, 1), repeat=2)))
def test_logic_tables(p, q):
    assert evaluate(L.and_, (p, q), jets=PLAIN) == int(p and q)
    assert evaluate(L.or_, (p, q), jets=PLAIN) == int(p or q)
    assert evaluate(L.implies, (p, q), jets=PLAIN) == int((not p) or q)
    assert evaluate(L.not_, (p,), jets=PLAIN) == int(not p)


square_ge_10 = lam(1, lambda k: L.le(10, L.mul(k, k)))
never = C(1, 0)


def test_bounded_min_examples():
    assert evaluate(L.bounded_min(square_ge_10), (10,)) == 4
    assert evaluate(L.bounded_min(never), (3,)) == 3


@pytest.mark.parametrize("n", range(11))
def test_bounded_operators_against_scans(n):
    p = lam(2, lambda k, x: L.eq(L.mod(L.add(k, x), 3), 0))
    f = lam(2, lambda k, x: L.add(k, x))
    for x in range(5):
        hits = [k for k in range(n) if (k + x) % 3 == 0]
        assert evaluate(L.bounded_min(p), (n, x), jets=PLAIN) == (hits[0] if hits else n)
        assert evaluate(L.bounded_exists(p), (n, x)) == int(bool(hits))
        assert evaluate(L.bounded_forall(p), (n, x)) == int(len(hits) == n)
        assert evaluate(L.bounded_sum(f), (n, x)) == sum(k + x for k in range(n))
        assert evaluate(L.bounded_prod(f), (n, x)) == math.prod(k + x for k in range(n))


def test_piecewise_and_sum_case():
    r = lam(1, lambda x: L.mod2(x))
    pw = L.piecewise(r, S, C(1, 0))
    sc = L.sum_caseC(S, L.double)
    for x in range(12):
        assert evaluate(pw, (x,), jets=PLAIN) == (x + 1 if x % 2 else 0)
        assert evaluate(sc, (2 * x,)) == x + 1
        assert evaluate(sc, (2 * x + 1,)) == 2 * x


def test_projections_and_tuples():
    t = L.tupleC(3)
    code = evaluate(t, (4, 5, 6))
    assert [evaluate(L.projC(3, i), (code,)) for i in range(3)] == [4, 5, 6]


@pytest.mark.parametrize("c,args,want", [(L.add, (2, 3), 5), (L.add, (3, 2), 5), (P(2, 0), (4, 9), 4)])
def test_to_unary(c, args, want):
    code = (args[0] + args[1]) * (args[0] + args[1] + 1) // 2 + args[1]
    assert evaluate(L.to_unary(c), (code,)) == want


def test_to_unary_add_on_17():
    # 17 = pair(3, 2); pair(2, 3) is 18. Either way add gives 5.
    assert evaluate(L.to_unary(L.add), (17,)) == 5
    assert evaluate(L.to_unary(L.add), (18,)) == 5


def test_to_unary_identity_on_unary():
    assert L.to_unary(S) is S


@pytest.mark.parametrize("c,bound,expected", [(L.eq, 10, True), (L.add, 10, False), (L.sn, 10, True)])
def test_is_characteristic(c, bound, expected):
    assert is_characteristic(c, bound) is expected


# -- the expression language ----------------------------------------------------

def test_dsl_let_if_loop():
    f = lam(2, lambda x, y: let_(L.add(x, y), lambda s: if_(L.eq(s, 4), 100, loop(s, 1, lambda i, acc: L.mul(acc, 2)))))
    for x, y in itertools.product(range(5), repeat=2):
        assert evaluate(f, (x, y), jets=PLAIN) == (100 if x + y == 4 else 2 ** (x + y))


# -- small steps -----------------------------------------------------------------

@pytest.mark.parametrize("c,args,want", [(S, (3,), 4), (add_lit, (2, 3), 5), (C(2, 9), (4, 5), 9)])
def test_small_step_examples(c, args, want):
    assert run_small(c, args)[0] == want


def test_small_step_touches_one_node_at_a_time():
    st = small_step_init(add_lit, (2, 3))
    depths = []
    while not isinstance(st, int):
        depths.append(len(st.frames))
        st = small_step(st)
    assert st == 5
    assert all(abs(a - b) <= 1 for a, b in zip(depths, depths[1:]))


def test_small_step_arity_checked():
    with pytest.raises(ArityError):
        init_state(L.add, (1, 2, 3))


SMALL_GRID = ["add", "mul", "monus", "pred", "sn", "snbar", "le", "eq", "and", "or", "implies", "double", "mod2",
              "div2", "min", "max"]


@pytest.mark.parametrize("name", SMALL_GRID)
def test_big_step_equals_small_step(name):
    c = L.stdlib()[name]
    for xs in itertools.product(B, repeat=c.arity):
        assert run_small(c, xs)[0] == evaluate(c, xs)
        assert run_small(c, xs, accelerate=True)[0] == evaluate(c, xs)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 6), st.integers(0, 6))
def test_small_step_factorial_and_bounded(a, b):
    assert run_small(L.factorial, (a,))[0] == math.factorial(a)
    bm = L.bounded_min(square_ge_10)
    assert run_small(bm, (a + b,))[0] == evaluate(bm, (a + b,))


# -- the compiled evaluator against the reference recursion ---------------------------

def _both(c, xs, table, budget):
    """Value (or "exhausted") and remaining meter from the compiled and the reference evaluator."""
    from kleene.combinator import _Meter, _eval, _run

    out = []
    for ev in (_run, _eval):
        m = _Meter(budget)
        try:
            out.append((ev(c, xs, table, m), m.left))
        except ResourceExhausted:
            out.append(("exhausted", None))
    return out


@pytest.mark.parametrize("name", ["add", "mul", "monus", "factorial", "eq", "div", "triangle", "pair", "bitlen"])
@pytest.mark.parametrize("jetted", [False, True])
def test_compiled_matches_reference(name, jetted):
    from kleene.combinator import jet_table

    c = L.stdlib()[name]
    table = jet_table() if jetted else PLAIN
    for xs in itertools.product(range(4), repeat=c.arity):
        compiled, reference = _both(c, xs, table, 10**7)
        assert compiled == reference


@pytest.mark.parametrize("budget", range(1, 60))
def test_compiled_meter_trips_at_the_same_point(budget):
    compiled, reference = _both(L.mul, (3, 4), PLAIN, budget)
    assert compiled == reference
