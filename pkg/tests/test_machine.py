import itertools

import pytest

from kleene import natnum as nn
from kleene.combinator import C, MalformedComb, Proj, S, evaluate
from kleene.dsl import lam
from kleene.machine import (Machine, as_delay, botM, compose, const0M, const_machine, eval_machine, format_machine,
                            machine_case, machine_compose_kary, machine_mu, machine_of_comb, machine_primrec,
                            parse_machine, run_comb, run_k, succM, zoo)
from kleene.partiality import Bisim, Halted, Pending, bind, bisim, force
from kleene.stdlib import add, double, eq, le, mod2, mul, sndC, to_unary

FUEL = 10**4


def test_run_k_examples():
    assert run_k(succM, 3, 0) == nn.Inl(3)
    assert run_k(succM, 3, 1) == nn.Inr(4)
    assert run_k(succM, 3, 5) == nn.Inr(4)


def test_run_comb_matches_run_k():
    m = zoo()["countdown"]
    for k, x in itertools.product(range(6), range(5)):
        v = evaluate(run_comb(m), (k, x))
        assert nn.sum_case(v) == run_k(m, x, k)


def test_eval_examples():
    assert eval_machine(succM, 3, 10) == Halted(4, 1)
    assert eval_machine(botM, 0, 1000) == Pending(1000)


@pytest.mark.parametrize("name", sorted(zoo()))
def test_fuel_monotone(name):
    m = zoo()[name]
    for x in range(3):
        seen = None
        for fuel in (0, 1, 2, 5, 20, 100):
            out = eval_machine(m, x, fuel)
            if seen is not None:
                assert out == seen
            if isinstance(out, Halted):
                seen = out


def test_compose_examples():
    assert eval_machine(compose(succM, succM), 3, FUEL) == Halted(5, 2)
    assert isinstance(eval_machine(compose(botM, succM), 0, FUEL), Pending)
    left = compose(compose(succM, succM), succM)
    right = compose(succM, compose(succM, succM))
    assert eval_machine(left, 0, FUEL).value == eval_machine(right, 0, FUEL).value == 3


def sample_machines():
    z = zoo()
    return {k: z[k] for k in ("succ", "const0", "bot", "sqrt_mu", "half", "parity_gate", "case_machine")}


@pytest.mark.parametrize("a,b", list(itertools.product(sorted(sample_machines()), repeat=2)))
def test_compose_bisimilar_to_bind(a, b):
    ms = sample_machines()
    m, n = ms[a], ms[b]
    mn = compose(m, n)
    for x in range(6):
        kleisli = bind(lambda v: as_delay(n, v), as_delay(m, x))
        verdict = bisim(as_delay(mn, x), kleisli, 2000)
        assert verdict is not Bisim.DISTINGUISHED
        if verdict is Bisim.UNKNOWN:
            assert isinstance(force(kleisli, 2000), Pending)


def test_compose_steps_add_up():
    m, n = zoo()["countdown"], zoo()["triangle"]
    for x in range(5):
        a = eval_machine(m, x, FUEL)
        b = eval_machine(n, a.value, FUEL)
        assert eval_machine(compose(m, n), x, FUEL) == Halted(b.value, a.steps + b.steps)


def test_machine_of_comb():
    assert eval_machine(machine_of_comb(S), 7, 10) == Halted(8, 1)
    assert eval_machine(machine_of_comb(C(1, 9)), 0, 10) == Halted(9, 1)
    for x in range(6):
        two = compose(machine_of_comb(S), machine_of_comb(double))
        assert eval_machine(two, x, 10).value == evaluate(double, (x + 1,))


even = lam(1, lambda x: eq(mod2(x), 0))


def test_machine_case_examples():
    m = machine_case(even, succM, const0M)
    assert eval_machine(m, 4, FUEL).value == 5
    assert eval_machine(m, 3, FUEL).value == 0
    always = machine_case(C(1, 1), succM, const0M)
    assert [eval_machine(always, x, FUEL).value for x in range(6)] == [x + 1 for x in range(6)]


def test_machine_case_with_machine_predicate():
    m = machine_case(compose(succM, machine_of_comb(even)), const_machine(7), succM)
    assert [eval_machine(m, x, FUEL).value for x in range(6)] == [1, 7, 3, 7, 5, 7]
    stuck = machine_case(botM, succM, succM)
    assert isinstance(eval_machine(stuck, 0, 500), Pending)


square_ge = machine_of_comb(to_unary(lam(2, lambda x, y: le(x, mul(y, y)))))


def test_machine_mu_examples():
    assert eval_machine(machine_mu(square_ge), 10, FUEL).value == 4
    assert isinstance(eval_machine(machine_mu(machine_of_comb(C(1, 0))), 5, FUEL), Pending)
    zero_ok = machine_of_comb(to_unary(lam(2, lambda x, y: eq(y, 0))))
    assert eval_machine(machine_mu(zero_ok), 7, FUEL).value == 0


@pytest.mark.parametrize("x", range(5))
def test_machine_mu_is_least(x):
    r = to_unary(lam(2, lambda x, y: eq(mod2(add(x, y)), 1)))
    out = eval_machine(machine_mu(machine_of_comb(r)), x, FUEL)
    y = out.value
    assert evaluate(r, (nn.pair(x, y),)) == 1
    assert all(evaluate(r, (nn.pair(x, j),)) == 0 for j in range(y))


identity = machine_of_comb(Proj(1, 0))
step_succ = machine_of_comb(lam(1, lambda t: S(sndC(sndC(t)))))  # <x, i, h> -> h + 1


def test_machine_primrec_examples():
    assert eval_machine(machine_primrec(step_succ, identity), nn.pair(2, 3), 10**5).value == 5
    assert eval_machine(machine_primrec(step_succ, machine_of_comb(S)), nn.pair(4, 0), 100).value == 5


@pytest.mark.parametrize("x,y", [(x, y) for x in range(3) for y in range(3)])
def test_machine_primrec_small_grid(x, y):
    # the combinator-level recursion for the same f and g
    rec = lam(2, lambda x, y: add(x, y))
    out = eval_machine(machine_primrec(step_succ, identity), nn.pair(x, y), FUEL)
    assert out.value == evaluate(rec, (x, y))


def test_compose_kary():
    addm = machine_of_comb(to_unary(add))
    assert eval_machine(machine_compose_kary(addm, [succM, succM]), 3, FUEL).value == 8
    dbl = machine_of_comb(double)
    one = machine_compose_kary(succM, [dbl])
    assert [eval_machine(one, x, FUEL).value for x in range(6)] == \
        [eval_machine(compose(dbl, succM), x, FUEL).value for x in range(6)]
    assert isinstance(eval_machine(machine_compose_kary(addm, [succM, botM]), 3, 2000), Pending)


def test_machine_file_roundtrip():
    for name, m in zoo().items():
        assert parse_machine(format_machine(m)) == m, name


@pytest.mark.parametrize("text,msg", [
    ("init: S\n", "missing 'step'"), ("init: S\nstep: S\ninit: S\n", "duplicate"),
    ("init: S\nstep: (comp S [Q])\n", "line 2"), ("init: P 2 0\nstep: S\n", "unary"), ("go: S", "line 1")])
def test_machine_file_errors(text, msg):
    with pytest.raises(MalformedComb, match=msg):
        parse_machine(text)


def test_machine_components_must_be_unary():
    with pytest.raises(ValueError):
        Machine(add, S)
