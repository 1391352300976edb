import pytest

from kleene import natnum as nn
from kleene import rectheory as R
from kleene.combinator import S, evaluate
from kleene.dsl import lam
from kleene.machine import (botM, compose, const_machine, eval_machine, machine_mu, machine_of_comb, succM,
                            zoo)
from kleene.partiality import Halted, Pending
from kleene.stdlib import double, eq, mod2, mul, to_unary

evens = machine_mu(machine_of_comb(to_unary(lam(2, lambda x, y: mul(eq(mod2(x), 0), eq(y, 0))))))
evensR = machine_of_comb(double)
oddsR = machine_of_comb(lam(1, lambda k: S(double(k))))

ZOO = sorted(zoo())


# -- domain and range ------------------------------------------------------------------------

def test_domain_to_range_outputs_its_input():
    d = R.domain_to_range(evens)
    assert eval_machine(d, 4, 10**4) == Halted(4, eval_machine(evens, 4, 10**4).steps)
    assert isinstance(eval_machine(d, 3, 10**4), Pending)


def test_range_to_domain_on_succ():
    r = R.range_to_domain(succM)
    out = eval_machine(r, 5, 10**4)
    assert isinstance(out, Halted)
    k, y = nn.unpair(out.value)  # z codes a run of succ ending in 5
    assert eval_machine(succM, y, k) == Halted(5, 1)
    assert isinstance(eval_machine(r, 0, 10**4), Pending)


def test_range_to_domain_on_constant():
    r7 = R.range_to_domain(const_machine(7))
    halting = [x for x in range(11) if isinstance(eval_machine(r7, x, 2000), Halted)]
    assert halting == [7]


def test_presentation_views():
    p = R.REPresentation(evensR, R.Mode.RANGE)
    assert isinstance(p.contains(6, 10**4), Halted)
    assert p.enumerator() is evensR
    q = R.REPresentation(evens, R.Mode.DOMAIN)
    assert q.semidecider() is evens
    assert eval_machine(q.enumerator(), 8, 10**4).value == 8


def test_decider_from_set_and_complement():
    dec = R.re_and_core_to_rec(evensR, oddsR)
    assert [eval_machine(dec, x, 10**5).value for x in range(21)] == [int(x % 2 == 0) for x in range(21)]
    swapped = R.re_and_core_to_rec(oddsR, evensR)
    assert [eval_machine(swapped, x, 10**5).value for x in range(11)] == [x % 2 for x in range(11)]


def test_total_enumeration_has_the_same_range():
    g = R.partial_range_to_total_pr(succM, 1)
    values = {evaluate(g, (z,)) for z in range(200)}
    assert values == set(range(1, max(values) + 1))
    with pytest.raises(ValueError):
        R.partial_range_to_total_pr(succM, -1)


def test_total_enumeration_skips_diverging_points():
    g = R.partial_range_to_total_pr(zoo()["parity_gate"], 0)
    assert {evaluate(g, (z,)) for z in range(300)} <= {0, 2, 4, 6, 8, 10, 12, 14, 16, 18, 20, 22}


# -- Rosolini propositions -----------------------------------------------------------------------

@pytest.mark.parametrize("name", ZOO)
def test_rosolini_witness_is_halting_step(name):
    m = zoo()[name]
    for x in range(4):
        out = eval_machine(m, x, 500)
        w = R.rosolini_witness(m, x, 500)
        assert w == (out.steps if isinstance(out, Halted) else None)


@pytest.mark.parametrize("name", ZOO)
def test_rosolini_at_most_one(name):
    seq = R.machine_to_rosolini(zoo()[name], 1)
    assert sum(seq.prefix(501)) <= 1


def test_rosolini_examples():
    assert R.machine_to_rosolini(succM, 3).witness(10) == 1
    assert R.machine_to_rosolini(compose(succM, succM), 3).witness(100) == 2
    assert R.machine_to_rosolini(botM, 0).witness(500) is None


def test_rosolini_to_machine():
    n4 = machine_of_comb(lam(1, lambda k: eq(k, 4)))
    rm = R.rosolini_to_machine(n4)
    assert eval_machine(rm, 0, 5) == Halted(4, 5)
    assert isinstance(eval_machine(rm, 0, 4), Pending)
    assert isinstance(eval_machine(R.rosolini_to_machine(const_machine(0)), 0, 10**4), Pending)


@pytest.mark.parametrize("name", ["succ", "const7", "pred", "succ_succ", "countdown", "case_even", "bot",
                                  "parity_gate"])
def test_semidecision_roundtrip_preserves_halting(name):
    m = zoo()[name]
    for x in range(3):
        sd = R.machine_to_semidecision(m, x)
        back = eval_machine(R.rosolini_to_machine(sd), 0, 60)
        direct = eval_machine(m, x, 60)
        assert isinstance(back, Halted) == isinstance(direct, Halted)
        if isinstance(direct, Halted):
            assert back.value == direct.steps


def test_halts_within():
    assert R.halts_within(succM, 0, 1)
    assert not R.halts_within(succM, 0, 0)
    assert not R.halts_within(botM, 0, 1000)
