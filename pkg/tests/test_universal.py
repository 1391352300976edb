import pytest

from kleene import godel
from kleene import natnum as nn
from kleene import stdlib as L
from kleene import universal as U
from kleene.combinator import P, S, StepState, evaluate, init_state, small_step
from kleene.dsl import lam
from kleene.machine import botM, compose, const_machine, eval_machine, machine_of_comb, succM, zoo
from kleene.partiality import Halted, Pending

addM = machine_of_comb(L.to_unary(L.add))


# -- the step interpreter against the host small-step evaluator ----------------------

def lockstep(c, args, accelerate):
    st = init_state(c, args, accelerate)
    code = U.encode_interp(st)
    while True:
        nxt, r = small_step(st), U.interp_step(code)
        if isinstance(nxt, StepState):
            assert r == nn.sum_inl(U.encode_interp(nxt))
            st, code = nxt, r >> 1
        else:
            assert r == nn.sum_inr(nxt)
            return nxt


@pytest.mark.parametrize("c,args", [
    (S, (3,)), (P(3, 2), (1, 2, 3)), (L.add, (2, 3)), (L.double, (2,)), (L.pred, (3,)), (L.eq, (2, 2))])
@pytest.mark.parametrize("accelerate", [False, True])
def test_interp_step_tracks_small_step(c, args, accelerate):
    assert lockstep(c, args, accelerate) == evaluate(c, args)


def test_interp_roundtrip():
    st = small_step(small_step(init_state(L.add, (2, 3))))
    assert U.decode_interp(U.encode_interp(st)) == st


@pytest.mark.parametrize("junk", [0, 1, 5, nn.seq_encode([9]), nn.seq_encode([1, 2, 0])])
def test_junk_is_stuck(junk):
    assert U.interp_step(junk) == U.STUCK
    assert U.decode_interp(junk) is None


@pytest.mark.parametrize("c", [S, L.pred, L.double, L.mod2, L.triangle])
def test_drive_interp(c):
    for x in range(4):
        value, _ = U.drive_interp(U.init_interp_code(godel.encode_comb(c), x), 10**4)
        assert value == evaluate(c, (x,))


# -- the universal machine ---------------------------------------------------------------

def test_universal_on_succ_and_const():
    u = U.build_universal()
    assert eval_machine(u, nn.pair(godel.encode_machine(succM), 3), 100).value == 4
    assert eval_machine(u, nn.pair(godel.encode_machine(const_machine(7)), 0), 100).value == 7
    assert isinstance(eval_machine(u, nn.pair(godel.encode_machine(botM), 0), 300), Pending)


@pytest.mark.parametrize("name", ["countdown", "succ_succ", "case_even"])
def test_universal_matches_bracket(name):
    u, e = U.build_universal(), godel.encode_machine(zoo()[name])
    for x in range(3):
        assert eval_machine(u, nn.pair(e, x), 10**4).value == godel.bracket(e, x, 100).value


def test_universal_code_is_stable():
    assert U.universal_code() == U.universal_code() == godel.encode_machine(U.build_universal())


# -- S-m-n -------------------------------------------------------------------------------

@pytest.mark.parametrize("x", range(5))
def test_smn_equation_on_add(x):
    e = godel.encode_machine(addM)
    s = U.smn(e, x)
    for y in range(5):
        assert godel.bracket(s, y, 10**4) == godel.bracket(e, nn.pair(x, y), 10**4)


def test_smn_is_primitive_recursive():
    for name in ("succ", "countdown", "case_even"):
        e = godel.encode_machine(zoo()[name])
        for x in range(3):
            assert evaluate(U.smn_comb(), (e, x)) == U.smn(e, x)
            assert evaluate(U.smn_fixed(e), (x,)) == U.smn(e, x)


# -- the halting refuter -------------------------------------------------------------------

def test_refuter_const0():
    rep = U.halting_refuter(const_machine(0), 10**4)
    assert rep.refuted and "halts" in rep.verdict.reason
    assert isinstance(rep.verdict.evidence.observed, Halted)
    assert U.replay(rep, const_machine(0))


def test_refuter_bot():
    rep = U.halting_refuter(botM, 10**3)
    assert rep.refuted and "not total" in rep.verdict.reason
    assert U.replay(rep, botM)


def test_refuter_const1():
    rep = U.halting_refuter(const_machine(1), 10**3)
    assert isinstance(rep.verdict, U.ConsistentWithinFuel) and not rep.refuted
    assert isinstance(rep.verdict.evidence.observed, Pending)
    assert U.replay(rep, const_machine(1))


def test_refuter_non_boolean():
    rep = U.halting_refuter(const_machine(5), 100)
    assert rep.refuted and "0/1" in rep.verdict.reason


def test_replay_rejects_wrong_h():
    rep = U.halting_refuter(const_machine(0), 10**3)
    assert not U.replay(rep, const_machine(1))


def test_diagonal_machine():
    d = U.diagonal_machine(machine_of_comb(lam(1, lambda x: L.mod2(x))))
    assert eval_machine(d, 2, 100).value == 0
    assert isinstance(eval_machine(d, 3, 100), Pending)


# -- recursion theorem ---------------------------------------------------------------------

def test_rogers_needs_total_f():
    with pytest.raises(U.DivergenceError):
        U.rogers_fixed_point(botM, fuel=50)


def test_rogers_construction_shape():
    # running {n} costs minutes; the acceptance suite does that. Here: n is the specializer applied as designed.
    f = const_machine(godel.encode_machine(succM))
    n = U.rogers_fixed_point(f)
    eg = godel.encode_machine(U.application_machine())
    h = machine_of_comb(U.smn_fixed(eg))
    assert n == U.smn(eg, godel.encode_machine(compose(h, f)))
    assert godel.decode_machine(n).step is U.application_machine().step
