"""Command-line front end.

Every subcommand prints either plain text or (with ``--format json``) one JSON
object carrying the same fields. Exit status: 0 success, 1 no definite answer
within the budget (pending, unknown), 2 malformed input, 3 resource cap hit.

Machines are given as files in the ``init:`` / ``step:`` format or as
``zoo:<name>`` for the built-in samples. Combinators use the bracket grammar
(``(comp S [P 1 0])``) or a standard-library name such as ``add``.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Callable, Optional, Sequence

import gmpy2

from . import godel, rectheory, universal
from .combinator import DEFAULT_METER, ArityError, Comb, MalformedComb, ResourceExhausted, evaluate, parse_comb, show
from .machine import Machine, as_delay, compose, eval_machine, format_machine, parse_machine, zoo
from .natnum import CodingError, pair
from .partiality import Bisim, Halted, Pending, bisim
from .stdlib import stdlib

EXIT_OK, EXIT_PENDING, EXIT_MALFORMED, EXIT_RESOURCE = 0, 1, 2, 3


class UsageError(ValueError):
    """Bad command-line input; reported with exit status 2."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # exit 2 with our own wording
        raise UsageError(message)


# -- reading and writing values ---------------------------------------------------------

def _nat(text: str) -> int:
    """Decimal natural number; GMP keeps multi-megabit codes fast to read."""
    t = text.strip()
    if not t.isdigit():
        raise UsageError(f"expected a decimal natural number, got {text[:40]!r}")
    return int(gmpy2.mpz(t)) if len(t) > 4000 else int(t)


def _dec(n: int) -> str:
    return str(gmpy2.mpz(n)) if n.bit_length() > 12000 else str(n)


def _read_arg(text: str) -> str:
    """``@path`` reads the argument from a file (codes are often too long for a shell)."""
    if text.startswith("@"):
        try:
            return Path(text[1:]).read_text()
        except OSError as e:
            raise UsageError(f"cannot read {text[1:]}: {e.strerror}") from None
    return text


def _code(text: str) -> int:
    return _nat(_read_arg(text))


def _comb(text: str) -> Comb:
    lib = stdlib()
    if text.strip() in lib:
        return lib[text.strip()]
    return parse_comb(_read_arg(text))


def _machine(ref: str) -> Machine:
    if ref.startswith("zoo:"):
        machines = zoo()
        name = ref[4:]
        if name not in machines:
            raise UsageError(f"no zoo machine {name!r}; known: {', '.join(sorted(machines))}")
        return machines[name]
    try:
        text = Path(ref).read_text()
    except OSError as e:
        raise UsageError(f"cannot read machine file {ref}: {e.strerror}") from None
    try:
        return parse_machine(text)
    except MalformedComb as e:
        raise MalformedComb(f"{ref}: {e}") from None


def _outcome(out) -> tuple[dict[str, Any], int]:
    if isinstance(out, Halted):
        return {"status": "halted", "value": out.value, "steps": out.steps}, EXIT_OK
    if isinstance(out, Pending):
        return {"status": "pending", "fuel": out.fuel_spent}, EXIT_PENDING
    return {"status": "malformed", "reason": out.reason}, EXIT_MALFORMED


def _text(result: dict[str, Any]) -> str:
    """Text rendering: a leading status word, then ``key=value`` for the rest."""
    if set(result) == {"value"}:
        v = result["value"]
        return _dec(v) if isinstance(v, int) else str(v)
    if set(result) == {"machine"}:
        return result["machine"].rstrip("\n")
    parts = []
    for k, v in result.items():
        if k == "status":
            parts.append(str(v))
        elif k == "value":
            parts.append(_dec(v) if isinstance(v, int) else str(v))
        elif k == "machine":
            parts.append("\n" + v.rstrip("\n"))
        else:
            parts.append(f"{k}={_dec(v) if isinstance(v, int) else v}")
    return " ".join(parts).replace(" \n", "\n")


def _json(result: dict[str, Any]) -> str:
    """One flat object; integers are written through :func:`_dec` so huge codes stay fast."""
    fields = (f"{json.dumps(k)}: {_dec(v) if isinstance(v, int) else json.dumps(v)}" for k, v in result.items())
    return "{" + ", ".join(fields) + "}"


# -- subcommands ---------------------------------------------------------------------------

Result = tuple[dict[str, Any], int]


def cmd_eval(a) -> Result:
    c = _comb(a.comb)
    args = [_nat(x) for x in a.args]
    if len(args) != c.arity:
        raise ArityError(f"combinator of arity {c.arity} applied to {len(args)} arguments")
    return {"value": evaluate(c, args, meter=a.meter)}, EXIT_OK


def cmd_run(a) -> Result:
    return _outcome(eval_machine(_machine(a.machine), _nat(a.x), a.fuel, meter=a.meter))


def cmd_encode(a) -> Result:
    if a.machine:
        return {"value": godel.encode_machine(_machine(a.term))}, EXIT_OK
    return {"value": godel.encode_comb(_comb(a.term))}, EXIT_OK


def cmd_decode(a) -> Result:
    code = _code(a.code)
    if a.machine:
        return {"machine": format_machine(godel.decode_machine(code))}, EXIT_OK
    return {"value": show(godel.decode_comb(code))}, EXIT_OK


def cmd_compose(a) -> Result:
    return {"machine": format_machine(compose(_machine(a.m1), _machine(a.m2)))}, EXIT_OK


def cmd_smn(a) -> Result:
    return {"value": universal.smn(_code(a.code), _nat(a.x))}, EXIT_OK


def cmd_bracket(a) -> Result:
    out = godel.bracket(_code(a.code), _nat(a.x), a.fuel, meter=a.meter)
    res, status = _outcome(out)
    res.pop("steps", None)
    return res, status


def cmd_witness(a) -> Result:
    e, x = _code(a.code), _nat(a.x)
    godel.decode_machine(e)
    w = godel.produce_witness(e, x, a.fuel, meter=a.meter)
    if w is None:
        return {"status": "pending", "fuel": a.fuel}, EXIT_PENDING
    return {"value": w}, EXIT_OK


def cmd_check_witness(a) -> Result:
    w = _code(a.w)
    ok = godel.kleene_t(_code(a.code), _nat(a.x), w)
    res: dict[str, Any] = {"status": "valid" if ok else "invalid"}
    if ok:
        res["value"] = godel.kleene_u(w)
    return res, EXIT_OK


def cmd_bisim(a) -> Result:
    d1 = as_delay(_machine(a.m1), _nat(a.x1), meter=a.meter)
    d2 = as_delay(_machine(a.m2), _nat(a.x2), meter=a.meter)
    verdict = bisim(d1, d2, a.fuel)
    return {"status": str(verdict)}, EXIT_PENDING if verdict is Bisim.UNKNOWN else EXIT_OK


def cmd_universal(a) -> Result:
    u = universal.build_universal()
    return _outcome(eval_machine(u, pair(_code(a.code), _nat(a.x)), a.fuel, meter=a.meter))


def cmd_fixedpoint(a) -> Result:
    return {"value": universal.rogers_fixed_point(_machine(a.machine), fuel=a.fuel, meter=a.meter)}, EXIT_OK


def cmd_srt(a) -> Result:
    return {"value": universal.kleene_srt(_machine(a.machine), fuel=a.fuel, meter=a.meter)}, EXIT_OK


def cmd_refute(a) -> Result:
    report = universal.halting_refuter(_machine(a.machine), a.fuel, meter=a.meter)
    v = report.verdict
    res: dict[str, Any] = {"status": "refuted" if report.refuted else "consistent", "target": report.target_code}
    if isinstance(v, universal.Refuted):
        res["reason"] = v.reason
    res["claimed"] = _outcome(v.evidence.claimed)[0]["status"]
    if isinstance(v.evidence.claimed, Halted):
        res["claimed_value"] = v.evidence.claimed.value
    if v.evidence.observed is not None:
        res["observed"] = _outcome(v.evidence.observed)[0]["status"]
    res["fuel"] = v.evidence.fuel
    return res, EXIT_OK


def cmd_rosolini(a) -> Result:
    alpha = rectheory.machine_to_rosolini(_machine(a.machine), _nat(a.x), meter=a.meter)
    k = alpha.witness(a.fuel + 1)
    if k is None:
        return {"status": "zeros", "probed": a.fuel + 1}, EXIT_PENDING
    return {"status": "one", "index": k}, EXIT_OK


def cmd_dom2ran(a) -> Result:
    return {"machine": format_machine(rectheory.domain_to_range(_machine(a.machine)))}, EXIT_OK


def cmd_ran2dom(a) -> Result:
    return {"machine": format_machine(rectheory.range_to_domain(_machine(a.machine)))}, EXIT_OK


def cmd_decide(a) -> Result:
    m = rectheory.re_and_core_to_rec(_machine(a.m_a), _machine(a.m_co))
    out = eval_machine(m, _nat(a.x), a.fuel, meter=a.meter)
    if isinstance(out, Halted):
        return {"status": "member" if out.value == 1 else "nonmember", "steps": out.steps}, EXIT_OK
    return _outcome(out)


# -- argument parsing -------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--fuel", type=_nat, default=10**4, help="machine steps (default 10000)")
    common.add_argument("--meter", type=_nat, default=DEFAULT_METER,
                        help="combinator primitives per evaluation (default 10^8)")
    common.add_argument("--format", choices=("text", "json"), default="text")

    p = _Parser(prog="kleene", description="Primitive recursive combinators, recursive machines and codes.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name: str, fn: Callable, help: str, *args: str, **flags) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, parents=[common], help=help)
        for arg in args:
            if arg.endswith("..."):
                sp.add_argument(arg[:-3], nargs="*")
            else:
                sp.add_argument(arg)
        for flag, text in flags.items():
            sp.add_argument(f"--{flag}", action="store_true", help=text)
        sp.set_defaults(fn=fn)
        return sp

    add("eval", cmd_eval, "evaluate a combinator", "comb", "args...")
    add("run", cmd_run, "run a machine on an input", "machine", "x")
    add("encode", cmd_encode, "code of a combinator (or, with --machine, of a machine)", "term",
        machine="treat the argument as a machine file or zoo:<name>")
    add("decode", cmd_decode, "combinator (or machine) with the given code", "code",
        machine="decode a machine code")
    add("compose", cmd_compose, "sequential composition of two machines", "m1", "m2")
    add("smn", cmd_smn, "code of y -> {e}<x, y>", "code", "x")
    add("bracket", cmd_bracket, "run the machine with the given code", "code", "x")
    add("witness", cmd_witness, "normal-form witness for a halting run", "code", "x")
    add("check-witness", cmd_check_witness, "verify a witness with the T predicate", "code", "x", "w")
    add("bisim", cmd_bisim, "compare two runs by final value", "m1", "x1", "m2", "x2")
    add("universal", cmd_universal, "run the arithmetized universal machine", "code", "x")
    add("fixedpoint", cmd_fixedpoint, "Rogers fixed point of a code transformer", "machine")
    add("srt", cmd_srt, "second recursion theorem: p with {p}(y) = f<p, y>", "machine")
    add("refute", cmd_refute, "diagonal test of a purported halting decider", "machine")
    add("rosolini", cmd_rosolini, "index of the 1 in the halting sequence", "machine", "x")
    add("re-dom2ran", cmd_dom2ran, "machine whose range is the domain of the given one", "machine")
    add("re-ran2dom", cmd_ran2dom, "machine whose domain is the range of the given one", "machine")
    add("re-decide", cmd_decide, "decide membership from a set and complement enumeration", "m_a", "m_co", "x")
    return p


def run_cli(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    if hasattr(sys, "set_int_max_str_digits"):
        sys.set_int_max_str_digits(0)
    try:
        args = build_parser().parse_args(argv)
        result, status = args.fn(args)
    except UsageError as e:
        print(f"error: {e}", file=err)
        return EXIT_MALFORMED
    except (MalformedComb, ArityError, CodingError, ValueError) as e:
        print(f"malformed: {e}", file=err)
        return EXIT_MALFORMED
    except (ResourceExhausted, RecursionError, MemoryError, universal.DivergenceError) as e:
        print(f"resource cap: {e}", file=err)
        return EXIT_RESOURCE
    print(_json(result) if args.format == "json" else _text(result), file=out)
    return status


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
