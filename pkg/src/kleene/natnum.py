"""Natural-number codings: Cantor pairing, sequences, the beta function, sums.

Sequences use a self-delimiting bit code: each element ``a`` is written as the
Elias-delta word of ``a + 1`` and the words are concatenated into a bitstring
``s``; the code of the sequence is ``2**len(s) + int(s) - 1`` (so the empty
sequence is 0 and every natural number denotes some bitstring). Code size is
linear in the total bit size of the elements, which keeps nested codes
(programs, computation trees) tractable.

Besides the strict host API (which rejects malformed codes) this module exposes
``raw_*`` functions: total arithmetic definitions that agree with the strict
functions on well-formed codes and return fixed junk on malformed ones. They are
the reference semantics for the primitive recursive sequence combinators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import gmpy2


class CodingError(ValueError):
    """A natural number does not decode under the requested coding."""


def _check_nat(*xs: int) -> None:
    for x in xs:
        if not isinstance(x, int) or isinstance(x, bool) or x < 0:
            raise ValueError(f"expected a natural number, got {x!r}")


# -- Cantor pairing ---------------------------------------------------------

# Witness codes run to millions of bits; CPython's quadratic isqrt and
# multiplication dominate there, so large operands go through GMP.
_BIG = 4096


def _isqrt(n: int) -> int:
    return int(gmpy2.isqrt(n)) if n.bit_length() > _BIG else math.isqrt(n)


def triangle(n: int) -> int:
    if n.bit_length() > _BIG:
        return int(gmpy2.mpz(n) * (n + 1) >> 1)
    return n * (n + 1) // 2


def describe(n: int) -> str:
    """``n`` in decimal when short, else just its size: error messages stay readable."""
    return str(n) if n.bit_length() <= 256 else f"<{n.bit_length()}-bit number>"


def pair(a: int, b: int) -> int:
    """Cantor pairing: ``(a+b)(a+b+1)/2 + b``."""
    _check_nat(a, b)
    return triangle(a + b) + b


def unpair(n: int) -> tuple[int, int]:
    _check_nat(n)
    return _unpair(n)


@lru_cache(maxsize=256)  # witnesses are huge and get unpaired repeatedly
def _unpair(n: int) -> tuple[int, int]:
    w = (_isqrt(8 * n + 1) - 1) // 2
    b = n - triangle(w)
    return w - b, b


def fst(n: int) -> int:
    return unpair(n)[0]


def snd(n: int) -> int:
    return unpair(n)[1]


def tuple_encode(xs: Sequence[int]) -> int:
    """Right-nested Cantor tuple of fixed arity ``len(xs) >= 1``."""
    if not xs:
        raise ValueError("fixed-arity tuples need at least one component")
    acc = xs[-1]
    _check_nat(acc)
    for x in reversed(xs[:-1]):
        acc = pair(x, acc)
    return acc


def tuple_decode(n: int, k: int) -> tuple[int, ...]:
    if k < 1:
        raise ValueError("arity must be at least 1")
    out = []
    for _ in range(k - 1):
        a, n = unpair(n)
        out.append(a)
    out.append(n)
    return tuple(out)


# -- sums -----------------------------------------------------------------

@dataclass(frozen=True)
class Inl:
    value: int


@dataclass(frozen=True)
class Inr:
    value: int


def sum_inl(n: int) -> int:
    _check_nat(n)
    return 2 * n


def sum_inr(n: int) -> int:
    _check_nat(n)
    return 2 * n + 1


def sum_case(n: int) -> Inl | Inr:
    _check_nat(n)
    return Inr(n >> 1) if n & 1 else Inl(n >> 1)


# -- sequences ------------------------------------------------------------

def _delta_word(a: int) -> tuple[int, int]:
    """Elias-delta word of ``a + 1`` as ``(bits, length)``."""
    v = a + 1
    n = v.bit_length()
    m = n.bit_length()
    bits = (n << (n - 1)) | (v - (1 << (n - 1)))
    return bits, 2 * m + n - 2


def _make(bits: int, length: int) -> int:
    return (1 << length) + bits - 1


def _split(c: int) -> tuple[int, int]:
    length = (c + 1).bit_length() - 1
    return (c + 1) - (1 << length), length


def seq_encode(xs: Iterable[int]) -> int:
    bits, length = 0, 0
    for a in xs:
        _check_nat(a)
        w, wl = _delta_word(a)
        bits = (bits << wl) | w
        length += wl
    return _make(bits, length)


_CACHE_BITS = 1 << 16  # caching multi-megabit tree codes would pin them in memory


def _bitstring(c: int) -> str:
    s, length = _split(c)
    return format(s, f"0{length}b") if length else ""


_bits_small = lru_cache(maxsize=65536)(_bitstring)
_bits_big = lru_cache(maxsize=8)(_bitstring)


class _IdentityCache:
    """Recently seen huge codes, matched by object identity (hashing them costs a full scan)."""

    def __init__(self, fn, size: int = 16):
        self.fn, self.size, self.entries = fn, size, []

    def __call__(self, c: int):
        for obj, out in self.entries:
            if obj is c:
                return out
        out = self.fn(c)
        self.entries.insert(0, (c, out))
        del self.entries[self.size:]
        return out


_bits_huge = _IdentityCache(_bits_big)


def _bits(c: int) -> str:
    return _bits_small(c) if c.bit_length() <= _CACHE_BITS else _bits_huge(c)


def _val(bits: str, a: int, b: int) -> int:
    seg = bits[a:b]
    return int(seg, 2) if seg else 0


def _word_at(bits: str, p: int) -> tuple[int, int, bool]:
    """The raw parse of one word at ``p``: ``(value, next_p, well_formed)``."""
    length = len(bits)
    if p >= length:
        return 0, p + 1, False
    j = bits.find("1", p)
    z = length - p if j < 0 else j - p
    n = _val(bits, p + z, min(p + 2 * z + 1, length))
    q = p + 2 * z + 1
    k = min(max(n - 1, 0), max(length - q, 0))
    ok = 2 * z + 1 <= length - p and n - 1 <= length - q
    return (1 << k) + _val(bits, q, q + k) - 1, q + k, ok


def _decode_uncached(c: int) -> tuple[int, ...] | None:
    bits = _bits(c)
    out = []
    p = 0
    while p < len(bits):
        v, p, ok = _word_at(bits, p)
        if not ok:
            return None
        out.append(v)
    return tuple(out)


@lru_cache(maxsize=65536)
def _decode_small(c: int) -> tuple[int, ...] | None:
    return _decode_uncached(c)


@lru_cache(maxsize=8)
def _decode_big(c: int) -> tuple[int, ...] | None:
    return _decode_uncached(c)


_decode_huge = _IdentityCache(_decode_big)


def _decode_cached(c: int) -> tuple[int, ...] | None:
    return _decode_small(c) if c.bit_length() <= _CACHE_BITS else _decode_huge(c)


def seq_head(c: int) -> int | None:
    """First element of the sequence coded by ``c``, reading only the leading bits.

    ``None`` when the bitstring is empty or does not start with a complete
    word. Says nothing about the rest of the code.
    """
    _check_nat(c)
    c1 = c + 1
    length = c1.bit_length() - 1

    def top(m: int) -> int:
        return (c1 >> (length - m)) - (1 << m)

    m = min(length, 64)
    while True:
        if m == 0:
            return None
        lead = top(m)
        if lead:
            z = m - lead.bit_length()
            break
        if m == length:
            return None
        m = min(length, 2 * m)
    q = 2 * z + 1
    if q > length:
        return None
    k = top(q) - 1
    if k > length - q:
        return None
    return (1 << k) + (top(q + k) & ((1 << k) - 1)) - 1


def seq_decode(c: int) -> tuple[int, ...]:
    _check_nat(c)
    xs = _decode_cached(c)
    if xs is None:
        raise CodingError(f"{describe(c)} is not a well-formed sequence code")
    return xs


def is_seq(c: int) -> bool:
    return isinstance(c, int) and c >= 0 and _decode_cached(c) is not None


def seq_len(c: int) -> int:
    return len(seq_decode(c))


def seq_proj(c: int, i: int) -> int:
    xs = seq_decode(c)
    if not 0 <= i < len(xs):
        raise IndexError(f"sequence of length {len(xs)} has no index {i}")
    return xs[i]


def seq_concat(c1: int, c2: int) -> int:
    seq_decode(c1)
    seq_decode(c2)
    return raw_seq_concat(c1, c2)


# -- total ("raw") sequence semantics --------------------------------------
#
# These mirror, operation for operation, the primitive recursive definitions in
# the combinator library. For well-formed input they coincide with the strict
# functions above; the cached fast path is taken whenever the code is valid.

def raw_elem_at(c: int, p: int) -> tuple[int, int]:
    """Parse one element starting at bit ``p``: returns ``(value, next_p)``."""
    v, nxt, _ = _word_at(_bits(c), p)
    return v, nxt


def raw_seq_len(c: int) -> int:
    xs = _decode_cached(c)
    if xs is not None:
        return len(xs)
    bits = _bits(c)
    p, count = 0, 0
    while p < len(bits) and count < len(bits):
        p = _word_at(bits, p)[1]
        count += 1
    return count


def raw_seq_pos(c: int, i: int) -> int:
    bits = _bits(c)
    p, j = 0, 0
    while j < i and p < len(bits):
        p = _word_at(bits, p)[1]
        j += 1
    return p + (i - j)  # past the end every word is empty and advances by one


def raw_seq_proj(c: int, i: int) -> int:
    xs = _decode_cached(c)
    if xs is not None:
        return xs[i] if i < len(xs) else 0
    return raw_elem_at(c, raw_seq_pos(c, i))[0]


def raw_seq_last(c: int) -> int:
    return raw_seq_proj(c, max(raw_seq_len(c) - 1, 0))


def raw_seq_pop(c: int) -> int:
    xs = _decode_cached(c)
    if xs is not None:
        return seq_encode(xs[:-1])
    s, length = _split(c)
    p = raw_seq_pos(c, max(raw_seq_len(c) - 1, 0))
    keep = min(p, length)
    return _make(s >> (length - keep), keep)


def raw_seq_tail(c: int) -> int:
    xs = _decode_cached(c)
    if xs is not None:
        return seq_encode(xs[1:])
    s, length = _split(c)
    p = min(raw_elem_at(c, 0)[1], length)
    rest = length - p
    return _make(s & ((1 << rest) - 1), rest)


def raw_seq_concat(c1: int, c2: int) -> int:
    s1, l1 = _split(c1)
    s2, l2 = _split(c2)
    return _make((s1 << l2) | s2, l1 + l2)


def raw_seq_single(a: int) -> int:
    return _make(*_delta_word(a))


# -- nested-pair lists (reference only) ---------------------------------------

def nested_seq_encode(xs: Iterable[int]) -> int:
    """``pair(len, payload)`` with ``payload = pair(a0, pair(a1, ... pair(an, 0)))``.

    Not used by any other module: the code of a list of length ``n`` has
    roughly ``2**n`` times the bits of its elements, far too big for programs.
    """
    xs = list(xs)
    _check_nat(*xs)
    payload = 0
    for a in reversed(xs):
        payload = pair(a, payload)
    return pair(len(xs), payload)


def nested_seq_decode(c: int) -> tuple[int, ...]:
    n, payload = unpair(c)
    out = []
    for _ in range(n):
        a, payload = unpair(payload)
        out.append(a)
    if payload != 0:
        raise CodingError(f"{describe(c)} has a nonzero tail after {n} elements")
    return tuple(out)


# -- Goedel beta function ---------------------------------------------------

def beta(z: int, i: int) -> int:
    """``b mod (1 + (i+1) c)`` where ``(b, c) = unpair(z)``."""
    _check_nat(z, i)
    b, c = unpair(z)
    return b % (1 + (i + 1) * c)


def beta_encode(xs: Sequence[int]) -> int:
    """Some ``z`` with ``beta(z, i) == xs[i]`` for every index (via CRT)."""
    if not xs:
        return 0
    _check_nat(*xs)
    c = math.factorial(max(len(xs), max(xs) + 1))
    b, modulus = 0, 1
    for i, x in enumerate(xs):
        m = 1 + (i + 1) * c
        # solve b' = b (mod modulus), b' = x (mod m)
        t = ((x - b) * pow(modulus, -1, m)) % m
        b += modulus * t
        modulus *= m
    return pair(b, c)
