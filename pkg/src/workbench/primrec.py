"""Primitive recursive terms, their Goedel codes, and the dominating diagonal.

Codes::

    #z = 1      #s = 2      #p(i, n) = 2^i * 3^n
    #comp(f; f1..fk) = 5^#f * 7^#f1 * ... * P(k+2)^#fk     (P(0) = 2)
    #rec(g, h) = 3^#g * 5^#h

``decode`` is total: anything that is not the code of an arity-valid term
decodes to the zero function.
"""

from __future__ import annotations

import math
import random
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence, Union

from .errors import ContractError, ParseError
from .outcome import BUDGET_EXCEEDED, Outcome

DEFAULT_BUDGET = 10**6


@dataclass(frozen=True)
class Zero:
    def __str__(self) -> str:
        return "(Z)"


@dataclass(frozen=True)
class Succ:
    def __str__(self) -> str:
        return "(S)"


@dataclass(frozen=True)
class Proj:
    i: int
    n: int

    def __post_init__(self) -> None:
        if not 1 <= self.i <= self.n:
            raise ContractError(f"projection needs 1 <= i <= n, got P({self.i}, {self.n})")

    def __str__(self) -> str:
        return f"(P {self.i} {self.n})"


@dataclass(frozen=True)
class Comp:
    f: "PrTerm"
    args: tuple["PrTerm", ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "args", tuple(self.args))
        if not self.args:
            raise ContractError("composition needs at least one inner function")

    def __str__(self) -> str:
        return "(COMP " + " ".join(str(t) for t in (self.f, *self.args)) + ")"


@dataclass(frozen=True)
class PrimRec:
    g: "PrTerm"
    h: "PrTerm"

    def __str__(self) -> str:
        return f"(REC {self.g} {self.h})"


PrTerm = Union[Zero, Succ, Proj, Comp, PrimRec]

ZERO = Zero()
SUCC = Succ()


def arity(t: PrTerm) -> int | None:
    """Arity of ``t``, or None when some composition/recursion is arity-mismatched."""
    if isinstance(t, (Zero, Succ)):
        return 1
    if isinstance(t, Proj):
        return t.n
    if isinstance(t, Comp):
        if arity(t.f) != len(t.args):
            return None
        inner = {arity(a) for a in t.args}
        if len(inner) != 1 or None in inner:
            return None
        return inner.pop()
    if isinstance(t, PrimRec):
        n = arity(t.g)
        if n is None or arity(t.h) != n + 2:
            return None
        return n + 1
    raise TypeError(f"not a primitive recursive term: {t!r}")


def depth(t: PrTerm) -> int:
    """Nesting depth; initial functions have depth 1."""
    if isinstance(t, Comp):
        return 1 + max(depth(s) for s in (t.f, *t.args))
    if isinstance(t, PrimRec):
        return 1 + max(depth(t.g), depth(t.h))
    return 1


# -- primes ----------------------------------------------------------------------

_PRIMES = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47]


def nth_prime(j: int) -> int:
    """The j-th prime counting from nth_prime(0) = 2."""
    while len(_PRIMES) <= j:
        c = _PRIMES[-1] + 2
        while any(c % p == 0 for p in _PRIMES if p * p <= c):
            c += 2
        _PRIMES.append(c)
    return _PRIMES[j]


def _valuation(n: int, p: int) -> tuple[int, int]:
    """(e, n / p^e) with e maximal.  Uses repeated squaring so huge e stays cheap."""
    if n % p:
        return 0, n
    powers = [p]
    while n % (powers[-1] * powers[-1]) == 0:
        powers.append(powers[-1] * powers[-1])
    e = 0
    for k in range(len(powers) - 1, -1, -1):
        if n % powers[k] == 0:
            n //= powers[k]
            e += 1 << k
    return e, n


# -- coding ----------------------------------------------------------------------


def encode(t: PrTerm, max_bits: int | None = None) -> int:
    """Goedel code of ``t``.

    Codes grow as towers of exponents.  With ``max_bits`` set, OverflowError is
    raised as soon as the code is known to need more bits than that.
    """

    def power(p: int, e: int) -> int:
        if max_bits is not None and e * math.log2(p) > max_bits + 1:
            raise OverflowError(f"code exceeds {max_bits} bits")
        return p**e

    def enc(s: PrTerm) -> int:
        if isinstance(s, Zero):
            return 1
        if isinstance(s, Succ):
            return 2
        if isinstance(s, Proj):
            return power(2, s.i) * power(3, s.n)
        if isinstance(s, Comp):
            code = power(5, enc(s.f))
            for j, a in enumerate(s.args):
                code *= power(nth_prime(j + 3), enc(a))
        elif isinstance(s, PrimRec):
            code = power(3, enc(s.g)) * power(5, enc(s.h))
        else:
            raise TypeError(f"not a primitive recursive term: {s!r}")
        if max_bits is not None and code.bit_length() > max_bits:
            raise OverflowError(f"code exceeds {max_bits} bits")
        return code

    return enc(t)


def decode_strict(n: int) -> PrTerm | None:
    """The term whose code is exactly ``n``, or None if ``n`` matches no pattern.

    Only structural validity is checked here; sub-codes are decoded strictly, so
    one bad sub-code rejects the whole code.  Arity is left to the caller.
    """
    if n == 1:
        return ZERO
    if n == 2:
        return SUCC
    if n < 1:
        return None
    e2, rest = _valuation(n, 2)
    if e2:
        e3, rest = _valuation(rest, 3)
        if rest != 1 or e3 == 0 or e2 > e3:
            return None
        return Proj(e2, e3)
    e3, rest = _valuation(rest, 3)
    if e3:
        e5, rest = _valuation(rest, 5)
        if rest != 1 or e5 == 0:
            return None
        g, h = decode_strict(e3), decode_strict(e5)
        if g is None or h is None:
            return None
        return PrimRec(g, h)
    e5, rest = _valuation(rest, 5)
    if not e5:
        return None
    head = decode_strict(e5)
    if head is None:
        return None
    args = []
    j = 3
    while rest != 1:
        e, rest = _valuation(rest, nth_prime(j))
        if e == 0:
            # gap in the prime sequence, or a foreign prime factor
            return None
        a = decode_strict(e)
        if a is None:
            return None
        args.append(a)
        j += 1
    if not args:
        return None
    return Comp(head, tuple(args))


def is_code(n: int) -> bool:
    t = decode_strict(n)
    return t is not None and arity(t) is not None


def decode(n: int) -> PrTerm:
    t = decode_strict(n)
    if t is None or arity(t) is None:
        return ZERO
    return t


@lru_cache(maxsize=4096)
def nu(n: int) -> PrTerm:
    """The n-th function of the enumeration (zero function for non-codes, incl. 0)."""
    return decode(n)


# -- evaluation --------------------------------------------------------------------


@dataclass(frozen=True)
class EvalBudget:
    max_steps: int = DEFAULT_BUDGET

    def __post_init__(self) -> None:
        if self.max_steps < 1:
            raise ContractError(f"budget must be at least 1 step, got {self.max_steps}")


class _OutOfBudget(Exception):
    pass


class _Meter:
    __slots__ = ("left",)

    def __init__(self, steps: int):
        self.left = steps

    def tick(self) -> None:
        self.left -= 1
        if self.left < 0:
            raise _OutOfBudget


def _as_budget(budget: EvalBudget | int | None) -> EvalBudget:
    if budget is None:
        return EvalBudget()
    if isinstance(budget, EvalBudget):
        return budget
    return EvalBudget(int(budget))


def _apply(t: PrTerm, args: Sequence[int], meter: _Meter) -> int:
    meter.tick()
    if isinstance(t, Zero):
        return 0
    if isinstance(t, Succ):
        return args[0] + 1
    if isinstance(t, Proj):
        return args[t.i - 1]
    if isinstance(t, Comp):
        inner = [_apply(a, args, meter) for a in t.args]
        return _apply(t.f, inner, meter)
    # PrimRec: recursion runs on the last argument
    *xs, last = args
    value = _apply(t.g, xs, meter)
    for k in range(last):
        meter.tick()
        value = _apply(t.h, [value, *xs, k], meter)
    return value


def evaluate(t: PrTerm, args: Sequence[int], budget: EvalBudget | int | None = None) -> int | Outcome:
    """Call-by-value evaluation; returns BUDGET_EXCEEDED when the step budget runs out.

    One step is charged per node application plus one per recursion unrolling.
    """
    n = arity(t)
    if n is None:
        raise ContractError(f"term {t} has invalid arity")
    if len(args) != n:
        raise ContractError(f"term {t} has arity {n} but got {len(args)} arguments")
    if any(not isinstance(a, int) or a < 0 for a in args):
        raise ContractError(f"arguments must be natural numbers, got {list(args)}")
    meter = _Meter(_as_budget(budget).max_steps)
    try:
        return _apply(t, list(args), meter)
    except _OutOfBudget:
        return BUDGET_EXCEEDED


def rho(i: int, x: int, budget: EvalBudget | int | None = None) -> int | Outcome:
    """Unarized enumeration: nu_i applied to x repeated arity(nu_i) times."""
    t = nu(i)
    return evaluate(t, [x] * arity(t), budget)


def dominator(x: int, budget: EvalBudget | int | None = None) -> int | Outcome:
    """max_{i <= x} rho(i, x) + 1.  The budget applies to each rho evaluation."""
    best = 0
    for i in range(x + 1):
        v = rho(i, x, budget)
        if v is BUDGET_EXCEEDED:
            return BUDGET_EXCEEDED
        best = max(best, v)
    return best + 1


@dataclass
class DominationReport:
    m: int
    range_checked: tuple[int, int]
    violations: list[int]
    budget_exhausted_at: list[int]

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "range_checked": list(self.range_checked),
            "violations": self.violations,
            "budget_exhausted_at": self.budget_exhausted_at,
        }


def check_domination(m: int, x_range: tuple[int, int], budget: EvalBudget | int | None = None) -> DominationReport:
    """Compare dominator(x) with rho(m, x) for every x >= m in the inclusive range."""
    lo, hi = x_range
    if lo > hi:
        raise ContractError(f"empty range [{lo}, {hi}]")
    budget = _as_budget(budget)
    violations, exhausted = [], []
    for x in range(max(lo, m), hi + 1):
        d = dominator(x, budget)
        r = rho(m, x, budget)
        if d is BUDGET_EXCEEDED or r is BUDGET_EXCEEDED:
            exhausted.append(x)
        elif d <= r:
            violations.append(x)
    return DominationReport(m, (lo, hi), violations, exhausted)


def diagonal_out(fs: Sequence[Sequence[int | Outcome]], n_max: int) -> tuple[int | Outcome, ...]:
    """Two-valued diagonal: out(n) = 0 if fs[n](n) != 0 else 1, for n in [0, n_max].

    Missing tables (n >= len(fs)) count as the zero function.  A budget marker
    at fs[n][n] is passed through.
    """
    out = []
    for n in range(n_max + 1):
        if n >= len(fs):
            out.append(1)
            continue
        table = fs[n]
        if len(table) <= n_max:
            raise ContractError(f"table {n} is not total on [0, {n_max}]")
        v = table[n]
        out.append(v if v is BUDGET_EXCEEDED else (0 if v != 0 else 1))
    return tuple(out)


def rho_tables(n_max: int, budget: EvalBudget | int | None = None) -> list[list[int | Outcome]]:
    """Tables of rho_0 .. rho_{n_max} on [0, n_max]."""
    return [[rho(i, x, budget) for x in range(n_max + 1)] for i in range(n_max + 1)]


# -- random terms ------------------------------------------------------------------


def random_term(
    rng: random.Random, max_depth: int = 4, arity_: int | None = None, exact: bool = False
) -> PrTerm:
    """A random arity-valid term of depth <= max_depth (== max_depth when ``exact``)."""
    if arity_ is None:
        arity_ = rng.randint(1, 3)
    if max_depth <= 1 or (not exact and rng.random() < 0.35):
        choices: list[PrTerm] = [Proj(rng.randint(1, arity_), arity_)]
        if arity_ == 1:
            choices += [ZERO, SUCC]
        return rng.choice(choices)
    if arity_ >= 2 and rng.random() < 0.4:
        deep = rng.randrange(2)
        return PrimRec(
            random_term(rng, max_depth - 1, arity_ - 1, exact and deep == 0),
            random_term(rng, max_depth - 1, arity_ + 1, exact and deep == 1),
        )
    k = rng.randint(1, 3)
    deep = rng.randrange(k + 1)
    return Comp(
        random_term(rng, max_depth - 1, k, exact and deep == 0),
        tuple(random_term(rng, max_depth - 1, arity_, exact and deep == j + 1) for j in range(k)),
    )


def random_encodable_term(
    rng: random.Random, max_depth: int = 4, max_bits: int = 1 << 17, attempts: int = 10_000
) -> tuple[PrTerm, int]:
    """Random term of depth <= max_depth whose code fits in ``max_bits``; returns (term, code).

    A target depth is drawn uniformly from 1..max_depth and terms of exactly that
    depth are rejection-sampled; targets with no encodable draw fall back to a
    fresh target.  Codes of depth-4 terms never fit any practical bound.
    """
    for _ in range(attempts):
        target = rng.randint(1, max_depth)
        t = random_term(rng, target, exact=True)
        try:
            return t, encode(t, max_bits=max_bits)
        except OverflowError:
            continue
    raise RuntimeError(f"no encodable term found in {attempts} attempts")


# -- S-expression format -----------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\()|(\))|([A-Za-z]+|\d+))")


def format_term(t: PrTerm) -> str:
    return str(t)


def parse_term(text: str) -> PrTerm:
    tokens: list[tuple[str, int]] = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos:].lstrip()[:1]!r}", position=pos)
        tokens.append((m.group(m.lastindex), m.start(m.lastindex)))
        pos = m.end()
    it = iter(tokens + [("", len(text))])
    cur = [next(it)]

    def advance():
        cur[0] = next(it)

    def expect(tok: str):
        if cur[0][0] != tok:
            raise ParseError(f"expected {tok!r}, found {cur[0][0] or 'end of input'!r}", position=cur[0][1])
        advance()

    def number() -> int:
        tok, p = cur[0]
        if not tok.isdigit():
            raise ParseError(f"expected a number, found {tok or 'end of input'!r}", position=p)
        advance()
        return int(tok)

    def term() -> PrTerm:
        expect("(")
        head, p = cur[0]
        advance()
        if head == "Z":
            t: PrTerm = ZERO
        elif head == "S":
            t = SUCC
        elif head == "P":
            i, n = number(), number()
            try:
                t = Proj(i, n)
            except ContractError as exc:
                raise ParseError(str(exc), position=p) from None
        elif head == "COMP":
            f = term()
            args = [term()]
            while cur[0][0] == "(":
                args.append(term())
            t = Comp(f, tuple(args))
        elif head == "REC":
            t = PrimRec(term(), term())
        else:
            raise ParseError(f"unknown constructor {head!r}", position=p)
        expect(")")
        return t

    result = term()
    if cur[0][0] != "":
        raise ParseError(f"trailing input {cur[0][0]!r}", position=cur[0][1])
    return result
