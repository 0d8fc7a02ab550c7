"""Euclid's f(n, m) on n! + 1 and the prime it forces beyond any bound."""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import arith
from .errors import ContractError
from .outcome import UNRESOLVED, Outcome

MAX_N = 64
MAX_BEYOND = 30
MAX_DEMO = 25


def factorial_plus_one(n: int) -> int:
    if not 0 <= n <= MAX_N:
        raise ContractError(f"n must be in 0..{MAX_N}, got {n}")
    return math.factorial(n) + 1


@dataclass(frozen=True)
class FactorWitness:
    n: int
    value: int
    least_prime_factor: int
    fully_factored: bool
    factors: tuple[int, ...] | None
    certain: bool  # False when some reported prime is only a Miller-Rabin probable prime

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "value": str(self.value),
            "least_prime_factor": str(self.least_prime_factor),
            "fully_factored": self.fully_factored,
            "factors": None if self.factors is None else [str(p) for p in self.factors],
            "certain": self.certain,
        }


def least_prime_factor(v: int, **factor_options) -> int | Outcome:
    """Smallest prime dividing v >= 2, or UNRESOLVED if the factor search gives up."""
    if v < 2:
        raise ContractError(f"least prime factor needs v >= 2, got {v}")
    found, rest = arith.trial_divide(v, factor_options.get("trial_bound", arith.TRIAL_BOUND))
    if found:
        return found[0]
    try:
        return arith.factorize(rest, **factor_options)[0]
    except arith.Unresolved:
        return UNRESOLVED


def factor_witness(n: int, **factor_options) -> FactorWitness | Outcome:
    value = factorial_plus_one(n)
    try:
        factors = tuple(arith.factorize(value, **factor_options))
    except arith.Unresolved:
        return UNRESOLVED
    lpf = factors[0]
    # the division check is the certificate; primality is exact below 2**64
    assert value % lpf == 0 and math.prod(factors) == value
    return FactorWitness(
        n=n,
        value=value,
        least_prime_factor=lpf,
        fully_factored=True,
        factors=factors,
        certain=all(arith.primality_certain(p) for p in factors),
    )


def euclid_f(n: int, m: int, **factor_options) -> int | Outcome:
    """1 if every prime factor of n!+1 is < m, 0 if some prime factor is >= m."""
    if m < 0:
        raise ContractError(f"m must be a natural number, got {m}")
    v = factorial_plus_one(n)
    if m <= 2:
        return 0
    bound = min(m, factor_options.get("trial_bound", arith.TRIAL_BOUND))
    _, rest = arith.trial_divide(v, bound)
    if rest < m:
        # every prime factor left is at most rest
        return 1
    if bound == m:
        # all primes below m are gone, so what remains has a factor >= m
        return 0
    if arith.is_probable_prime(rest):
        return 0
    try:
        largest = arith.factorize(rest, **factor_options)[-1]
    except arith.Unresolved:
        return UNRESOLVED
    return 1 if largest < m else 0


def prime_beyond(p: int) -> int | Outcome:
    """A prime strictly greater than p: the least prime factor of p! + 1."""
    if not 0 <= p <= MAX_BEYOND:
        raise ContractError(f"p must be in 0..{MAX_BEYOND}, got {p}")
    return least_prime_factor(factorial_plus_one(p))


def euclid_schema_demo(n_max: int) -> dict:
    """Tabulate F(n) = {x | n >= every prime factor of x!+1} for n, x <= n_max.

    Membership x in F(n) is read off euclid_f(x, n + 1) == 1 (the >= reading of F
    against the strict < reading of f).  The anti-diagonal {n | n not in F(n)}
    should be all of [0, n_max], and g(n) = neg(f(n, n)) should be 1 everywhere.
    """
    if not 0 <= n_max <= MAX_DEMO:
        raise ContractError(f"n_max must be in 0..{MAX_DEMO}, got {n_max}")
    membership: dict[int, list[int]] = {}
    unresolved: list[list[int]] = []
    for x in range(n_max + 1):
        row = []
        for n in range(n_max + 1):
            bit = euclid_f(x, n + 1)
            if bit is UNRESOLVED:
                unresolved.append([x, n])
            elif bit == 1:
                row.append(n)
        membership[x] = row
    anti_diagonal = [n for n in range(n_max + 1) if n not in membership[n] and [n, n] not in unresolved]
    g = []
    for n in range(n_max + 1):
        f_nn = euclid_f(n, n)
        g.append(UNRESOLVED.value if f_nn is UNRESOLVED else 1 - f_nn)
    return {
        "n_max": n_max,
        "membership_reading": "x in F(n) iff n >= every prime factor of x!+1, i.e. f(x, n+1) = 1",
        "f_reading": "f(n, m) = 1 iff every prime factor of n!+1 is < m",
        "members": {str(x): row for x, row in membership.items()},
        "anti_diagonal": anti_diagonal,
        "anti_diagonal_is_everything": anti_diagonal == list(range(n_max + 1)),
        "g_diagonal": g,
        "unresolved": unresolved,
    }
