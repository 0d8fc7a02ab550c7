"""Primality and factor search for the Euclid instance.

Miller-Rabin is deterministic below 2**64 with the first twelve prime bases;
above that the same test is probabilistic and reported as such.
"""

from __future__ import annotations

import math
import random

MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
DETERMINISTIC_LIMIT = 1 << 64
TRIAL_BOUND = 10_000


def is_probable_prime(n: int) -> bool:
    """Miller-Rabin over MR_BASES; exact for n < 2**64."""
    if n < 2:
        return False
    for p in MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def primality_certain(n: int) -> bool:
    return n < DETERMINISTIC_LIMIT


def small_primes(limit: int) -> list[int]:
    """Primes < limit (sieve)."""
    if limit < 3:
        return []
    sieve = bytearray([1]) * limit
    sieve[0] = sieve[1] = 0
    for p in range(2, math.isqrt(limit - 1) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytearray(len(range(p * p, limit, p)))
    return [i for i, v in enumerate(sieve) if v]


def trial_divide(n: int, bound: int) -> tuple[list[int], int]:
    """Strip every prime factor < bound; returns (factors with multiplicity, cofactor)."""
    factors = []
    for p in small_primes(bound):
        if p * p > n:
            break
        while n % p == 0:
            factors.append(p)
            n //= p
    if 1 < n < bound:
        factors.append(n)
        n = 1
    return factors, n


def pollard_brent(n: int, rng: random.Random, max_iterations: int) -> int | None:
    """A nontrivial factor of composite odd ``n``, or None after max_iterations."""
    if n % 2 == 0:
        return 2
    for _ in range(8):
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g = r = q = 1
        spent = 0
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            spent += r
            r *= 2
            if spent > max_iterations:
                return None
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
    return None


class Unresolved(Exception):
    """Factor search gave up before reaching a certain answer."""


def factorize(n: int, *, trial_bound: int = TRIAL_BOUND, max_iterations: int = 2_000_000, seed: int = 0) -> list[int]:
    """Sorted prime factors of n >= 1 with multiplicity; raises Unresolved on give-up."""
    if n < 1:
        raise ValueError(f"cannot factor {n}")
    factors, rest = trial_divide(n, trial_bound)
    rng = random.Random(seed)
    stack = [rest] if rest > 1 else []
    while stack:
        m = stack.pop()
        if is_probable_prime(m):
            factors.append(m)
            continue
        d = pollard_brent(m, rng, max_iterations)
        if d is None:
            raise Unresolved(f"could not split {m}")
        stack += [d, m // d]
    return sorted(factors)
