import math
import random

import pytest
from sympy import factorint, isprime

from workbench import arith
from workbench.errors import ContractError
from workbench.euclid import (
    MAX_N,
    euclid_f,
    euclid_schema_demo,
    factor_witness,
    factorial_plus_one,
    least_prime_factor,
    prime_beyond,
)
from workbench.outcome import UNRESOLVED


def naive_lpf(v):
    d = 2
    while d * d <= v:
        if v % d == 0:
            return d
        d += 1
    return v


def oracle_f(n, m):
    return 1 if max(factorint(math.factorial(n) + 1)) < m else 0


def test_factorial_plus_one_examples():
    assert factorial_plus_one(4) == 25
    assert factorial_plus_one(0) == 2
    assert factorial_plus_one(3) == 7
    with pytest.raises(ContractError):
        factorial_plus_one(MAX_N + 1)
    with pytest.raises(ContractError):
        factorial_plus_one(-1)


@pytest.mark.parametrize("v, p", [(25, 5), (7, 7), (121, 11), (2, 2), (1 << 61, 2)])
def test_least_prime_factor_examples(v, p):
    assert least_prime_factor(v) == p


def test_least_prime_factor_matches_naive():
    for v in range(2, 3000):
        assert least_prime_factor(v) == naive_lpf(v)
    rng = random.Random(0)
    for _ in range(50):
        v = rng.randrange(2, 10 ** 12)
        assert least_prime_factor(v) == min(factorint(v))


def test_least_prime_factor_precondition():
    with pytest.raises(ContractError):
        least_prime_factor(1)


@pytest.mark.parametrize("n, m, bit", [(4, 9, 1), (4, 5, 0), (3, 8, 1), (4, 6, 1), (0, 3, 1), (0, 2, 0)])
def test_euclid_f_examples(n, m, bit):
    assert euclid_f(n, m) == bit


@pytest.mark.parametrize("n", range(26))
def test_diagonal_is_zero(n):
    assert euclid_f(n, n) == 0


def test_f_four_step_shape():
    assert all(euclid_f(4, m) == 0 for m in range(6))
    assert all(euclid_f(4, m) == 1 for m in range(6, 40))


@pytest.mark.parametrize("n", range(0, 23))
def test_threshold_shape_matches_oracle(n):
    top = max(factorint(factorial_plus_one(n)))
    probes = sorted({0, 1, 2, n, n + 1, top - 1, top, top + 1, top + 2})
    for m in probes:
        if m >= 0:
            assert euclid_f(n, m) == (1 if m > top else 0), (n, m)


@pytest.mark.parametrize("n", range(0, 26))
def test_no_small_divisor_and_lpf_beyond_n(n):
    v = factorial_plus_one(n)
    assert all(v % d for d in range(2, n))
    p = least_prime_factor(v)
    assert p > n and isprime(p) and v % p == 0


def test_factor_witness_matches_sympy():
    for n in range(0, 26):
        w = factor_witness(n)
        expected = factorint(factorial_plus_one(n))
        assert list(w.factors) == sorted(p for p, e in expected.items() for _ in range(e))
        assert w.least_prime_factor == min(expected)
        assert w.fully_factored
        # primality is only deterministic below 2**64
        assert w.certain == all(p < 1 << 64 for p in expected)


@pytest.mark.parametrize("p, q", [(4, 5), (5, 11), (1, 2), (0, 2), (3, 7)])
def test_prime_beyond_examples(p, q):
    assert prime_beyond(p) == q


def test_prime_beyond_all():
    for p in range(31):
        q = prime_beyond(p)
        assert q > p and isprime(q)
    with pytest.raises(ContractError):
        prime_beyond(31)


def test_demo_rows():
    r = euclid_schema_demo(10)
    assert r["anti_diagonal"] == list(range(11))
    assert r["anti_diagonal_is_everything"]
    assert r["g_diagonal"] == [1] * 11
    assert r["members"]["4"] == [n for n in range(11) if n >= 5]
    assert r["members"]["0"] == [n for n in range(11) if n >= 2]
    assert r["unresolved"] == []
    with pytest.raises(ContractError):
        euclid_schema_demo(26)


def test_demo_matches_oracle():
    r = euclid_schema_demo(14)
    for x in range(15):
        top = max(factorint(factorial_plus_one(x)))
        assert r["members"][str(x)] == [n for n in range(15) if n >= top]


def test_unresolved_instead_of_a_guess():
    # 23!+1 has two large prime factors; a starved search cannot split it
    v = factorial_plus_one(23)
    options = {"trial_bound": 10, "max_iterations": 1}
    assert least_prime_factor(v, **options) is UNRESOLVED
    assert factor_witness(23, **options) is UNRESOLVED
    assert euclid_f(23, 10 ** 6, **options) is UNRESOLVED
    # the same search with a real budget resolves and agrees with sympy
    assert euclid_f(23, 10 ** 6) == oracle_f(23, 10 ** 6)


def test_miller_rabin_and_pollard():
    primes = [p for p in range(2, 5000) if isprime(p)]
    assert [n for n in range(5000) if arith.is_probable_prime(n)] == primes
    # strong pseudoprimes to small bases
    for n in (2047, 3215031751, 3825123056546413051):
        assert not arith.is_probable_prime(n)
    assert arith.is_probable_prime((1 << 61) - 1)
    rng = random.Random(1)
    n = 1000003 * 1000033
    d = arith.pollard_brent(n, rng, 100000)
    assert d in (1000003, 1000033)
    assert arith.factorize(n) == [1000003, 1000033]
    assert arith.small_primes(30) == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
