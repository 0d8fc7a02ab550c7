import random

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from workbench.errors import ContractError, ParseError
from workbench.primrec import (
    BUDGET_EXCEEDED,
    SUCC,
    ZERO,
    Comp,
    EvalBudget,
    PrimRec,
    Proj,
    arity,
    check_domination,
    decode,
    diagonal_out,
    dominator,
    encode,
    evaluate,
    is_code,
    nth_prime,
    nu,
    parse_term,
    random_encodable_term,
    random_term,
    rho,
    rho_tables,
)

ADD = PrimRec(Proj(1, 1), Comp(SUCC, (Proj(1, 3),)))
MUL = PrimRec(Comp(ZERO, (Proj(1, 1),)), Comp(ADD, (Proj(1, 3), Proj(2, 3))))


def oracle_decode(n):
    """Independent decoder from sympy's factorisation, used only for small n."""
    if n == 1:
        return ZERO
    if n == 2:
        return SUCC
    if n < 1:
        return None
    fac = sympy.factorint(n)
    primes = sorted(fac)
    if primes == [2, 3] and fac[2] <= fac[3]:
        return Proj(fac[2], fac[3])
    if primes == [3, 5]:
        g, h = oracle_decode(fac[3]), oracle_decode(fac[5])
        return None if g is None or h is None else PrimRec(g, h)
    if primes and primes[0] == 5 and len(primes) >= 2:
        expected = [sympy.prime(k) for k in range(3, len(primes) + 3)]  # 5, 7, 11, ...
        if primes != expected:
            return None
        parts = [oracle_decode(fac[p]) for p in primes]
        if None in parts:
            return None
        return Comp(parts[0], tuple(parts[1:]))
    return None


def oracle_value(t, args):
    """Direct recursive semantics, no step counting."""
    if t == ZERO:
        return 0
    if t == SUCC:
        return args[0] + 1
    if isinstance(t, Proj):
        return args[t.i - 1]
    if isinstance(t, Comp):
        return oracle_value(t.f, [oracle_value(a, args) for a in t.args])
    *xs, last = args
    if last == 0:
        return oracle_value(t.g, xs)
    return oracle_value(t.h, [oracle_value(t, [*xs, last - 1]), *xs, last - 1])


def oracle_rho(i, x):
    t = oracle_decode(i)
    if t is None or arity(t) is None:
        t = ZERO
    return oracle_value(t, [x] * arity(t))


# -- arity -----------------------------------------------------------------------


def test_arity_examples():
    assert arity(ZERO) == 1
    assert arity(Comp(SUCC, (Proj(1, 2),))) == 2
    assert arity(PrimRec(ZERO, SUCC)) is None
    assert arity(ADD) == 2


def test_arity_rejects_mismatched_composition():
    assert arity(Comp(SUCC, (Proj(1, 1), Proj(1, 1)))) is None
    assert arity(Comp(Proj(1, 2), (Proj(1, 1), Proj(1, 2)))) is None
    assert arity(Comp(Proj(1, 2), (ZERO, SUCC))) == 1


def test_projection_bounds():
    with pytest.raises(ContractError):
        Proj(2, 1)
    with pytest.raises(ContractError):
        Proj(0, 3)


# -- coding ------------------------------------------------------------------------


@pytest.mark.parametrize(
    "term, code",
    [(ZERO, 1), (SUCC, 2), (Proj(1, 1), 6), (Proj(2, 3), 4 * 27), (Comp(SUCC, (Proj(1, 1),)), 5**2 * 7**6)],
)
def test_encode_examples(term, code):
    assert encode(term) == code


def test_encode_uses_consecutive_primes():
    t = Comp(Proj(1, 3), (ZERO, ZERO, SUCC))
    assert encode(t) == 5 ** (2 * 27) * 7 * 11 * 13**2
    assert [nth_prime(j) for j in range(6)] == [2, 3, 5, 7, 11, 13]


@pytest.mark.parametrize("n", [0, 3, 10, 75, 4, 5, 12, 2**3 * 3**2])
def test_non_codes_decode_to_zero(n):
    assert decode(n) == ZERO
    assert not is_code(n)


def test_decode_examples():
    assert decode(6) == Proj(1, 1)
    assert decode(2) == SUCC
    assert decode(35) == Comp(ZERO, (ZERO,))


def test_decode_rejects_gap_in_composition_primes():
    # 5 * 11: argument slot for 7 missing
    assert decode(5 * 11) == ZERO
    # foreign prime 13 after 5 * 7
    assert decode(5 * 7 * 13) == ZERO


def test_decode_agrees_with_sympy_oracle():
    for n in range(0, 5000):
        expected = oracle_decode(n)
        if expected is None or arity(expected) is None:
            expected = ZERO
        assert decode(n) == expected, n


def test_encode_max_bits_guard():
    with pytest.raises(OverflowError):
        encode(ADD, max_bits=1 << 16)


@settings(max_examples=200, deadline=None)
@given(st.randoms(use_true_random=False))
def test_round_trip_property(rng):
    t, code = random_encodable_term(rng)
    assert decode(code) == t
    assert encode(t) == code


# -- evaluation --------------------------------------------------------------------


def test_eval_examples():
    assert evaluate(SUCC, [7]) == 8
    assert evaluate(Comp(SUCC, (SUCC,)), [3]) == 5
    # add(2, 3): add(2,0)=2, then +1 three times
    assert evaluate(ADD, [2, 3]) == 5


def test_eval_against_direct_semantics():
    rng = random.Random(7)
    for _ in range(300):
        t = random_term(rng, 4)
        args = [rng.randint(0, 4) for _ in range(arity(t))]
        assert evaluate(t, args) == oracle_value(t, args)


def test_mul():
    assert evaluate(MUL, [6, 7]) == 42


def test_budget():
    assert evaluate(ADD, [1, 500], 100) is BUDGET_EXCEEDED
    assert evaluate(SUCC, [1], EvalBudget(1)) == 2
    assert evaluate(Comp(SUCC, (SUCC,)), [1], 2) is BUDGET_EXCEEDED
    with pytest.raises(ContractError):
        EvalBudget(0)


def test_eval_is_deterministic():
    assert evaluate(MUL, [9, 9], 5000) == evaluate(MUL, [9, 9], 5000)
    assert evaluate(MUL, [90, 90], 5000) is evaluate(MUL, [90, 90], 5000)


def test_eval_contract_errors():
    with pytest.raises(ContractError):
        evaluate(SUCC, [1, 2])
    with pytest.raises(ContractError):
        evaluate(PrimRec(ZERO, SUCC), [1, 2])
    with pytest.raises(ContractError):
        evaluate(SUCC, [-1])


# -- enumeration and domination ----------------------------------------------------


def test_nu():
    assert nu(0) == ZERO
    assert nu(1) == ZERO
    assert nu(2) == SUCC


def test_rho_examples():
    assert rho(2, 4) == 5
    assert rho(6, 9) == 9
    assert rho(3, 100) == 0
    # 18 = 2 * 3^2 codes p(1, 2)
    assert rho(18, 11) == 11


def test_rho_matches_oracle():
    for i in range(0, 200):
        for x in (0, 1, 5):
            assert rho(i, x) == oracle_rho(i, x), (i, x)


def test_dominator_examples():
    assert dominator(0) == 1
    assert dominator(2) == 4
    assert dominator(6) == 8


def test_dominator_matches_oracle():
    for x in range(0, 40):
        assert dominator(x) == max(oracle_rho(i, x) for i in range(x + 1)) + 1


def test_dominator_lower_bound():
    for x in range(2, 60):
        assert dominator(x) >= x + 2


@pytest.mark.parametrize("m, lo, hi", [(2, 2, 10), (0, 0, 5), (6, 6, 12), (35, 0, 60)])
def test_check_domination(m, lo, hi):
    r = check_domination(m, (lo, hi))
    assert r.violations == [] and r.budget_exhausted_at == []
    assert set(r.violations).isdisjoint(r.budget_exhausted_at)


def test_check_domination_records_budget_cutoffs():
    # nu_35 = z . z costs three steps, every smaller code one step
    r = check_domination(35, (33, 37), budget=2)
    assert r.violations == []
    assert r.budget_exhausted_at == [35, 36, 37]
    assert check_domination(35, (33, 37), budget=3).budget_exhausted_at == []


def test_check_domination_empty_range():
    with pytest.raises(ContractError):
        check_domination(0, (5, 4))


# -- diagonalizing out -------------------------------------------------------------


def test_diagonal_out_over_rho():
    # rho_n(n) for n <= 5, decoded by hand: codes 0, 1, 3, 4, 5 give zero; 2 is s
    expected_diag = [0, 0, 3, 0, 0, 0]
    tables = rho_tables(5)
    assert [tables[n][n] for n in range(6)] == expected_diag
    assert diagonal_out(tables, 5) == (1, 1, 0, 1, 1, 1)


def test_diagonal_out_trivial_tables():
    assert diagonal_out([[0] * 4] * 4, 3) == (1, 1, 1, 1)
    assert diagonal_out([[1] * 4] * 4, 3) == (0, 0, 0, 0)
    assert diagonal_out([[5] * 4], 3) == (0, 1, 1, 1)


def test_diagonal_out_differs_on_the_diagonal():
    rng = random.Random(3)
    for _ in range(50):
        fs = [[rng.randint(0, 3) for _ in range(8)] for _ in range(8)]
        out = diagonal_out(fs, 7)
        assert all(out[i] != fs[i][i] for i in range(8))


def test_diagonal_out_requires_total_tables():
    with pytest.raises(ContractError):
        diagonal_out([[0, 0]], 3)


# -- text format -------------------------------------------------------------------


@pytest.mark.parametrize(
    "text", ["(Z)", "(S)", "(P 2 3)", "(COMP (S) (P 1 1))", "(REC (P 1 1) (COMP (S) (P 1 3)))"]
)
def test_term_text_round_trip(text):
    assert str(parse_term(text)) == text


def test_term_text_round_trip_random():
    rng = random.Random(11)
    for _ in range(200):
        t = random_term(rng, 4)
        assert parse_term(str(t)) == t


@pytest.mark.parametrize("text", ["", "(Q)", "(P 3 2)", "(COMP (S))", "(S) (Z)", "(REC (Z))", "(S", "[S]"])
def test_term_parse_errors(text):
    with pytest.raises(ParseError):
        parse_term(text)
