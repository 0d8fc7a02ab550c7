import itertools
import random

import pytest

from workbench.boolos import (
    BoolosWitness,
    ChoiceMap,
    Woset,
    all_choice_maps,
    anti_diagonal,
    boolos_witness,
    build_max_woset,
    comparability_check,
    enumerate_h_wosets,
    find_collision_partner,
    format_choice_map,
    is_h_woset,
    mask_of,
    parse_choice_map,
    phi_step,
    random_choice_map,
    sweep,
)
from workbench.errors import ConstructionError, ContractError, ParseError
from workbench.schema import FiniteCarrier

A2 = FiniteCarrier.of_size(2)
# h({}) = 0, h({0}) = 1, h({1}) = 0, h({0,1}) = 0
RUNNING = ChoiceMap(A2, (0, 1, 0, 0))


def oracle_anti_diagonal(h):
    subsets = [frozenset(s) for k in range(h.size + 1) for s in itertools.combinations(range(h.size), k)]
    return {h(mask_of(y)) for y in subsets if h(mask_of(y)) not in y}


def test_running_map_anti_diagonal():
    assert anti_diagonal(RUNNING) == 0b11


def test_running_map_collision_partner():
    c, d = find_collision_partner(RUNNING)
    assert d == 0b11
    # least mask wins: {} has h({}) = 0 = h(d) and 0 not in {}
    assert c == 0
    # the hand-scanned partner {1} qualifies too
    assert RUNNING(0b10) == RUNNING(d) and not 0b10 & 1


def test_running_map_max_woset_and_witness():
    w = build_max_woset(RUNNING)
    assert w.order == (0, 1)
    assert RUNNING(w.mask) == 0
    wit = boolos_witness(RUNNING)
    assert wit == BoolosWitness(v=0, w=0b11, collision_point=0)
    assert wit.is_valid(RUNNING)


@pytest.mark.parametrize("size", [1, 2, 3, 4])
@pytest.mark.parametrize("value", [0, -1])
def test_constant_maps(size, value):
    a = FiniteCarrier.of_size(size)
    a0 = value % size
    h = ChoiceMap.constant(a, a0)
    c, d = find_collision_partner(h)
    assert (c, d) == (0, 1 << a0)
    assert build_max_woset(h).order == (a0,)
    assert boolos_witness(h).is_valid(h)


def test_is_h_woset_examples():
    assert is_h_woset(RUNNING, Woset((RUNNING(0),)))
    assert is_h_woset(RUNNING, Woset((0, 1)))
    assert not is_h_woset(RUNNING, Woset((1, 0)))
    assert is_h_woset(RUNNING, Woset())
    assert not is_h_woset(RUNNING, Woset((0, 0)))
    assert not is_h_woset(RUNNING, Woset((5,)))


def test_phi_step():
    assert phi_step(RUNNING, Woset()) == Woset((0,))
    assert phi_step(RUNNING, Woset((0,))) == Woset((0, 1))
    assert phi_step(RUNNING, Woset((0, 1))) == Woset((0, 1))
    with pytest.raises(ContractError):
        phi_step(RUNNING, Woset((1, 0)))


def test_exhaustive_size_three_and_below():
    for size in (1, 2, 3):
        r = sweep(size)
        assert r["maps"] == size ** (2 ** size)
        assert r["witness_failures"] == 0 and r["partner_failures"] == 0


def test_anti_diagonal_matches_oracle_and_invariants():
    for h in itertools.chain(all_choice_maps(2), all_choice_maps(3)):
        d = anti_diagonal(h)
        assert {e for e in range(h.size) if d >> e & 1} == oracle_anti_diagonal(h)
        # h(D) in D, and D is never {h(Y) | ...} minus its own choice
        assert d >> h(d) & 1
        c, _ = find_collision_partner(h)
        assert c != d and h(c) == h(d) and not c >> h(d) & 1


def _brute_max_woset(h):
    return max(enumerate_h_wosets(h), key=len)


@pytest.mark.parametrize("size", [1, 2, 3])
def test_max_woset_is_longest_and_contains_all(size):
    for h in all_choice_maps(size):
        w = build_max_woset(h)
        assert w == _brute_max_woset(h)
        # every h-woset is W or an initial segment of it
        for b in enumerate_h_wosets(h):
            assert b == w or b.is_initial_segment_of(w)
        assert w.mask >> h(w.mask) & 1


def test_max_woset_random_size_four():
    rng = random.Random(4)
    for _ in range(200):
        h = random_choice_map(rng, 4)
        assert build_max_woset(h) == _brute_max_woset(h)
        assert comparability_check(h)


@pytest.mark.parametrize("size", [4, 5])
def test_random_witnesses(size):
    rng = random.Random(size)
    for _ in range(500):
        h = random_choice_map(rng, size)
        wit = boolos_witness(h)
        assert wit.is_valid(h)
        v, w, x = wit.v, wit.w, wit.collision_point
        assert v & w == v and v != w
        assert h(v) == h(w) == x and w >> x & 1 and not v >> x & 1


def test_comparability_exhaustive_small():
    assert all(comparability_check(h) for h in all_choice_maps(2))
    assert all(comparability_check(h) for h in all_choice_maps(3))


def test_invalid_witness_detected():
    assert not BoolosWitness(v=0b11, w=0b11, collision_point=0).is_valid(RUNNING)
    assert not BoolosWitness(v=0b01, w=0b11, collision_point=0).is_valid(RUNNING)


def test_limits():
    with pytest.raises(ConstructionError):
        ChoiceMap(FiniteCarrier.of_size(6), (0,) * 64)
    with pytest.raises(ConstructionError):
        ChoiceMap(A2, (0, 1, 0))
    with pytest.raises(ConstructionError):
        ChoiceMap(A2, (0, 1, 2, 0))
    with pytest.raises(ContractError):
        enumerate_h_wosets(ChoiceMap.constant(FiniteCarrier.of_size(5), 0))
    with pytest.raises(ContractError):
        sweep(4)


def test_text_format_round_trip():
    text = "A = a b\nh {} = a\nh {a} = b\nh {b} = a\nh {a b} = a\n"
    h = parse_choice_map(text)
    assert h == ChoiceMap(FiniteCarrier(("a", "b")), RUNNING.table)
    assert format_choice_map(h) == text
    # comments, commas, any order
    h2 = parse_choice_map("# running map\nA = a b\nh {b,a} = a\nh {b} = a\nh {a} = b\nh {} = a\n")
    assert h2 == h


@pytest.mark.parametrize("text", [
    "h {} = a\n",
    "A = a\nh {} a\n",
    "A = a\nh x = a\n",
    "A = a b\nh {} = a\n",
    "A = a\nh {} = z\n",
])
def test_parse_errors(text):
    with pytest.raises((ParseError, ConstructionError)):
        parse_choice_map(text)
