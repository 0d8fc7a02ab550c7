"""Choice maps h: P(A) -> A on small carriers, their anti-diagonal, and h-wosets.

Subsets of A are bitmasks over the carrier's canonical order.  A woset is a
tuple of element indices listed least first.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence

from .errors import ConstructionError, ContractError, ParseError
from .schema import FiniteCarrier

MAX_CHOICE_CARRIER = 5


@dataclass(frozen=True)
class ChoiceMap:
    carrier: FiniteCarrier
    table: tuple[int, ...]  # table[mask] = index of h(subset with that mask)

    def __post_init__(self) -> None:
        n = len(self.carrier)
        object.__setattr__(self, "table", tuple(self.table))
        if n > MAX_CHOICE_CARRIER:
            raise ConstructionError(f"choice maps are limited to |A| <= {MAX_CHOICE_CARRIER}")
        if len(self.table) != 1 << n:
            raise ConstructionError(f"table must cover all {1 << n} subsets, got {len(self.table)}")
        if any(not (isinstance(v, int) and 0 <= v < n) for v in self.table):
            raise ConstructionError("every table value must be an element of A")

    def __call__(self, mask: int) -> int:
        return self.table[mask]

    @property
    def size(self) -> int:
        return len(self.carrier)

    @classmethod
    def from_labels(cls, carrier: FiniteCarrier | Sequence[str], table: Mapping[frozenset[str], str]) -> ChoiceMap:
        a = carrier if isinstance(carrier, FiniteCarrier) else FiniteCarrier(tuple(carrier))
        out = []
        for mask in range(1 << len(a)):
            key = frozenset(subset_labels(a, mask))
            if key not in table:
                raise ConstructionError(f"h is undefined on {set(key) or '{}'}")
            out.append(a.index(table[key]))
        return cls(a, tuple(out))

    @classmethod
    def constant(cls, carrier: FiniteCarrier, value: int) -> ChoiceMap:
        return cls(carrier, (value,) * (1 << len(carrier)))


def subset_labels(carrier: FiniteCarrier, mask: int) -> list[str]:
    return [e for j, e in enumerate(carrier.elements) if mask >> j & 1]


def mask_of(elements: Sequence[int]) -> int:
    m = 0
    for e in elements:
        m |= 1 << e
    return m


def all_choice_maps(size: int) -> Iterator[ChoiceMap]:
    a = FiniteCarrier.of_size(size)
    for table in itertools.product(range(size), repeat=1 << size):
        yield ChoiceMap(a, table)


def random_choice_map(rng: random.Random, size: int) -> ChoiceMap:
    return ChoiceMap(FiniteCarrier.of_size(size), tuple(rng.randrange(size) for _ in range(1 << size)))


# -- anti-diagonal -----------------------------------------------------------------


def anti_diagonal(h: ChoiceMap) -> int:
    """{a | some Y has h(Y) = a and a not in Y}, as a mask."""
    d = 0
    for y in range(1 << h.size):
        a = h(y)
        if not y >> a & 1:
            d |= 1 << a
    return d


def find_collision_partner(h: ChoiceMap) -> tuple[int, int]:
    """(c, d) with d the anti-diagonal and c the least mask with h(c) = h(d) not in c."""
    d = anti_diagonal(h)
    target = h(d)
    assert d >> target & 1, "h(anti-diagonal) must lie in the anti-diagonal"
    for c in range(1 << h.size):
        if h(c) == target and not c >> target & 1:
            return c, d
    raise AssertionError("no collision partner: the anti-diagonal is miscomputed")


# -- wosets ------------------------------------------------------------------------


@dataclass(frozen=True)
class Woset:
    order: tuple[int, ...] = ()

    @property
    def mask(self) -> int:
        return mask_of(self.order)

    def __len__(self) -> int:
        return len(self.order)

    def down_set(self, element: int) -> int:
        """Mask of the elements strictly below ``element``."""
        return mask_of(self.order[: self.order.index(element)])

    def is_initial_segment_of(self, other: Woset) -> bool:
        """Proper initial segment."""
        return len(self.order) < len(other.order) and other.order[: len(self.order)] == self.order


def is_h_woset(h: ChoiceMap, candidate: Woset) -> bool:
    order = candidate.order
    if len(set(order)) != len(order) or any(not 0 <= e < h.size for e in order):
        return False
    below = 0
    for b in order:
        if h(below) != b:
            return False
        below |= 1 << b
    return True


def phi_step(h: ChoiceMap, w: Woset) -> Woset:
    """Append h(W) as a new maximum when it is not already in W."""
    if not is_h_woset(h, w):
        raise ContractError(f"{w.order} is not an h-woset")
    nxt = h(w.mask)
    if w.mask >> nxt & 1:
        return w
    return Woset(w.order + (nxt,))


def build_max_woset(h: ChoiceMap) -> Woset:
    w = Woset()
    for _ in range(h.size + 1):
        nxt = phi_step(h, w)
        if nxt == w:
            return w
        w = nxt
    raise AssertionError("phi iteration did not stabilise within |A| + 1 steps")


@dataclass(frozen=True)
class BoolosWitness:
    v: int
    w: int
    collision_point: int

    def is_valid(self, h: ChoiceMap) -> bool:
        proper_subset = (self.v & ~self.w) == 0 and self.v != self.w
        in_w_not_v = bool(self.w >> self.collision_point & 1) and not self.v >> self.collision_point & 1
        return proper_subset and h(self.v) == h(self.w) == self.collision_point and in_w_not_v


def boolos_witness(h: ChoiceMap) -> BoolosWitness:
    w = build_max_woset(h)
    top = h(w.mask)
    return BoolosWitness(v=w.down_set(top), w=w.mask, collision_point=top)


def enumerate_h_wosets(h: ChoiceMap) -> list[Woset]:
    """Every h-woset, by brute force over all (subset, order) pairs."""
    if h.size > 4:
        raise ContractError("woset enumeration is limited to |A| <= 4")
    found = []
    for k in range(h.size + 1):
        for order in itertools.permutations(range(h.size), k):
            w = Woset(order)
            if is_h_woset(h, w):
                found.append(w)
    return found


def comparability_check(h: ChoiceMap) -> bool:
    """Any two h-wosets: exactly one of B < C, C < B (proper initial segment), B = C."""
    wosets = enumerate_h_wosets(h)
    for b, c in itertools.product(wosets, repeat=2):
        cases = (b.is_initial_segment_of(c), c.is_initial_segment_of(b), b == c)
        if sum(cases) != 1:
            return False
    return True


def sweep(size: int) -> dict:
    """Exhaustive check of both witnesses over every choice map on |A| = size."""
    if size > 3:
        raise ContractError("exhaustive sweeps are limited to |A| <= 3")
    maps = witness_failures = partner_failures = 0
    for h in all_choice_maps(size):
        maps += 1
        if not boolos_witness(h).is_valid(h):
            witness_failures += 1
        c, d = find_collision_partner(h)
        if not (h(c) == h(d) and d >> h(d) & 1 and not c >> h(d) & 1):
            partner_failures += 1
    return {"size": size, "maps": maps, "witness_failures": witness_failures, "partner_failures": partner_failures}


# -- text format -------------------------------------------------------------------
#
#   A = a b
#   h {} = a
#   h {a} = b
#   h {a b} = a


def _subset_text(text: str, lineno: int) -> frozenset[str]:
    text = text.strip()
    if not (text.startswith("{") and text.endswith("}")):
        raise ParseError(f"expected a braced subset, got {text!r}", line=lineno)
    return frozenset(text[1:-1].replace(",", " ").split())


def parse_choice_map(text: str) -> ChoiceMap:
    carrier = None
    table: dict[frozenset[str], str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        lhs, sep, rhs = line.rpartition("=")
        if not sep:
            raise ParseError(f"expected '=' in {raw!r}", line=lineno)
        lhs = lhs.strip()
        if lhs == "A":
            carrier = FiniteCarrier(tuple(rhs.split()))
        elif lhs.startswith("h ") and len(rhs.split()) == 1:
            table[_subset_text(lhs[2:], lineno)] = rhs.strip()
        else:
            raise ParseError(f"unrecognized line {raw!r}", line=lineno)
    if carrier is None:
        raise ParseError("choice map needs an 'A =' line")
    return ChoiceMap.from_labels(carrier, table)


def format_choice_map(h: ChoiceMap) -> str:
    lines = ["A = " + " ".join(h.carrier)]
    for mask in range(1 << h.size):
        lines.append("h {" + " ".join(subset_labels(h.carrier, mask)) + "} = " + h.carrier.elements[h(mask)])
    return "\n".join(lines) + "\n"
