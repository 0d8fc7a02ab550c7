"""Finite diagonal instances: g = alpha . f . diag and its non-representability.

Every table is stored densely by canonical index so that instances can be
enumerated and serialized exactly.  Labels are opaque strings.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from .errors import ConstructionError, ParseError

MAX_CARRIER = 16


@dataclass(frozen=True)
class FiniteCarrier:
    elements: tuple[str, ...]

    def __post_init__(self) -> None:
        elements = tuple(str(e) for e in self.elements)
        object.__setattr__(self, "elements", elements)
        if not 1 <= len(elements) <= MAX_CARRIER:
            raise ConstructionError(f"carrier size must be in 1..{MAX_CARRIER}, got {len(elements)}")
        if len(set(elements)) != len(elements):
            raise ConstructionError(f"carrier labels are not distinct: {elements}")

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[str]:
        return iter(self.elements)

    def __contains__(self, label: object) -> bool:
        return label in self.elements

    def index(self, label: str) -> int:
        try:
            return self.elements.index(label)
        except ValueError:
            raise ConstructionError(f"unknown label {label!r}; carrier is {list(self.elements)}") from None

    @classmethod
    def of_size(cls, n: int) -> FiniteCarrier:
        return cls(tuple(str(i) for i in range(n)))


BOOL = FiniteCarrier(("0", "1"))
NEG = (1, 0)  # index table of neg on BOOL


@dataclass(frozen=True)
class DiagonalInstance:
    """A carrier B, a value set D, a table f: B x B -> D and an endomap alpha on D.

    ``f`` is row-major by canonical index: ``f[x * |B| + y]`` is the index of
    f(x, y) in D.  ``alpha[d]`` is the index of alpha(d).
    """

    carrier_b: FiniteCarrier
    values_d: FiniteCarrier
    f: tuple[int, ...]
    alpha: tuple[int, ...]

    def __post_init__(self) -> None:
        nb, nd = len(self.carrier_b), len(self.values_d)
        f = tuple(self.f)
        alpha = tuple(self.alpha)
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "alpha", alpha)
        if len(f) != nb * nb:
            raise ConstructionError(f"f must have {nb * nb} entries, got {len(f)}")
        if len(alpha) != nd:
            raise ConstructionError(f"alpha must have {nd} entries, got {len(alpha)}")
        for v in itertools.chain(f, alpha):
            if not (isinstance(v, int) and 0 <= v < nd):
                raise ConstructionError(f"table entry {v!r} is not a valid index into D")

    @classmethod
    def from_labels(
        cls,
        carrier_b: FiniteCarrier | Sequence[str],
        values_d: FiniteCarrier | Sequence[str],
        f: Mapping[tuple[str, str], str] | Callable[[str, str], str],
        alpha: Mapping[str, str] | Callable[[str], str],
    ) -> DiagonalInstance:
        """Build an instance from label-level tables (mappings or callables)."""
        b = carrier_b if isinstance(carrier_b, FiniteCarrier) else FiniteCarrier(tuple(carrier_b))
        d = values_d if isinstance(values_d, FiniteCarrier) else FiniteCarrier(tuple(values_d))
        f_get = f if callable(f) else _lookup(f, "f")
        a_get = alpha if callable(alpha) else _lookup(alpha, "alpha")
        f_idx = tuple(d.index(str(f_get(x, y))) for x in b for y in b)
        a_idx = tuple(d.index(str(a_get(v))) for v in d)
        return cls(b, d, f_idx, a_idx)

    def f_label(self, x: str, y: str) -> str:
        nb = len(self.carrier_b)
        return self.values_d.elements[self.f[self.carrier_b.index(x) * nb + self.carrier_b.index(y)]]

    def alpha_label(self, d: str) -> str:
        return self.values_d.elements[self.alpha[self.values_d.index(d)]]


def _lookup(table: Mapping, name: str):
    def get(*key):
        k = key[0] if len(key) == 1 else key
        try:
            return table[k]
        except KeyError:
            raise ConstructionError(f"{name} is missing an entry for {k!r}") from None

    return get


@dataclass(frozen=True)
class SchemaReport:
    g: tuple[str, ...]
    alpha_fixed_points: frozenset[str]
    representing_indices: frozenset[str]
    consistent: bool

    def to_dict(self) -> dict:
        return {
            "g": list(self.g),
            "alpha_fixed_points": sorted(self.alpha_fixed_points),
            "representing_indices": sorted(self.representing_indices),
            "consistent": self.consistent,
        }


def _diagonal_indices(inst: DiagonalInstance) -> tuple[int, ...]:
    nb = len(inst.carrier_b)
    return tuple(inst.alpha[inst.f[x * nb + x]] for x in range(nb))


def diagonalize(inst: DiagonalInstance) -> tuple[str, ...]:
    """Return g with g(x) = alpha(f(x, x)), as D-labels in B's canonical order."""
    labels = inst.values_d.elements
    return tuple(labels[i] for i in _diagonal_indices(inst))


def fixed_points(alpha: Mapping[str, str] | DiagonalInstance) -> frozenset[str]:
    if isinstance(alpha, DiagonalInstance):
        labels = alpha.values_d.elements
        return frozenset(labels[d] for d, a in enumerate(alpha.alpha) if a == d)
    return frozenset(d for d, a in alpha.items() if a == d)


def find_representing_indices(inst: DiagonalInstance, g: Sequence[str] | Mapping[str, str]) -> frozenset[str]:
    """Columns b of f with f(x, b) = g(x) for every x in B."""
    b = inst.carrier_b
    if isinstance(g, Mapping):
        g = [g[x] for x in b]
    if len(g) != len(b):
        raise ConstructionError(f"g must be total on B ({len(b)} entries), got {len(g)}")
    g_idx = [inst.values_d.index(v) for v in g]
    return frozenset(b.elements[c] for c in _representing(inst, g_idx))


def _representing(inst: DiagonalInstance, g_idx: Sequence[int]) -> list[int]:
    nb = len(inst.carrier_b)
    return [c for c in range(nb) if all(inst.f[x * nb + c] == g_idx[x] for x in range(nb))]


def schema_report(inst: DiagonalInstance) -> SchemaReport:
    g = diagonalize(inst)
    fixed = fixed_points(inst)
    reps = find_representing_indices(inst, g)
    return SchemaReport(
        g=g,
        alpha_fixed_points=fixed,
        representing_indices=reps,
        consistent=bool(fixed) or not reps,
    )


def all_tables(carrier_b: FiniteCarrier, values_d: FiniteCarrier, alpha: Sequence[int]) -> Iterator[DiagonalInstance]:
    """Every f: B x B -> D with the given alpha, in lexicographic index order."""
    nb, nd = len(carrier_b), len(values_d)
    for f in itertools.product(range(nd), repeat=nb * nb):
        yield DiagonalInstance(carrier_b, values_d, f, tuple(alpha))


def sweep(size_b: int, size_d: int, alpha: Sequence[int] | None = None) -> dict:
    """Exhaustive schema_report over all f tables; counts and inconsistent instances.

    ``alpha`` defaults to the cyclic shift d -> d+1 mod |D|, which is fixed-point
    free for |D| >= 2 and equals neg for |D| = 2.
    """
    b, d = FiniteCarrier.of_size(size_b), FiniteCarrier.of_size(size_d)
    if alpha is None:
        alpha = tuple((i + 1) % size_d for i in range(size_d))
    tables = inconsistent = representable = 0
    for inst in all_tables(b, d, alpha):
        tables += 1
        rep = schema_report(inst)
        if not rep.consistent:
            inconsistent += 1
        if rep.representing_indices:
            representable += 1
    return {
        "size_b": size_b,
        "size_d": size_d,
        "alpha": list(alpha),
        "tables": tables,
        "representable": representable,
        "inconsistent": inconsistent,
    }


# -- text format ---------------------------------------------------------------
#
#   B = a b c
#   D = 0 1
#   f a b = 1
#   alpha 0 = 1


def parse_instance(text: str) -> DiagonalInstance:
    b_labels: list[str] | None = None
    d_labels: list[str] | None = None
    f_entries: dict[tuple[str, str], str] = {}
    alpha_entries: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        lhs, sep, rhs = line.partition("=")
        if not sep:
            raise ParseError(f"expected '=' in {raw!r}", line=lineno)
        head = lhs.split()
        value = rhs.split()
        if head == ["B"]:
            b_labels = value
        elif head == ["D"]:
            d_labels = value
        elif len(head) == 3 and head[0] == "f" and len(value) == 1:
            f_entries[(head[1], head[2])] = value[0]
        elif len(head) == 2 and head[0] == "alpha" and len(value) == 1:
            alpha_entries[head[1]] = value[0]
        else:
            raise ParseError(f"unrecognized line {raw!r}", line=lineno)
    if b_labels is None or d_labels is None:
        raise ParseError("instance needs both a 'B =' and a 'D =' line")
    return DiagonalInstance.from_labels(b_labels, d_labels, f_entries, alpha_entries)


def format_instance(inst: DiagonalInstance) -> str:
    lines = ["B = " + " ".join(inst.carrier_b), "D = " + " ".join(inst.values_d)]
    for x in inst.carrier_b:
        for y in inst.carrier_b:
            lines.append(f"f {x} {y} = {inst.f_label(x, y)}")
    for d in inst.values_d:
        lines.append(f"alpha {d} = {inst.alpha_label(d)}")
    return "\n".join(lines) + "\n"


def cantor_instance(family: Mapping[str, Iterable[str]], carrier: FiniteCarrier) -> DiagonalInstance:
    """f(a, a') = 1 iff a in F(a'), alpha = neg, for a family F: A -> P(A)."""
    fam = {k: set(v) for k, v in family.items()}
    return DiagonalInstance.from_labels(
        carrier,
        BOOL,
        lambda a, a2: "1" if a in fam[a2] else "0",
        {"0": "1", "1": "0"},
    )
