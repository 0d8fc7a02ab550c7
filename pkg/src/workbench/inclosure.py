"""Inclosure candidates (Omega, Theta, delta) and why none of them is valid.

Theta is a set of subsets of Omega (bitmasks); delta maps members of Theta to
element indices of Omega and may be partial when read from a file.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from typing import Iterator, Mapping

from .errors import ContractError, ParseError, WorkbenchError
from .schema import BOOL, NEG, DiagonalInstance, FiniteCarrier, schema_report

OMEGA_IN_THETA = "omega_in_theta"
DELTA_TOTAL = "delta_total"
DELTA_ESCAPES = "delta_escapes"
MAX_SWEEP = 3


@dataclass(frozen=True)
class InclosureCandidate:
    omega: FiniteCarrier
    theta: tuple[int, ...]  # sorted masks
    delta: Mapping[int, int]

    def __post_init__(self) -> None:
        full = (1 << len(self.omega)) - 1
        object.__setattr__(self, "theta", tuple(sorted(set(self.theta))))
        for x in self.theta:
            if not 0 <= x <= full:
                raise ContractError(f"{x} is not a subset of Omega")
        for x, v in self.delta.items():
            if not 0 <= v < len(self.omega):
                raise ContractError(f"delta({x}) = {v} is not in Omega")

    @property
    def full_mask(self) -> int:
        return (1 << len(self.omega)) - 1

    def labels(self, mask: int) -> list[str]:
        return [e for j, e in enumerate(self.omega.elements) if mask >> j & 1]


@dataclass(frozen=True)
class ViolationReport:
    condition_violated: str
    subset: int | None = None
    element: int | None = None

    def recheck(self, c: InclosureCandidate) -> bool:
        if self.condition_violated == OMEGA_IN_THETA:
            return c.full_mask not in c.theta
        if self.condition_violated == DELTA_TOTAL:
            return self.subset in c.theta and self.subset not in c.delta
        return c.delta.get(self.subset) == self.element and bool(self.subset >> self.element & 1)

    def to_dict(self, c: InclosureCandidate) -> dict:
        out: dict = {"condition_violated": self.condition_violated}
        if self.subset is not None:
            out["subset"] = c.labels(self.subset)
        if self.element is not None:
            out["element"] = c.omega.elements[self.element]
        return out


def validate(c: InclosureCandidate) -> ViolationReport | None:
    """First violated condition with its witness; None would mean a genuine inclosure."""
    if c.full_mask not in c.theta:
        return ViolationReport(OMEGA_IN_THETA, subset=c.full_mask)
    for x in c.theta:
        if x not in c.delta:
            return ViolationReport(DELTA_TOTAL, subset=x)
    for x in c.theta:
        d = c.delta[x]
        if x >> d & 1:
            return ViolationReport(DELTA_ESCAPES, subset=x, element=d)
    return None


def schema_embedding(c: InclosureCandidate) -> DiagonalInstance:
    """B = Theta, D = {0, 1}, f(X, Y) = 1 iff delta(X) in Y, alpha = neg."""
    if c.full_mask not in c.theta:
        raise ContractError("embedding needs Omega in Theta")
    missing = [x for x in c.theta if x not in c.delta]
    if missing:
        raise ContractError(f"embedding needs delta total on Theta; undefined on {missing}")
    b = FiniteCarrier(tuple("{" + " ".join(c.labels(x)) + "}" for x in c.theta))
    f = tuple(1 if y >> c.delta[x] & 1 else 0 for x in c.theta for y in c.theta)
    return DiagonalInstance(b, BOOL, f, NEG)


def embedding_agrees(c: InclosureCandidate) -> bool:
    """Cross-check validate against the diagonal schema on the embedded instance.

    The embedded g is representable at Omega exactly when delta escapes every X,
    so validate must report delta_escapes precisely when Omega is not among the
    representing columns, and the schema report must stay consistent.
    """
    report = validate(c)
    if report is None or report.condition_violated != DELTA_ESCAPES:
        return False
    inst = schema_embedding(c)
    rep = schema_report(inst)
    omega_label = inst.carrier_b.elements[c.theta.index(c.full_mask)]
    if not rep.consistent or omega_label in rep.representing_indices:
        return False
    # at the reported X, g(X) = 0 while f(X, Omega) = 1
    x_label = inst.carrier_b.elements[c.theta.index(report.subset)]
    return rep.g[inst.carrier_b.index(x_label)] == "0" and inst.f_label(x_label, omega_label) == "1"


def all_candidates(size: int) -> Iterator[InclosureCandidate]:
    """Every (Theta, delta) over Omega = {0..size-1}: Theta by bitmask, delta as digits."""
    omega = FiniteCarrier.of_size(size)
    subsets = range(1 << size)
    for theta_mask in range(1 << (1 << size)):
        theta = tuple(x for x in subsets if theta_mask >> x & 1)
        for values in itertools.product(range(size), repeat=len(theta)):
            yield InclosureCandidate(omega, theta, dict(zip(theta, values)))


def exhaustive_nonexistence(max_size: int) -> dict:
    if not 1 <= max_size <= MAX_SWEEP:
        raise ContractError(f"max_size must be in 1..{MAX_SWEEP}")
    per_size = []
    valid_total = 0
    for size in range(1, max_size + 1):
        counts: Counter[str] = Counter()
        valid = disagreements = candidates = 0
        for c in all_candidates(size):
            candidates += 1
            report = validate(c)
            if report is None:
                valid += 1
                continue
            if not report.recheck(c):
                raise WorkbenchError(f"violation witness does not re-check: {report}")
            counts[report.condition_violated] += 1
            if report.condition_violated != OMEGA_IN_THETA and not embedding_agrees(c):
                disagreements += 1
        valid_total += valid
        per_size.append({
            "size": size,
            "candidates": candidates,
            "valid": valid,
            "violations": {k: counts[k] for k in (OMEGA_IN_THETA, DELTA_TOTAL, DELTA_ESCAPES)},
            "embedding_disagreements": disagreements,
        })
    return {"max_size": max_size, "valid": valid_total, "sizes": per_size}


# -- text format -----------------------------------------------------------------
#
#   Omega = 0 1
#   delta {} = 0
#   delta {0} = 1
#   theta {1}           # member of Theta with no delta value
#
# Theta is every subset mentioned on a delta or theta line.


def parse_candidate(text: str) -> InclosureCandidate:
    omega = None
    entries: list[tuple[str, str, str | None, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("Omega"):
            _, sep, rhs = line.partition("=")
            if not sep:
                raise ParseError("expected 'Omega = ...'", line=lineno)
            omega = FiniteCarrier(tuple(rhs.split()))
            continue
        kind, _, rest = line.partition(" ")
        lhs, sep, rhs = rest.rpartition("=") if kind == "delta" else (rest, "", "")
        if kind not in ("delta", "theta") or (kind == "delta" and not sep):
            raise ParseError(f"unrecognized line {raw!r}", line=lineno)
        subset = lhs.strip()
        if not (subset.startswith("{") and subset.endswith("}")):
            raise ParseError(f"expected a braced subset, got {subset!r}", line=lineno)
        entries.append((kind, subset[1:-1], rhs.strip() or None, lineno))
    if omega is None:
        raise ParseError("candidate needs an 'Omega =' line")
    theta, delta = [], {}
    for kind, members, value, lineno in entries:
        mask = 0
        for label in members.replace(",", " ").split():
            if label not in omega:
                raise ParseError(f"{label!r} is not in Omega", line=lineno)
            mask |= 1 << omega.index(label)
        theta.append(mask)
        if kind == "delta":
            if value not in omega:
                raise ParseError(f"delta value {value!r} is not in Omega", line=lineno)
            delta[mask] = omega.index(value)
    return InclosureCandidate(omega, tuple(theta), delta)
