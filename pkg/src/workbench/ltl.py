"""Propositional LTL with next (X) and always (G) over lasso-shaped models.

A lasso is a finite prefix followed by a loop repeated forever, so position n
beyond the prefix reads ``loop[(n - len(prefix)) % len(loop)]``.  Formulas are
evaluated by labelling the ``len(prefix) + len(loop)`` canonical positions with
bitmasks; every natural-number position maps onto one of them.
"""

from __future__ import annotations

import itertools
import random
import re
from dataclasses import dataclass
from typing import Iterator, Union

from .errors import ContractError, ParseError, WorkbenchError

ATOM_RE = re.compile(r"[a-z][a-z0-9_]*\Z")
MAX_ATOMS = 3
MAX_SHAPE = 8  # max_prefix + max_loop


@dataclass(frozen=True)
class Atom:
    name: str

    def __post_init__(self) -> None:
        if not ATOM_RE.match(self.name):
            raise ContractError(f"bad atom name {self.name!r}")


@dataclass(frozen=True)
class Not:
    arg: "Formula"


@dataclass(frozen=True)
class Next:
    arg: "Formula"


@dataclass(frozen=True)
class Always:
    arg: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


Formula = Union[Atom, Not, Next, Always, And, Or, Implies, Iff]
_UNARY = {Not: "!", Next: "X ", Always: "G "}
_BINARY = {Iff: ("<->", 1), Implies: ("->", 2), Or: ("|", 3), And: ("&", 4)}


def atoms_of(phi: Formula) -> list[str]:
    found: set[str] = set()
    stack = [phi]
    while stack:
        node = stack.pop()
        if isinstance(node, Atom):
            found.add(node.name)
        elif isinstance(node, (Not, Next, Always)):
            stack.append(node.arg)
        else:
            stack.extend((node.left, node.right))
    return sorted(found)


def formula_depth(phi: Formula) -> int:
    if isinstance(phi, Atom):
        return 1
    if isinstance(phi, (Not, Next, Always)):
        return 1 + formula_depth(phi.arg)
    return 1 + max(formula_depth(phi.left), formula_depth(phi.right))


# -- printing and parsing --------------------------------------------------------


def _prec(phi: Formula) -> int:
    return _BINARY[type(phi)][1] if type(phi) in _BINARY else 5


def format_formula(phi: Formula) -> str:
    if isinstance(phi, Atom):
        return phi.name
    if type(phi) in _UNARY:
        inner = format_formula(phi.arg)
        if _prec(phi.arg) < 5:
            inner = f"({inner})"
        return _UNARY[type(phi)] + inner
    op, prec = _BINARY[type(phi)]
    left, right = format_formula(phi.left), format_formula(phi.right)
    right_assoc = isinstance(phi, Implies)
    lp, rp = _prec(phi.left), _prec(phi.right)
    if lp < prec or (lp == prec and right_assoc):
        left = f"({left})"
    if rp < prec or (rp == prec and not right_assoc):
        right = f"({right})"
    return f"{left} {op} {right}"


_TOKENS = re.compile(r"\s*(<->|->|[!&|()]|X|G|[a-z][a-z0-9_]*)")


def _tokenize(text: str) -> list[tuple[str, int]]:
    out = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKENS.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", position=pos)
        tok = m.group(1)
        start = m.start(1)
        # X and G are keywords only as standalone letters
        if tok in ("X", "G") and start + 1 < len(text) and (text[start + 1].isalnum() or text[start + 1] == "_"):
            raise ParseError(f"unexpected identifier starting with {tok!r}", position=start)
        out.append((tok, start))
        pos = m.end()
    out.append(("", len(text)))
    return out


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> str:
        return self.tokens[self.i][0]

    @property
    def pos(self) -> int:
        return self.tokens[self.i][1]

    def eat(self, tok: str) -> bool:
        if self.tok == tok:
            self.i += 1
            return True
        return False

    def parse(self) -> Formula:
        phi = self.iff()
        if self.tok:
            raise ParseError(f"unexpected {self.tok!r}", position=self.pos)
        return phi

    def iff(self) -> Formula:
        phi = self.implies()
        while self.eat("<->"):
            phi = Iff(phi, self.implies())
        return phi

    def implies(self) -> Formula:
        phi = self.disj()
        if self.eat("->"):
            return Implies(phi, self.implies())
        return phi

    def disj(self) -> Formula:
        phi = self.conj()
        while self.eat("|"):
            phi = Or(phi, self.conj())
        return phi

    def conj(self) -> Formula:
        phi = self.unary()
        while self.eat("&"):
            phi = And(phi, self.unary())
        return phi

    def unary(self) -> Formula:
        tok, pos = self.tok, self.pos
        if self.eat("!"):
            return Not(self.unary())
        if self.eat("X"):
            return Next(self.unary())
        if self.eat("G"):
            return Always(self.unary())
        if self.eat("("):
            phi = self.iff()
            if not self.eat(")"):
                raise ParseError(f"expected ')', found {self.tok or 'end of input'!r}", position=self.pos)
            return phi
        if tok and ATOM_RE.match(tok):
            self.i += 1
            return Atom(tok)
        raise ParseError(f"expected a formula, found {tok or 'end of input'!r}", position=pos)


def parse(text: str) -> Formula:
    """Parse concrete syntax: ! X G bind tightest, then &, |, -> (right), <->."""
    return _Parser(text).parse()


# -- models ----------------------------------------------------------------------


@dataclass(frozen=True)
class LassoModel:
    atoms: tuple[str, ...]
    prefix: tuple[frozenset[str], ...]
    loop: tuple[frozenset[str], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "atoms", tuple(self.atoms))
        object.__setattr__(self, "prefix", tuple(frozenset(v) for v in self.prefix))
        object.__setattr__(self, "loop", tuple(frozenset(v) for v in self.loop))
        if not self.loop:
            raise ContractError("loop must contain at least one valuation")
        for a in self.atoms:
            Atom(a)
        declared = set(self.atoms)
        for v in self.prefix + self.loop:
            if not v <= declared:
                raise ContractError(f"valuation {sorted(v)} uses undeclared atoms")

    @property
    def size(self) -> int:
        return len(self.prefix) + len(self.loop)

    def canonical(self, n: int) -> int:
        if n < 0:
            raise ContractError(f"position must be >= 0, got {n}")
        p = len(self.prefix)
        return n if n < p else p + (n - p) % len(self.loop)

    def valuation(self, n: int) -> frozenset[str]:
        c = self.canonical(n)
        p = len(self.prefix)
        return self.prefix[c] if c < p else self.loop[c - p]


def _label(model: LassoModel, phi: Formula, memo: dict) -> int:
    """Bitmask of canonical positions where ``phi`` holds."""
    hit = memo.get(phi)
    if hit is not None:
        return hit
    size, p = model.size, len(model.prefix)
    full = (1 << size) - 1
    neg = lambda v: ~v & full  # noqa: E731
    if isinstance(phi, Atom):
        v = 0
        for i in range(size):
            if phi.name in model.valuation(i):
                v |= 1 << i
    elif isinstance(phi, Not):
        v = neg(_label(model, phi.arg, memo))
    elif isinstance(phi, And):
        v = _label(model, phi.left, memo) & _label(model, phi.right, memo)
    elif isinstance(phi, Or):
        a, b = _label(model, phi.left, memo), _label(model, phi.right, memo)
        v = neg(neg(a) & neg(b))
    elif isinstance(phi, Implies):
        a, b = _label(model, phi.left, memo), _label(model, phi.right, memo)
        v = neg(a & neg(b))
    elif isinstance(phi, Iff):
        a, b = _label(model, phi.left, memo), _label(model, phi.right, memo)
        v = neg(a & neg(b)) & neg(b & neg(a))
    elif isinstance(phi, Next):
        a = _label(model, phi.arg, memo)
        # successor of the last canonical position is the loop start
        v = (a >> 1) | (((a >> p) & 1) << (size - 1))
    elif isinstance(phi, Always):
        a = _label(model, phi.arg, memo)
        # positions >= p all see exactly the loop; earlier ones see [i, size)
        loop_mask = full & ~((1 << p) - 1)
        ok = (a & loop_mask) == loop_mask
        v = loop_mask if ok else 0
        for i in range(p - 1, -1, -1):
            ok = ok and bool(a >> i & 1)
            if ok:
                v |= 1 << i
    else:
        raise TypeError(f"not a formula: {phi!r}")
    memo[phi] = v
    return v


def truth_mask(model: LassoModel, phi: Formula) -> int:
    undeclared = set(atoms_of(phi)) - set(model.atoms)
    if undeclared:
        raise ContractError(f"formula uses undeclared atoms {sorted(undeclared)}")
    return _label(model, phi, {})


def holds(model: LassoModel, n: int, phi: Formula) -> bool:
    return bool(truth_mask(model, phi) >> model.canonical(n) & 1)


def t1_instance(phi: Formula) -> Formula:
    """X !phi <-> !X phi"""
    return Iff(Next(Not(phi)), Not(Next(phi)))


def t12_instance(phi: Formula) -> Formula:
    """X G phi <-> G X phi"""
    return Iff(Next(Always(phi)), Always(Next(phi)))


def _holds_everywhere_below(model: LassoModel, phi: Formula, horizon: int) -> bool:
    if horizon < 1:
        raise ContractError(f"horizon must be >= 1, got {horizon}")
    mask = truth_mask(model, phi)
    return all(mask >> model.canonical(n) & 1 for n in range(horizon))


def check_law_T1(model: LassoModel, phi: Formula, horizon: int) -> bool:
    return _holds_everywhere_below(model, t1_instance(phi), horizon)


def check_law_T12(model: LassoModel, phi: Formula, horizon: int) -> bool:
    return _holds_everywhere_below(model, t12_instance(phi), horizon)


# -- bounded satisfiability ------------------------------------------------------


@dataclass(frozen=True)
class UnsatCertificate:
    prefix_bound: int
    loop_bound: int
    models_checked: int


@dataclass(frozen=True)
class SatResult:
    witness: tuple[LassoModel, int] | None = None
    unsat_certificate: UnsatCertificate | None = None
    models_checked: int = 0

    @property
    def satisfiable(self) -> bool:
        return self.witness is not None

    def to_dict(self) -> dict:
        if self.witness is not None:
            model, pos = self.witness
            return {"satisfiable": True, "witness": {"model": model_to_dict(model), "position": pos},
                    "models_checked": self.models_checked}
        c = self.unsat_certificate
        return {"satisfiable": False, "unsat_certificate": {
            "prefix_bound": c.prefix_bound, "loop_bound": c.loop_bound, "models_checked": c.models_checked}}


def _check_bounds(atoms: list[str], max_prefix: int, max_loop: int) -> None:
    if max_prefix < 1 or max_loop < 1:
        raise ContractError("bounds must be >= 1")
    if len(atoms) > MAX_ATOMS:
        raise ContractError(f"at most {MAX_ATOMS} atoms allowed, formula has {len(atoms)}")
    if max_prefix + max_loop > MAX_SHAPE:
        raise ContractError(f"max_prefix + max_loop must be <= {MAX_SHAPE}")


def enumerate_lassos(atoms: list[str], max_prefix: int, max_loop: int) -> Iterator[LassoModel]:
    """All lassos with |prefix| <= max_prefix and 1 <= |loop| <= max_loop.

    Order: increasing total length, then prefix length, then valuations
    lexicographically (each valuation read as a bitmask over ``atoms``).
    """
    atoms = list(atoms)
    cells = [frozenset(a for j, a in enumerate(atoms) if mask >> j & 1) for mask in range(1 << len(atoms))]
    for total in range(1, max_prefix + max_loop + 1):
        for p in range(0, min(max_prefix, total - 1) + 1):
            q = total - p
            if q > max_loop:
                continue
            for seq in itertools.product(cells, repeat=total):
                yield LassoModel(tuple(atoms), seq[:p], seq[p:])


def satisfiable_bounded(phi: Formula, max_prefix: int, max_loop: int) -> SatResult:
    atoms = atoms_of(phi)
    _check_bounds(atoms, max_prefix, max_loop)
    checked = 0
    for model in enumerate_lassos(atoms, max_prefix, max_loop):
        checked += 1
        if _label(model, phi, {}) & 1:
            return SatResult(witness=(model, 0), models_checked=checked)
    return SatResult(unsat_certificate=UnsatCertificate(max_prefix, max_loop, checked), models_checked=checked)


# -- the Yablo formula -----------------------------------------------------------


def yablo_body(psi: Formula) -> Formula:
    """psi <-> X G !psi"""
    return Iff(psi, Next(Always(Not(psi))))


@dataclass(frozen=True)
class Kill:
    """Where the biconditional fails on one model, and which proof step finds it."""

    model: LassoModel
    step: str  # "i" or "ii"
    position: int


@dataclass(frozen=True)
class YabloReport:
    result: SatResult
    kills: tuple[Kill, ...]

    @property
    def killed_by_step(self) -> dict[str, int]:
        counts = {"i": 0, "ii": 0}
        for k in self.kills:
            counts[k.step] += 1
        return counts

    def to_dict(self) -> dict:
        return {
            "search": self.result.to_dict(),
            "models_replayed": len(self.kills),
            "killed_by_step": self.killed_by_step,
        }


def replay_yablo_argument(model: LassoModel, psi: Formula) -> Kill:
    """Locate a failure of psi <-> X G !psi on ``model`` by the two-step argument.

    Works directly on the truth sequence of ``psi``; X and G are unfolded by hand
    here rather than through the evaluator.

    (i)  If psi holds at some m: either X G !psi fails at m, so the
         biconditional fails at m; or !psi holds from m+1 on, so X G !psi holds
         at m+1 while psi does not, and it fails at m+1.
    (ii) Otherwise psi never holds, so X G !psi is true at 0 while psi is
         false there.
    """
    size, p = model.size, len(model.prefix)
    mask = truth_mask(model, psi)
    true_at = [bool(mask >> i & 1) for i in range(size)]

    def reach(i: int) -> range:
        # canonical positions visited from canonical position i onward
        return range(min(i, p), size)

    def succ(i: int) -> int:
        return i + 1 if i + 1 < size else p

    hits = [i for i in range(size) if true_at[i]]
    if not hits:
        return Kill(model, "ii", 0)
    m = hits[0]
    if any(true_at[j] for j in reach(succ(m))):
        return Kill(model, "i", m)
    return Kill(model, "i", m + 1)


def yablo_theorem_check(max_prefix: int, max_loop: int, psi: Formula | None = None) -> YabloReport:
    """Bounded search for a model of G(psi <-> X G !psi), cross-checked by replay.

    Raises WorkbenchError if the two methods disagree or a replayed failure
    point does not re-verify under ``holds``.
    """
    psi = Atom("y") if psi is None else psi
    body = yablo_body(psi)
    result = satisfiable_bounded(Always(body), max_prefix, max_loop)
    kills = []
    for model in enumerate_lassos(atoms_of(psi), max_prefix, max_loop):
        kill = replay_yablo_argument(model, psi)
        if holds(model, kill.position, body):
            raise WorkbenchError(f"replay step ({kill.step}) at {kill.position} does not falsify the body on {model}")
        kills.append(kill)
    if result.satisfiable:
        raise WorkbenchError("bounded search found a model that the replayed argument refutes")
    return YabloReport(result, tuple(kills))


# -- random generation -----------------------------------------------------------


def random_formula(rng: random.Random, atoms: list[str], max_depth: int) -> Formula:
    if max_depth <= 1 or rng.random() < 0.25:
        return Atom(rng.choice(atoms))
    kind = rng.randrange(7)
    if kind < 3:
        return (Not, Next, Always)[kind](random_formula(rng, atoms, max_depth - 1))
    cls = (And, Or, Implies, Iff)[kind - 3]
    return cls(random_formula(rng, atoms, max_depth - 1), random_formula(rng, atoms, max_depth - 1))


def random_model(rng: random.Random, atoms: list[str], max_prefix: int, max_loop: int) -> LassoModel:
    def cell() -> frozenset[str]:
        return frozenset(a for a in atoms if rng.random() < 0.5)

    p = rng.randint(0, max_prefix)
    q = rng.randint(1, max_loop)
    return LassoModel(tuple(atoms), tuple(cell() for _ in range(p)), tuple(cell() for _ in range(q)))


# -- model text format -----------------------------------------------------------
#
#   atoms: y z
#   prefix: y|        (cells separated by '|', true atoms listed per cell)
#   loop: |y
#
# An omitted prefix line means an empty prefix.


def _cells(text: str, lineno: int) -> tuple[frozenset[str], ...]:
    out = []
    for cell in text.split("|"):
        names = cell.split()
        for n in names:
            if not ATOM_RE.match(n):
                raise ParseError(f"bad atom name {n!r}", line=lineno)
        out.append(frozenset(names))
    return tuple(out)


def parse_model(text: str) -> LassoModel:
    atoms = prefix = loop = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        key, sep, rest = line.partition(":")
        key = key.strip()
        if not sep or key not in ("atoms", "prefix", "loop"):
            raise ParseError(f"unrecognized line {raw!r}", line=lineno)
        if key == "atoms":
            atoms = tuple(rest.split())
        elif key == "prefix":
            prefix = _cells(rest, lineno)
        else:
            loop = _cells(rest, lineno)
    if atoms is None or loop is None:
        raise ParseError("model needs 'atoms:' and 'loop:' lines")
    try:
        return LassoModel(atoms, prefix or (), loop)
    except ContractError as exc:
        raise ParseError(str(exc)) from None


def format_model(model: LassoModel) -> str:
    def cells(vals) -> str:
        return "|".join(" ".join(a for a in model.atoms if a in v) for v in vals)

    lines = ["atoms: " + " ".join(model.atoms)]
    if model.prefix:
        lines.append("prefix: " + cells(model.prefix))
    lines.append("loop: " + cells(model.loop))
    return "\n".join(lines) + "\n"


def model_to_dict(model: LassoModel) -> dict:
    def cells(vals):
        return [[a for a in model.atoms if a in v] for v in vals]

    return {"atoms": list(model.atoms), "prefix": cells(model.prefix), "loop": cells(model.loop)}
