"""Desk-scale verification of every construction, grouped by theorem.

``run_all`` is deterministic for a given profile, seed and budget: random
instances come from one seeded generator and no timings are reported.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from . import boolos, euclid, inclosure, ltl, primrec, schema

PROFILES = ("quick", "full")


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "pass": self.passed, "detail": self.detail}


@dataclass
class TheoremVerdict:
    theorem: str
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, passed: bool, detail: str = "") -> None:
        self.checks.append(Check(f"{self.theorem}:{name}", bool(passed), detail))


def check_cantor(profile: str, rng: random.Random) -> TheoremVerdict:
    v = TheoremVerdict("cantor")
    for b, d in ((2, 2), (3, 2)) + (((2, 3), (3, 3)) if profile == "full" else ()):
        s = schema.sweep(b, d)
        v.add(f"sweep_b{b}_d{d}", s["inconsistent"] == 0 and s["representable"] == 0,
              f"{s['tables']} tables, {s['representable']} representable")
    return v


def check_euclid(profile: str, rng: random.Random) -> TheoremVerdict:
    v = TheoremVerdict("euclid")
    v.add("f_4_9", euclid.euclid_f(4, 9) == 1)
    v.add("f_4_step", [euclid.euclid_f(4, m) for m in range(12)] == [0] * 6 + [1] * 6)
    v.add("f_n_n", all(euclid.euclid_f(n, n) == 0 for n in range(26)), "n <= 25")
    lpfs = [euclid.least_prime_factor(euclid.factorial_plus_one(n)) for n in range(26)]
    v.add("least_factor_beyond_n", all(p is not euclid.UNRESOLVED and p > n for n, p in enumerate(lpfs)), "n <= 25")
    v.add("prime_beyond", (euclid.prime_beyond(4), euclid.prime_beyond(5)) == (5, 11))
    demo = euclid.euclid_schema_demo(10 if profile == "quick" else 25)
    v.add("anti_diagonal_is_everything", demo["anti_diagonal_is_everything"] and set(demo["g_diagonal"]) == {1},
          f"n_max = {demo['n_max']}")
    return v


def check_boolos(profile: str, rng: random.Random) -> TheoremVerdict:
    v = TheoremVerdict("boolos")
    exhaustive = 2 if profile == "quick" else 3
    for size in range(1, exhaustive + 1):
        s = boolos.sweep(size)
        v.add(f"exhaustive_a{size}", s["witness_failures"] == 0 and s["partner_failures"] == 0, f"{s['maps']} maps")
        v.add(f"comparability_a{size}", all(boolos.comparability_check(h) for h in boolos.all_choice_maps(size)))
    samples = 50 if profile == "quick" else 300
    for size in range(exhaustive + 1, boolos.MAX_CHOICE_CARRIER + 1):
        maps = [boolos.random_choice_map(rng, size) for _ in range(samples)]
        v.add(f"random_a{size}", all(boolos.boolos_witness(h).is_valid(h) for h in maps), f"{samples} maps")
    return v


def check_yablo(profile: str, rng: random.Random) -> TheoremVerdict:
    v = TheoremVerdict("yablo")
    bound = 3 if profile == "quick" else 4
    rep = ltl.yablo_theorem_check(bound, bound)
    v.add("bounded_unsat", not rep.result.satisfiable,
          f"prefix, loop <= {bound}: {rep.result.models_checked} models, killed by step {rep.killed_by_step}")
    n_models, n_formulas = (50, 20) if profile == "quick" else (500, 200)
    atoms = ["a", "b"]
    models = [ltl.random_model(rng, atoms[: rng.randint(1, 2)], 5, 5) for _ in range(n_models)]
    formulas = [ltl.random_formula(rng, atoms, 4) for _ in range(n_formulas)]
    bad = 0
    for phi in formulas:
        for m in models:
            if set(ltl.atoms_of(phi)) - set(m.atoms):
                m = ltl.LassoModel(tuple(atoms), m.prefix, m.loop)
            if not (ltl.check_law_T1(m, phi, 20) and ltl.check_law_T12(m, phi, 20)):
                bad += 1
    v.add("laws_t1_t12", bad == 0, f"{n_models} models x {n_formulas} formulas, {bad} counterexamples")
    return v


def check_inclosure(profile: str, rng: random.Random) -> TheoremVerdict:
    v = TheoremVerdict("inclosure")
    r = inclosure.exhaustive_nonexistence(2 if profile == "quick" else 3)
    disagreements = sum(s["embedding_disagreements"] for s in r["sizes"])
    v.add("no_valid_candidate", r["valid"] == 0 and disagreements == 0,
          f"|Omega| <= {r['max_size']}: {sum(s['candidates'] for s in r['sizes'])} candidates")
    return v


def check_godel(profile: str, rng: random.Random) -> TheoremVerdict:
    v = TheoremVerdict("godel")
    n = 200 if profile == "quick" else 1000
    bad = 0
    for _ in range(n):
        t, code = primrec.random_encodable_term(rng)
        if primrec.decode(code) != t:
            bad += 1
    v.add("round_trip", bad == 0, f"{n} terms, {bad} failures")
    v.add("non_codes", primrec.decode(3) == primrec.decode(10) == primrec.ZERO)
    v.add("base_codes", (primrec.encode(primrec.ZERO), primrec.encode(primrec.SUCC)) == (1, 2))
    return v


def check_domination(profile: str, rng: random.Random, budget: int) -> TheoremVerdict:
    v = TheoremVerdict("domination")
    top = 20 if profile == "quick" else 50
    violations, exhausted = 0, 0
    for m in range(top + 1):
        r = primrec.check_domination(m, (m, top), budget)
        violations += len(r.violations)
        exhausted += len(r.budget_exhausted_at)
    v.add("dominates", violations == 0, f"m <= {top}, x in [m, {top}], {exhausted} budget cut-offs")
    v.add("diagonal_out_differs", _diagonal_out_differs(top, budget))
    return v


def _diagonal_out_differs(n_max: int, budget: int) -> bool:
    tables = primrec.rho_tables(n_max, budget)
    out = primrec.diagonal_out(tables, n_max)
    return all(out[i] != tables[i][i] for i in range(n_max + 1))


def run_all(profile: str = "quick", seed: int = 0, budget: int = primrec.DEFAULT_BUDGET) -> dict:
    if profile not in PROFILES:
        raise ValueError(f"profile must be one of {PROFILES}")
    rng = random.Random(seed)
    verdicts = [
        check_cantor(profile, rng),
        check_euclid(profile, rng),
        check_boolos(profile, rng),
        check_yablo(profile, rng),
        check_inclosure(profile, rng),
        check_godel(profile, rng),
        check_domination(profile, rng, budget),
    ]
    return {
        "profile": profile,
        "seed": seed,
        "theorems": {v.theorem: {"pass": v.passed, "checks": [c.to_dict() for c in v.checks]} for v in verdicts},
        "checks": [c for v in verdicts for c in v.checks],
    }
