"""``workbench`` command-line entry point.

Exit codes: 0 every check passed, 1 a check failed, 2 usage error,
3 an answer could not be decided (factor search gave up or budget ran out).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Callable

from . import boolos, euclid, inclosure, ltl, primrec, schema, suite
from .errors import WorkbenchError
from .outcome import Outcome

SCHEMA_VERSION = "1"
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_UNDECIDED = 0, 1, 2, 3


class CommandResult:
    """What a subcommand hands back to dispatch."""

    def __init__(self, result: Any, text: str, checks: list[dict] | None = None, undecided: bool = False):
        self.result = result
        self.text = text
        self.checks = checks or []
        self.undecided = undecided


def _check(name: str, passed: bool, detail: str = "") -> dict:
    return {"name": name, "pass": bool(passed), "detail": detail}


def _value(v: Any) -> Any:
    return v.value if isinstance(v, Outcome) else v


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


class UsageError(Exception):
    pass


# -- schema ------------------------------------------------------------------------


def cmd_schema(args) -> CommandResult:
    inst = schema.parse_instance(_read(args.instance))
    rep = schema.schema_report(inst)
    text = (
        f"g = {' '.join(rep.g)}\n"
        f"alpha fixed points: {sorted(rep.alpha_fixed_points) or 'none'}\n"
        f"representing indices: {sorted(rep.representing_indices) or 'none'}\n"
        f"consistent: {rep.consistent}"
    )
    return CommandResult(rep.to_dict(), text, [_check("consistent", rep.consistent)])


# -- primrec -----------------------------------------------------------------------


def _term(text: str) -> primrec.PrTerm:
    return primrec.parse_term(text)


def cmd_primrec_encode(args) -> CommandResult:
    t = _term(args.term)
    if primrec.arity(t) is None:
        raise UsageError(f"term {t} has invalid arity")
    code = primrec.encode(t, max_bits=args.max_bits)
    back = primrec.decode(code)
    return CommandResult({"term": str(t), "code": str(code)}, str(code), [_check("round_trip", back == t)])


def cmd_primrec_decode(args) -> CommandResult:
    t = primrec.decode(args.code)
    valid = primrec.is_code(args.code)
    return CommandResult({"code": str(args.code), "term": str(t), "valid_code": valid, "arity": primrec.arity(t)}, str(t))


def cmd_primrec_eval(args) -> CommandResult:
    t = _term(args.term)
    if primrec.arity(t) != len(args.args):
        raise UsageError(f"term {t} has arity {primrec.arity(t)} but {len(args.args)} arguments were given")
    v = primrec.evaluate(t, args.args, args.budget)
    undecided = isinstance(v, Outcome)
    return CommandResult({"term": str(t), "args": args.args, "value": _value(v)}, str(_value(v)),
                    [_check("within_budget", not undecided)], undecided)


def cmd_primrec_rho(args) -> CommandResult:
    v = primrec.rho(args.code, args.x, args.budget)
    undecided = isinstance(v, Outcome)
    return CommandResult({"code": args.code, "term": str(primrec.nu(args.code)), "x": args.x, "value": _value(v)},
                    str(_value(v)), [_check("within_budget", not undecided)], undecided)


def cmd_primrec_dominate(args) -> CommandResult:
    v = primrec.dominator(args.x, args.budget)
    undecided = isinstance(v, Outcome)
    return CommandResult({"x": args.x, "value": _value(v)}, str(_value(v)), [_check("within_budget", not undecided)], undecided)


def cmd_primrec_check_dom(args) -> CommandResult:
    lo = args.m if args.lo is None else args.lo
    rep = primrec.check_domination(args.m, (lo, args.hi), args.budget)
    text = (
        f"m = {args.m}, x in [{lo}, {args.hi}]: "
        f"{len(rep.violations)} violations, {len(rep.budget_exhausted_at)} budget cut-offs"
    )
    checks = [_check("no_violations", rep.ok, str(rep.violations)),
              _check("within_budget", not rep.budget_exhausted_at, str(rep.budget_exhausted_at))]
    return CommandResult(rep.to_dict(), text, checks, bool(rep.budget_exhausted_at))


def cmd_primrec_diagonal(args) -> CommandResult:
    tables = primrec.rho_tables(args.n, args.budget)
    out = primrec.diagonal_out(tables, args.n)
    undecided = any(isinstance(v, Outcome) for v in out)
    differs = all(out[i] != tables[i][i] for i in range(args.n + 1) if not isinstance(out[i], Outcome))
    return CommandResult({"n": args.n, "table": [_value(v) for v in out]}, " ".join(str(_value(v)) for v in out),
                    [_check("differs_on_diagonal", differs)], undecided)


# -- ltl ---------------------------------------------------------------------------


def _formula(args) -> ltl.Formula:
    if args.formula is None:
        raise UsageError("--formula is required")
    return ltl.parse(args.formula)


def _model(args) -> ltl.LassoModel:
    if args.model is None:
        raise UsageError("--model is required")
    return ltl.parse_model(_read(args.model))


def cmd_ltl_holds(args) -> CommandResult:
    phi, m = _formula(args), _model(args)
    v = ltl.holds(m, args.position, phi)
    return CommandResult({"formula": ltl.format_formula(phi), "position": args.position, "holds": v},
                    "true" if v else "false")


def cmd_ltl_sat(args) -> CommandResult:
    phi = _formula(args)
    r = ltl.satisfiable_bounded(phi, args.max_prefix, args.max_loop)
    if r.satisfiable:
        model, pos = r.witness
        text = "satisfiable; witness at position %d:\n%s" % (pos, ltl.format_model(model).rstrip())
        checks = [_check("witness_rechecks", ltl.holds(model, pos, phi))]
    else:
        c = r.unsat_certificate
        text = f"no model with prefix <= {c.prefix_bound}, loop <= {c.loop_bound} ({c.models_checked} checked)"
        checks = []
    return CommandResult({"formula": ltl.format_formula(phi), **r.to_dict()}, text, checks)


def cmd_ltl_yablo(args) -> CommandResult:
    psi = ltl.parse(args.formula) if args.formula else None
    try:
        rep = ltl.yablo_theorem_check(args.max_prefix, args.max_loop, psi)
    except WorkbenchError as exc:
        return CommandResult({"error": str(exc)}, str(exc), [_check("search_and_replay_agree", False, str(exc))])
    c = rep.result.unsat_certificate
    text = (
        f"G(psi <-> X G !psi) has no model with prefix <= {c.prefix_bound}, loop <= {c.loop_bound}\n"
        f"{c.models_checked} models searched; replay kills {rep.killed_by_step['i']} by step (i), "
        f"{rep.killed_by_step['ii']} by step (ii)"
    )
    return CommandResult(rep.to_dict(), text, [_check("unsat", not rep.result.satisfiable),
                                          _check("search_and_replay_agree", True)])


def cmd_ltl_laws(args) -> CommandResult:
    import random

    phi = _formula(args)
    if args.model:
        models = [_model(args)]
    else:
        rng = random.Random(args.seed)
        atoms = ltl.atoms_of(phi)
        models = [ltl.random_model(rng, atoms, 5, 5) for _ in range(args.samples)]
    t1 = sum(ltl.check_law_T1(m, phi, args.horizon) for m in models)
    t12 = sum(ltl.check_law_T12(m, phi, args.horizon) for m in models)
    n = len(models)
    text = f"T1 holds on {t1}/{n} models, T12 on {t12}/{n} (positions < {args.horizon})"
    return CommandResult({"formula": ltl.format_formula(phi), "models": n, "t1": t1, "t12": t12}, text,
                    [_check("t1", t1 == n), _check("t12", t12 == n)])


# -- boolos ------------------------------------------------------------------------


def _map(args) -> boolos.ChoiceMap:
    if args.map is None:
        raise UsageError("--map is required")
    return boolos.parse_choice_map(_read(args.map))


def _labels(h: boolos.ChoiceMap, mask: int) -> list[str]:
    return boolos.subset_labels(h.carrier, mask)


def _braces(labels: list[str]) -> str:
    return "{" + " ".join(labels) + "}"


def cmd_boolos_witness(args) -> CommandResult:
    h = _map(args)
    w = boolos.boolos_witness(h)
    woset = boolos.build_max_woset(h)
    point = h.carrier.elements[w.collision_point]
    result = {"v": _labels(h, w.v), "w": _labels(h, w.w), "w_order": [h.carrier.elements[e] for e in woset.order],
              "collision_point": point}
    text = f"V = {_braces(result['v'])}, W = {_braces(result['w'])}, h(V) = h(W) = {point}"
    return CommandResult(result, text, [_check("witness_valid", w.is_valid(h))])


def cmd_boolos_antidiag(args) -> CommandResult:
    h = _map(args)
    c, d = boolos.find_collision_partner(h)
    point = h.carrier.elements[h(d)]
    result = {"d": _labels(h, d), "c": _labels(h, c), "collision_point": point}
    text = f"D = {_braces(result['d'])}, C = {_braces(result['c'])}, h(C) = h(D) = {point}"
    ok = h(c) == h(d) and bool(d >> h(d) & 1) and not c >> h(d) & 1
    return CommandResult(result, text, [_check("partner_valid", ok)])


def cmd_boolos_enumerate(args) -> CommandResult:
    h = _map(args)
    if h.size > 4:
        raise UsageError("enumeration is limited to |A| <= 4")
    wosets = boolos.enumerate_h_wosets(h)
    orders = [[h.carrier.elements[e] for e in w.order] for w in wosets]
    text = "\n".join("[" + " < ".join(o) + "]" for o in orders)
    biggest = boolos.build_max_woset(h)
    segments = all(w == biggest or w.is_initial_segment_of(biggest) for w in wosets)
    return CommandResult({"wosets": orders}, text, [_check("comparable", boolos.comparability_check(h)),
                                               _check("all_initial_segments_of_max", segments)])


def cmd_boolos_sweep(args) -> CommandResult:
    if not 1 <= args.size <= 3:
        raise UsageError("--size must be in 1..3")
    s = boolos.sweep(args.size)
    text = f"|A| = {args.size}: {s['maps']} maps, {s['witness_failures']} witness failures, " \
           f"{s['partner_failures']} partner failures"
    return CommandResult(s, text, [_check("witnesses", s["witness_failures"] == 0),
                              _check("partners", s["partner_failures"] == 0)])


# -- euclid ------------------------------------------------------------------------


def cmd_euclid_f(args) -> CommandResult:
    v = euclid.euclid_f(args.n, args.m)
    undecided = isinstance(v, Outcome)
    return CommandResult({"n": args.n, "m": args.m, "f": _value(v)}, str(_value(v)),
                    [_check("resolved", not undecided)], undecided)


def cmd_euclid_beyond(args) -> CommandResult:
    v = euclid.prime_beyond(args.p)
    undecided = isinstance(v, Outcome)
    checks = [_check("resolved", not undecided)]
    if not undecided:
        checks.append(_check("greater_than_p", v > args.p))
    return CommandResult({"p": args.p, "prime": _value(v) if undecided else str(v)}, str(_value(v)), checks, undecided)


def cmd_euclid_demo(args) -> CommandResult:
    d = euclid.euclid_schema_demo(args.max)
    rows = [f"x={x}: x in F(n) for n in {row}" for x, row in d["members"].items()]
    text = "\n".join(rows + [f"anti-diagonal = [0..{args.max}]: {d['anti_diagonal_is_everything']}"])
    return CommandResult(d, text, [_check("anti_diagonal_is_everything", d["anti_diagonal_is_everything"]),
                              _check("g_is_one", set(d["g_diagonal"]) == {1})], bool(d["unresolved"]))


# -- inclosure ---------------------------------------------------------------------


def cmd_inclosure_validate(args) -> CommandResult:
    c = inclosure.parse_candidate(_read(args.candidate))
    rep = inclosure.validate(c)
    if rep is None:
        return CommandResult({"valid": True}, "valid inclosure (impossible)", [_check("not_an_inclosure", False)])
    result = {"valid": False, **rep.to_dict(c)}
    text = f"violated: {rep.condition_violated}" + (
        f" at {_braces(c.labels(rep.subset))}" if rep.subset is not None else "")
    return CommandResult(result, text, [_check("not_an_inclosure", True), _check("witness_rechecks", rep.recheck(c))])


def cmd_inclosure_sweep(args) -> CommandResult:
    if not 1 <= args.size <= inclosure.MAX_SWEEP:
        raise UsageError(f"--size must be in 1..{inclosure.MAX_SWEEP}")
    r = inclosure.exhaustive_nonexistence(args.size)
    lines = [f"|Omega| = {s['size']}: {s['candidates']} candidates, {s['valid']} valid, {s['violations']}"
             for s in r["sizes"]]
    disagreements = sum(s["embedding_disagreements"] for s in r["sizes"])
    return CommandResult(r, "\n".join(lines), [_check("no_valid_candidate", r["valid"] == 0),
                                          _check("embedding_agrees", disagreements == 0)])


# -- run-all -----------------------------------------------------------------------


def cmd_run_all(args) -> CommandResult:
    r = suite.run_all(args.profile, args.seed, args.budget)
    checks = [c.to_dict() for c in r.pop("checks")]
    lines = [f"{'PASS' if c['pass'] else 'FAIL'}  {c['name']}  {c['detail']}".rstrip() for c in checks]
    return CommandResult(r, "\n".join(lines), checks)


# -- parser ------------------------------------------------------------------------


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="emit a JSON report")
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="seed for randomized checks")
    p.add_argument("--budget", type=int, default=argparse.SUPPRESS, help="evaluation step budget")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="workbench", parents=[common],
                                     description="Diagonal arguments, checked on finite instances.")
    top = parser.add_subparsers(dest="command", metavar="COMMAND")
    top.required = True

    def leaf(sub, name: str, fn: Callable, help: str, **kw):
        p = sub.add_parser(name, parents=[common], help=help, **kw)
        p.set_defaults(fn=fn, command_path=None)
        return p

    p = leaf(top, "schema", cmd_schema, "report on a diagonal instance file")
    p.add_argument("--instance", required=True)

    pr = top.add_parser("primrec", parents=[common], help="primitive recursive terms and codes").add_subparsers(dest="sub", metavar="SUB")
    pr.required = True
    p = leaf(pr, "encode", cmd_primrec_encode, "Goedel code of a term")
    p.add_argument("--term", required=True)
    p.add_argument("--max-bits", type=int, default=1 << 24)
    p = leaf(pr, "decode", cmd_primrec_decode, "term with a given code")
    p.add_argument("--code", type=int, required=True)
    p = leaf(pr, "eval", cmd_primrec_eval, "evaluate a term")
    p.add_argument("--term", required=True)
    p.add_argument("--args", type=int, nargs="+", required=True)
    p = leaf(pr, "rho", cmd_primrec_rho, "unarized enumeration value rho_i(x)")
    p.add_argument("--code", type=int, required=True)
    p.add_argument("--x", type=int, required=True)
    p = leaf(pr, "dominate", cmd_primrec_dominate, "dominating function value")
    p.add_argument("--x", type=int, required=True)
    p = leaf(pr, "check-dom", cmd_primrec_check_dom, "check domination of rho_m")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--from", dest="lo", type=int)
    p.add_argument("--to", dest="hi", type=int, required=True)
    p = leaf(pr, "diagonal", cmd_primrec_diagonal, "two-valued diagonal out of rho_0..rho_n")
    p.add_argument("--n", type=int, required=True)

    lt = top.add_parser("ltl", parents=[common], help="LTL over lasso models").add_subparsers(dest="sub", metavar="SUB")
    lt.required = True
    for name, fn, help in (("holds", cmd_ltl_holds, "evaluate a formula on a model"),
                           ("sat", cmd_ltl_sat, "bounded satisfiability"),
                           ("yablo", cmd_ltl_yablo, "bounded Yablo theorem check"),
                           ("laws", cmd_ltl_laws, "check T1 and T12 instances")):
        p = leaf(lt, name, fn, help)
        p.add_argument("--formula")
        p.add_argument("--model")
        p.add_argument("--position", type=int, default=0)
        p.add_argument("--max-prefix", type=int, default=4)
        p.add_argument("--max-loop", type=int, default=4)
        p.add_argument("--horizon", type=int, default=20)
        p.add_argument("--samples", type=int, default=100)

    bo = top.add_parser("boolos", parents=[common], help="choice maps and h-wosets").add_subparsers(dest="sub", metavar="SUB")
    bo.required = True
    for name, fn, help in (("witness", cmd_boolos_witness, "explicit V, W"),
                           ("antidiag", cmd_boolos_antidiag, "anti-diagonal and partner"),
                           ("enumerate", cmd_boolos_enumerate, "all h-wosets")):
        p = leaf(bo, name, fn, help)
        p.add_argument("--map", required=True)
    p = leaf(bo, "sweep", cmd_boolos_sweep, "exhaustive sweep")
    p.add_argument("--size", type=int, required=True)

    eu = top.add_parser("euclid", parents=[common], help="Euclid's f on n!+1").add_subparsers(dest="sub", metavar="SUB")
    eu.required = True
    p = leaf(eu, "f", cmd_euclid_f, "f(n, m)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p = leaf(eu, "beyond", cmd_euclid_beyond, "a prime beyond p")
    p.add_argument("--p", type=int, required=True)
    p = leaf(eu, "demo", cmd_euclid_demo, "tabulate F(n) and its anti-diagonal")
    p.add_argument("--max", type=int, required=True)

    inc = top.add_parser("inclosure", parents=[common], help="inclosure candidates").add_subparsers(dest="sub", metavar="SUB")
    inc.required = True
    p = leaf(inc, "validate", cmd_inclosure_validate, "validate a candidate file")
    p.add_argument("--candidate", required=True)
    p = leaf(inc, "sweep", cmd_inclosure_sweep, "exhaustive non-existence sweep")
    p.add_argument("--size", type=int, required=True)

    for name in ("run-all", "run_all"):
        p = leaf(top, name, cmd_run_all, "run every desk-scale check" if name == "run-all" else argparse.SUPPRESS)
        p.add_argument("--profile", choices=suite.PROFILES, default="quick")
    return parser


def _inputs(args: argparse.Namespace) -> dict:
    skip = {"fn", "command", "sub", "command_path", "json"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip and v is not None}


def dispatch(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    args.json = getattr(args, "json", False)
    args.seed = getattr(args, "seed", 0)
    args.budget = getattr(args, "budget", primrec.DEFAULT_BUDGET)
    if args.budget < 1:
        parser.print_usage(sys.stderr)
        print("workbench: error: --budget must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    command = " ".join(x for x in (args.command, getattr(args, "sub", None)) if x)
    try:
        outcome = args.fn(args)
    except (UsageError, WorkbenchError) as exc:
        print(f"workbench {command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    failed = [c for c in outcome.checks if not c["pass"]]
    undecided_only = outcome.undecided and all(c["name"] in ("resolved", "within_budget") for c in failed)
    if not failed:
        code = EXIT_OK
    elif undecided_only:
        code = EXIT_UNDECIDED
    else:
        code = EXIT_FAIL
    if args.json:
        report = {
            "schema_version": SCHEMA_VERSION,
            "command": command,
            "inputs": _inputs(args),
            "result": outcome.result,
            "checks": outcome.checks,
        }
        out.write(json.dumps(report, indent=2, sort_keys=True) + "\n")
    else:
        out.write(outcome.text + "\n")
    return code


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
