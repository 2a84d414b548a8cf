"""Command-line front end.  Every command prints one JSON report on stdout.

Exit status: 0 on success, 1 on a domain error (budget exhausted, unknown at
cutoff, infinite VC, ...), 2 on a usage error (bad flag or malformed input).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from . import arith
from .classes import (
    OMEGA,
    ClassSpec,
    FiniteSupport,
    InitStage,
    Interval,
    MachineBacked,
    Threshold,
    restrict,
)
from .constructions import extract_erm, fin_family, nfl_adversary, rec_family
from .errors import CpacError, FormatError
from .fileio import load_class_spec, load_distribution, load_program_index, load_sample, parse_int_list
from .learn import (
    DEFAULT_BUDGET,
    FiniteDistribution,
    Learner,
    constant_learner,
    empirical_error,
    erm,
    erm_indexed,
    erm_learner,
    pac_verify_exact,
    pac_verify_mc,
    scpac_learner,
)
from .machine import ce_stage, decode, format_program, trace
from .vc import INFINITE, shatters, vc_exact, vc_lower_bound

SCHEMA_VERSION = 1


class UsageError(Exception):
    pass


# -- JSON encoding -----------------------------------------------------------

def rational(q: Fraction) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def hypothesis_json(h) -> dict[str, Any]:
    if isinstance(h, Threshold):
        return {"type": "threshold", "t": "omega" if h.t is OMEGA else h.t}
    if isinstance(h, Interval):
        return {"type": "interval", "lo": h.lo, "hi": h.hi}
    if isinstance(h, FiniteSupport):
        return {"type": "finite-support", "cut": h.cut, "prefix": list(h.prefix), "tail": h.tail}
    if isinstance(h, InitStage):
        return {"type": "init-stage", "s": h.s}
    if isinstance(h, MachineBacked):
        return {"type": "machine", "index": str(h.index), "budget": h.budget}
    raise TypeError(f"cannot serialise {h!r}")


def class_json(spec: ClassSpec) -> dict[str, Any]:
    m = spec.membership
    out: dict[str, Any] = {"base": spec.base.value, "membership": type(m).__name__.lower()}
    if hasattr(m, "indices"):
        out["indices"] = list(m.indices)
    for attr in ("decider", "enumerator"):
        if hasattr(m, attr):
            out["program"] = str(getattr(m, attr))
            out["budget"] = {"initial": m.budget.initial, "cap": m.budget.cap}
    return out


def _vc_json(v) -> int | str:
    return "infinite" if v is INFINITE else v


# -- argument helpers --------------------------------------------------------

def _points(text: str) -> list[int]:
    try:
        return parse_int_list(text)
    except FormatError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _natural(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a natural number, got {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a natural number, got {text!r}")
    return v


def _positive(text: str) -> int:
    v = _natural(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def _program_of(args) -> int:
    if args.index is not None:
        return args.index
    if args.program is not None:
        return load_program_index(args.program)
    raise UsageError("one of --index or --program is required")


def _learner(args, spec: ClassSpec | None) -> Learner:
    name = args.learner
    if name in ("const0", "constant-0"):
        return constant_learner(0)
    if name in ("const1", "constant-1"):
        return constant_learner(1)
    if name == "erm":
        if spec is None:
            raise UsageError("--learner erm needs --class")
        return erm_learner(spec, args.cutoff)
    raise UsageError(f"--learner: unknown learner {name!r} (use erm, const0 or const1)")


# -- commands ----------------------------------------------------------------

def cmd_machine_run(args) -> dict:
    i = _program_of(args)
    t = trace(i, args.input, args.steps)
    return {"index": str(i), "input": args.input, "steps": args.steps,
            "halted": t.halted, "value": t.value, "steps_used": t.steps}


def cmd_machine_enum(args) -> dict:
    j = _program_of(args)
    return {"index": str(j), "steps": args.steps, "members": sorted(ce_stage(j, args.steps))}


def cmd_machine_show(args) -> dict:
    i = _program_of(args)
    return {"index": str(i), "program": format_program(decode(i)).splitlines()}


def cmd_class_show(args) -> dict:
    spec = load_class_spec(args.class_)
    out = {"class": class_json(spec)}
    members = []
    for n, (i, h) in enumerate(spec.members(args.cutoff)):
        if n >= args.limit:
            break
        members.append({"index": i, "hypothesis": hypothesis_json(h)})
    out["members"] = members
    try:
        out["vc"] = _vc_json(vc_exact(spec))
    except (CpacError, ValueError):
        out["vc"] = None
    return out


def cmd_class_restrict(args) -> dict:
    spec = load_class_spec(args.class_)
    labelings = sorted(restrict(spec, args.points, args.cutoff))
    return {"class": class_json(spec), "points": sorted(set(args.points)), "cutoff": args.cutoff,
            "labelings": [list(r) for r in labelings], "count": len(labelings)}


def cmd_vc_check(args) -> dict:
    spec = load_class_spec(args.class_)
    return {"class": class_json(spec), "points": sorted(set(args.points)), "cutoff": args.cutoff,
            "shattered": shatters(spec, args.points, args.cutoff)}


def cmd_vc_lower_bound(args) -> dict:
    spec = load_class_spec(args.class_)
    w = vc_lower_bound(spec, args.d, args.domain, args.cutoff)
    return {"class": class_json(spec), "d": args.d, "domain": args.domain, "cutoff": args.cutoff,
            "witness": None if w is None else list(w)}


def cmd_vc_exact(args) -> dict:
    spec = load_class_spec(args.class_)
    return {"class": class_json(spec), "vc": _vc_json(vc_exact(spec, args.domain))}


def cmd_erm(args) -> dict:
    spec = load_class_spec(args.class_)
    S = load_sample(args.sample)
    i, h = erm_indexed(spec, S, args.cutoff)
    return {"class": class_json(spec), "sample": [list(p) for p in S], "index": i,
            "hypothesis": hypothesis_json(h), "empirical_error": rational(empirical_error(h, S))}


def cmd_learn_synth(args) -> dict:
    spec = load_class_spec(args.class_)
    A = scpac_learner(spec, args.cutoff)
    d = vc_exact(spec)
    return {"class": class_json(spec), "learner": A.name, "vc": d, "a": args.a, "b": args.b,
            "sample_complexity": A.sample_complexity(args.a, args.b),
            "bound": "ceil(64 a^2 (2 d ln(12 a) + ln(8 b)))"}


def _dist_json(D: FiniteDistribution) -> list:
    return [[x, y, rational(w)] for x, y, w in D.atoms]


def cmd_pac_verify(args) -> dict:
    spec = load_class_spec(args.class_)
    D = load_distribution(args.dist)
    A = _learner(args, spec)
    out = {"class": class_json(spec), "distribution": _dist_json(D), "learner": A.name,
           "m": args.m, "a": args.a, "b": args.b}
    if args.mc:
        r = pac_verify_mc(A, spec, D, args.m, args.a, args.b, args.trials, args.seed, args.cutoff)
        out.update(mode="mc", seed=args.seed, trials=r.trials, p_hat=rational(r.p_hat), ci=repr(r.ci))
    else:
        r = pac_verify_exact(A, spec, D, args.m, args.a, args.b, args.cutoff, args.budget)
        out.update(mode="exact", p=rational(r.p), satisfied=r.satisfied,
                   best_risk=rational(r.best_risk), samples=r.samples)
    return out


def cmd_extract_erm(args) -> dict:
    spec = load_class_spec(args.class_)
    S = load_sample(args.sample)
    if args.learner == "erm":
        A = erm_learner(spec, args.cutoff) if args.inject_m is not None else scpac_learner(spec, args.cutoff)
    else:
        A = _learner(args, spec)
    if args.inject_m is not None:
        A = A.with_sample_complexity(args.inject_m)
    r = extract_erm(A, S, args.mode, args.b, args.k, args.seed, args.budget)
    got = empirical_error(r.hypothesis, S)
    best = empirical_error(erm(spec, S, args.cutoff), S)
    return {"class": class_json(spec), "sample": [list(p) for p in S], "learner": A.name,
            "mode": args.mode, "seed": args.seed, "k": args.k, "a": r.a, "b": r.b, "m": r.m,
            "hypothesis": hypothesis_json(r.hypothesis), "witness": [list(p) for p in r.witness],
            "empirical_error": rational(got), "erm_error": rational(best), "matches_erm": got == best}


def cmd_nfl(args) -> dict:
    spec = load_class_spec(args.class_) if args.class_ else None
    A = _learner(args, spec)
    r = nfl_adversary(A, args.m, args.points, args.budget)
    out = {"learner": A.name, "m": args.m, "points": args.points, "labeling": list(r.labeling),
           "p": rational(r.p), "at_least_1_7": r.p >= Fraction(1, 7)}
    if spec is not None:
        xs = sorted(args.points)
        g = dict(zip(args.points, r.labeling))
        out["labeling_in_class"] = tuple(g[x] for x in xs) in restrict(spec, xs, args.cutoff)
    return out


def cmd_family(args) -> dict:
    j = _program_of(args)
    spec = (fin_family if args.kind == "fin" else rec_family)(j, args.stage)
    members = [{"index": i, "hypothesis": hypothesis_json(h)} for i, h in spec.members()]
    return {"kind": args.kind, "program": str(j), "stage": args.stage, "class": class_json(spec),
            "members": members, "count": len(members), "vc": _vc_json(vc_exact(spec))}


def _class_ref(args):
    if args.family:
        return arith.FamilyRef(args.family, _program_of(args))
    if args.class_:
        return load_class_spec(args.class_)
    raise UsageError("one of --class or --family is required")


def _read_formula(path: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise FormatError(f"cannot read formula {path}: {exc.strerror}") from None
    return arith.parse_formula(text)


def cmd_arith_emit(args) -> dict:
    ref = _class_ref(args)
    if args.kind == "vc" and args.d is None:
        raise UsageError("--d is required with --kind vc")
    f = arith.emit(args.kind, ref, args.d)
    return {"kind": args.kind, "d": args.d, "formula": arith.to_text(f), "level": str(arith.classify(f))}


def cmd_arith_classify(args) -> dict:
    f = _read_formula(args.formula)
    return {"formula": arith.to_text(f), "level": str(arith.classify(f)),
            "prenex": arith.to_text(arith.prenex(f))}


def cmd_arith_eval(args) -> dict:
    f = _read_formula(args.formula)
    return {"formula": arith.to_text(f), "bound": args.bound, "value": arith.eval_bounded(f, args.bound)}


# -- parser ------------------------------------------------------------------

def _default_budget() -> int:
    env = os.environ.get("CPAC_BUDGET")
    if env is None:
        return DEFAULT_BUDGET
    try:
        return _positive(env)
    except argparse.ArgumentTypeError:
        raise UsageError(f"CPAC_BUDGET: expected a positive integer, got {env!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    # SUPPRESS keeps subcommand copies of these flags from resetting the top-level value
    common.add_argument("--budget", type=_positive, default=argparse.SUPPRESS,
                        help="enumeration cap (default: $CPAC_BUDGET or %d)" % DEFAULT_BUDGET)
    common.add_argument("--no-timings", action="store_true", default=argparse.SUPPRESS,
                        help="omit timings for byte-stable reports")

    # no set_defaults here: parent actions are shared objects, so it would reach the leaves too
    p = argparse.ArgumentParser(prog="cpac", description=__doc__.splitlines()[0], parents=[common])
    sub = p.add_subparsers(dest="command", required=True, metavar="command")

    def leaf(parent, name, func, help_text):
        q = parent.add_parser(name, help=help_text, parents=[common])
        q.set_defaults(func=func)
        return q

    def program_flags(q):
        g = q.add_mutually_exclusive_group()
        g.add_argument("--index", type=_natural, help="program index")
        g.add_argument("--program", help="program text file")

    def class_flag(q, required=True):
        q.add_argument("--class", dest="class_", metavar="FILE", required=required, help="class spec file")
        q.add_argument("--cutoff", type=_positive, default=None, help="index cutoff for enumerated classes")

    machine = sub.add_parser("machine", help="run and enumerate programs").add_subparsers(
        dest="sub", required=True, metavar="action")
    q = leaf(machine, "run", cmd_machine_run, "step-bounded run")
    program_flags(q)
    q.add_argument("--input", type=_natural, required=True)
    q.add_argument("--steps", type=_natural, required=True)
    q = leaf(machine, "enum", cmd_machine_enum, "stage of the program's c.e. set")
    program_flags(q)
    q.add_argument("--steps", type=_natural, required=True)
    q = leaf(machine, "show", cmd_machine_show, "decode an index to program text")
    program_flags(q)

    cls = sub.add_parser("class", help="inspect hypothesis classes").add_subparsers(
        dest="sub", required=True, metavar="action")
    q = leaf(cls, "show", cmd_class_show, "first members and VC dimension")
    class_flag(q)
    q.add_argument("--limit", type=_natural, default=20)
    q = leaf(cls, "restrict", cmd_class_restrict, "labelings realised on points")
    class_flag(q)
    q.add_argument("--points", type=_points, required=True)

    vc = sub.add_parser("vc", help="shattering and VC dimension").add_subparsers(
        dest="sub", required=True, metavar="action")
    q = leaf(vc, "check", cmd_vc_check, "is a point set shattered")
    class_flag(q)
    q.add_argument("--points", type=_points, required=True)
    q = leaf(vc, "lower-bound", cmd_vc_lower_bound, "search for a shattered d-set")
    class_flag(q)
    q.add_argument("--d", type=_positive, required=True)
    q.add_argument("--domain", type=_positive, required=True)
    q = leaf(vc, "exact", cmd_vc_exact, "exact VC dimension")
    class_flag(q)
    q.add_argument("--domain", type=_positive, default=1 << 12)

    q = leaf(sub, "erm", cmd_erm, "empirical risk minimiser")
    class_flag(q)
    q.add_argument("--sample", required=True)

    learn = sub.add_parser("learn", help="learner assembly").add_subparsers(
        dest="sub", required=True, metavar="action")
    q = leaf(learn, "synth", cmd_learn_synth, "ERM plus sample complexity for a finite-VC class")
    class_flag(q)
    q.add_argument("--a", type=_positive, default=2)
    q.add_argument("--b", type=_positive, default=2)

    pac = sub.add_parser("pac", help="verify the PAC condition").add_subparsers(
        dest="sub", required=True, metavar="action")
    q = leaf(pac, "verify", cmd_pac_verify, "exact or Monte-Carlo failure probability")
    mode = q.add_mutually_exclusive_group(required=True)
    mode.add_argument("--exact", action="store_true")
    mode.add_argument("--mc", action="store_true")
    class_flag(q)
    q.add_argument("--dist", required=True)
    q.add_argument("--m", type=_natural, required=True)
    q.add_argument("--a", type=_positive, required=True)
    q.add_argument("--b", type=_positive, required=True)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--trials", type=_positive, default=100_000)
    q.add_argument("--learner", default="erm")

    q = leaf(sub, "extract-erm", cmd_extract_erm, "ERM from a learner and its sample complexity")
    class_flag(q)
    q.add_argument("--sample", required=True)
    q.add_argument("--mode", choices=("exact", "randomized"), default="exact")
    q.add_argument("--k", type=_positive, default=20)
    q.add_argument("--b", type=_positive, default=2)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--inject-m", type=_natural, default=None)
    q.add_argument("--learner", default="erm")

    q = leaf(sub, "nfl", cmd_nfl, "worst labeling for a learner")
    q.add_argument("--learner", required=True)
    class_flag(q, required=False)
    q.add_argument("--m", type=_positive, required=True)
    q.add_argument("--points", type=_points, required=True)

    fam = sub.add_parser("family", help="stages of the reduction families").add_subparsers(
        dest="kind", required=True, metavar="kind")
    for kind in ("fin", "rec"):
        q = leaf(fam, kind, cmd_family, f"stage of the {kind} family")
        program_flags(q)
        q.add_argument("--stage", type=_natural, required=True)

    ar = sub.add_parser("arith", help="learnability statements").add_subparsers(
        dest="sub", required=True, metavar="action")
    q = leaf(ar, "emit", cmd_arith_emit, "emit a statement")
    q.add_argument("--kind", choices=arith.EMIT_KINDS, required=True)
    q.add_argument("--class", dest="class_", metavar="FILE")
    q.add_argument("--family", choices=("fin", "rec"))
    program_flags(q)
    q.add_argument("--d", type=_positive)
    q = leaf(ar, "classify", cmd_arith_classify, "hierarchy level of a formula file")
    q.add_argument("--formula", required=True)
    q = leaf(ar, "eval", cmd_arith_eval, "evaluate with every unbounded quantifier capped")
    q.add_argument("--formula", required=True)
    q.add_argument("--bound", type=_natural, required=True)
    return p


def _command_name(args) -> str:
    parts = [args.command]
    for attr in ("sub", "kind"):
        v = getattr(args, attr, None)
        if v and args.command in ("machine", "class", "vc", "learn", "pac", "family", "arith"):
            if attr == "kind" and args.command != "family":
                continue
            parts.append(v)
    return " ".join(parts)


def _emit(report: dict, stream) -> None:
    stream.write(json.dumps(report, indent=2, sort_keys=True) + "\n")


def main(argv: Sequence[str] | None = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    args.budget = getattr(args, "budget", None)
    args.no_timings = getattr(args, "no_timings", False)
    report: dict[str, Any] = {"schema": SCHEMA_VERSION, "command": _command_name(args)}
    start = time.perf_counter()
    try:
        if args.budget is None:
            args.budget = _default_budget()
        report["budget"] = args.budget
        report["result"] = args.func(args)
        code = 0
    except (UsageError, FormatError, ValueError) as exc:
        report["error"] = {"type": "usage", "message": str(exc)}
        print(f"cpac: error: {exc}", file=sys.stderr)
        code = 2
    except CpacError as exc:
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
        code = 1
    if not args.no_timings:
        report["timings"] = {"seconds": round(time.perf_counter() - start, 6)}
    _emit(report, stdout)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
