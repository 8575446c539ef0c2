"""Command-line entry point: run verification suites, normal forms and bases.

Subcommands:
  verify monopole             built-in scenario, full pipeline
  verify presentation FILE    confluence and d^2 checks for a presentation file
  verify hopf FILE            Hopf axioms and covariant calculus for a scenario file
  basis FILE --degree N       irreducible words of a presentation
  nf FILE --expr "..."        normal form of an expression

Exit status: 0 when every check passes, 1 on any failure, 2 on usage or
configuration errors.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from .catalog import Params, u1_calculus_extras, u1_hopf
from .dga import check_d_squared
from .freealg import AlgebraError, NCPoly, check_local_confluence, graded_basis
from .parsing import (ParseError, format_poly, format_word, load_hopf_scenario,
                      load_presentation, parse_element)
from .reports import CheckItem, Report


class UsageError(RuntimeError):
    pass


def _parse_params(text: str) -> Params:
    if text is None or text == "symbolic":
        return Params.symbolic()
    vals = {}
    for piece in text.split(","):
        if "=" not in piece:
            raise UsageError(f"bad parameter assignment {piece!r}")
        k, v = piece.split("=", 1)
        vals[k.strip()] = Fraction(v.strip())
    missing = {"p", "q", "nu"} - set(vals)
    if missing:
        raise UsageError(f"missing parameter values for {sorted(missing)}")
    try:
        return Params.rational(vals["p"], vals["q"], vals["nu"])
    except ValueError as e:
        raise UsageError(str(e))


def _emit(report: Report, fmt: str) -> int:
    if fmt == "json":
        print(report.to_json())
    else:
        print(report.to_text())
    return 0 if report.ok else 1


def cmd_verify(args) -> int:
    if args.target == "monopole":
        from .monopole import build_scenario, verify_all
        params = _parse_params(args.params)
        scenario = build_scenario(params, args.n)
        rep = verify_all(scenario, args.degree_bound)
        return _emit(rep, args.report)
    if args.target == "presentation":
        if not args.file:
            raise UsageError("verify presentation needs a file argument")
        pres = load_presentation(args.file, max_steps=args.max_steps)
        rep = Report(f"presentation {pres.name}",
                     {"file": args.file, "max_steps": args.max_steps})
        rep.genericity_notes = list(pres.genericity_notes)
        conf = check_local_confluence(pres)
        rep.add(CheckItem("local confluence", "all critical pairs resolve",
                          "pass" if conf.confluent else "fail",
                          None if conf.confluent else
                          format_poly(conf.unresolved[0].left
                                      - conf.unresolved[0].right),
                          notes=[f"{conf.pairs_checked} critical pairs"]))
        if pres.differential:
            d2 = check_d_squared(pres)
            rep.add(CheckItem("d^2 = 0", "d(d(g)) = 0 for every generator",
                              "pass" if d2.ok else "fail",
                              None if d2.ok else format_poly(
                                  d2.failures[0].residue)))
        return _emit(rep, args.report)
    if args.target == "hopf":
        if not args.file:
            raise UsageError("verify hopf needs a file argument")
        return _verify_hopf(args)
    raise UsageError(f"unknown verify target {args.target!r}")


def _verify_hopf(args) -> int:
    from .hopf import (RightIdealData, check_hopf_axioms, covariant_calculus,
                       eta, functionals_for_u1)
    conf = load_hopf_scenario(args.file)
    if conf.get("base") != "u1":
        raise UsageError(f"unknown hopf base {conf.get('base')!r} (built-in: u1)")
    params = _parse_params(args.params)
    H = u1_hopf(params)
    rep = Report(f"hopf scenario {args.file}",
                 {"base": "u1", "params": params.describe()})
    samples = [NCPoly.word(("alpha",) * k) for k in range(1, 5)]
    axioms = check_hopf_axioms(H, samples)
    rep.add(CheckItem("hopf axioms", "coassociativity, counit, antipode",
                      "pass" if axioms.ok else "fail",
                      None if axioms.ok else str(axioms.failures[0])))
    ideal_exprs = conf.get("ideal", [])
    if not ideal_exprs:
        rep.add(CheckItem("right ideal", "no [ideal] section", "skipped"))
        return _emit(rep, args.report)
    gens = [parse_element(e, H.algebra) for e in ideal_exprs]
    R = RightIdealData(H, gens)
    extras = ()
    try:
        FP = functionals_for_u1(R)
        t = FP.f_values["alpha"]
        extras = u1_calculus_extras(params, t)
        rep.add(CheckItem("functionals",
                          "X, f from the one-dimensional quotient",
                          "pass",
                          notes=[f"X(alpha)={FP.x_values['alpha']}, "
                                 f"X(alphas)={FP.x_values['alphas']}, "
                                 f"f(alpha)={FP.f_values['alpha']}"]))
    except Exception as e:  # non-canonical ideal: calculus may still close
        rep.add(CheckItem("functionals", "one-dimensional quotient shape",
                          "skipped", notes=[str(e)]))
    calc = covariant_calculus(H, R, extra=extras)
    conf2 = check_local_confluence(calc)
    rep.genericity_notes = list(calc.genericity_notes)
    rep.add(CheckItem("covariant calculus", "oriented rules are confluent",
                      "pass" if conf2.confluent else "fail",
                      None if conf2.confluent else format_poly(
                          conf2.unresolved[0].left - conf2.unresolved[0].right)))
    if conf2.confluent:
        d2 = check_d_squared(calc)
        rep.add(CheckItem("d^2 = 0", "d(d(g)) = 0 for every generator",
                          "pass" if d2.ok else "fail"))
        from .dga import differentiate
        bad = []
        for h in samples:
            lhs = differentiate(h, calc)
            rhs = NCPoly.zero()
            for c, w1, w2 in H.sweedler(h, 2):
                rhs = rhs + (NCPoly.word(w2)
                             * eta(NCPoly.word(w1), calc, H)).scale(c)
            if lhs != calc.normal_form(rhs):
                bad.append(h)
        rep.add(CheckItem("differential reconstruction",
                          "d(h) = sum h2 eta(h1)",
                          "fail" if bad else "pass", notes=["sampled"]))
    return _emit(rep, args.report)


def cmd_basis(args) -> int:
    pres = load_presentation(args.file, max_steps=args.max_steps)
    words = graded_basis(pres, args.degree, args.length)
    for w in words:
        print(format_word(w))
    return 0


def cmd_nf(args) -> int:
    pres = load_presentation(args.file, max_steps=args.max_steps)
    e = parse_element(args.expr, pres)
    print(format_poly(pres.normal_form(e)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="qpfb",
        description="symbolic verification for locally trivial quantum "
                    "principal bundles")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--report", choices=("text", "json"), default="text")
        p.add_argument("--degree-bound", dest="degree_bound", type=int, default=4)
        p.add_argument("--params", default="symbolic",
                       help="symbolic or p=1/2,q=1/3,nu=1/4")
        p.add_argument("--max-steps", dest="max_steps", type=int, default=10 ** 6)

    pv = sub.add_parser("verify", help="run a verification suite")
    pv.add_argument("target", choices=("monopole", "presentation", "hopf"))
    pv.add_argument("file", nargs="?", help="presentation or scenario file")
    pv.add_argument("--n", type=int, default=1, help="winding number")
    common(pv)
    pv.set_defaults(func=cmd_verify)

    pb = sub.add_parser("basis", help="irreducible words of a presentation")
    pb.add_argument("file")
    pb.add_argument("--degree", type=int, required=True)
    pb.add_argument("--length", type=int, default=4)
    common(pb)
    pb.set_defaults(func=cmd_basis)

    pn = sub.add_parser("nf", help="normal form of an expression")
    pn.add_argument("file")
    pn.add_argument("--expr", required=True)
    common(pn)
    pn.set_defaults(func=cmd_nf)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code not in (0, None) else 0
    try:
        return args.func(args)
    except (UsageError, ParseError, AlgebraError, FileNotFoundError,
            ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
