"""Command-line front end.

Subcommands: parse, multitype, psd, normalize, boundary-system, torsion,
enumerate, examples.  Input is either a positional file (text expression or
canonical JSON) or --expr with --n.  Exit codes: 0 success, 2 input error,
3 mathematical contradiction detected, 4 Unknown verdict under
--require-certificate.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .boundary import (audit_boundary_system, build_boundary_system,
                       detect_torsion, normalize_first_block,
                       BoundaryConstructionError, PseudoconvexityViolation)
from .exact import rat_str
from .levi import KIND_CERTIFIED, KIND_REFUTED, KIND_UNKNOWN, psd_verdict
from .normal_form import PseudoconvexityError, normalize, verify_normal_form
from .parser import parse_poly
from .poly import NonRealError, Poly, PolyError
from .weights import (Weight, corroborate, counting_bound,
                      enumerate_multitypes, is_admissible, multitype_search)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_CONTRADICTION = 3
EXIT_UNKNOWN = 4


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_INPUT):
        super().__init__(message)
        self.code = code


def _load_poly(args) -> Poly:
    if getattr(args, "expr", None) and getattr(args, "input", None):
        raise CliError("give either an input file or --expr, not both")
    if getattr(args, "expr", None):
        if not getattr(args, "n", None):
            raise CliError("--expr requires --n")
        return parse_poly(args.expr, args.n)
    if not getattr(args, "input", None):
        raise CliError("no input given; use a file argument or --expr/--n")
    with open(args.input, "r", encoding="utf-8") as fh:
        text = fh.read()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return Poly.from_json_dict(json.loads(text))
    n = getattr(args, "n", None)
    if not n:
        raise CliError("text input files require --n")
    return parse_poly(text.strip(), n)


def _parse_weight(spec: str, n: int) -> Weight:
    parts = [Fraction(s.strip()) for s in spec.split(",")]
    if len(parts) != n:
        raise CliError(f"weight has {len(parts)} entries, expected {n}")
    return Weight(tuple(parts))


def _auto_weight(r: Poly, degree_bound: int) -> Weight:
    mt = multitype_search(r, degree_bound)
    if any(e == float("inf") for e in mt.value.entries):
        raise CliError("could not infer a finite weight; pass --weight",
                       EXIT_INPUT)
    return mt.value.weight()


def _emit(args, payload: dict, human: str):
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(human)


def cmd_parse(args) -> int:
    p = _load_poly(args)
    _emit(args, p.to_json_dict(), str(p))
    return EXIT_OK


def cmd_multitype(args) -> int:
    r = _load_poly(args)
    mt = multitype_search(r, args.degree_bound)
    commutator = None
    try:
        bs = build_boundary_system(r)
        commutator = bs.commutator_multitype()
        mt = corroborate(mt, commutator)
    except PolyError:
        commutator = None
    payload = mt.to_json()
    if commutator is not None:
        payload["commutator"] = commutator.to_json()["lambda"]
    if args.commutator and commutator is not None:
        human = f"search: {mt.value}; commutator: {commutator}"
    else:
        human = f"{mt.value} [{mt.status}]"
    _emit(args, payload, human)
    return EXIT_OK


def cmd_psd(args) -> int:
    p = _load_poly(args)
    tangential = Poly(p.n, {k: c for k, c in p.terms.items()
                            if k[0][0] == 0 and k[1][0] == 0})
    verdict = psd_verdict(tangential, samples=args.samples, seed=args.seed,
                          lattice_den=args.cs_lattice_denominator)
    human = f"{verdict.kind}"
    if verdict.kind == KIND_CERTIFIED:
        human += f" (tier {verdict.tier})"
    elif verdict.kind == KIND_REFUTED:
        human += f" witness value {verdict.witness['value']}"
    else:
        human += f" after {verdict.samples_tried} samples"
    _emit(args, verdict.to_json(), human)
    if verdict.kind == KIND_UNKNOWN and args.require_certificate:
        return EXIT_UNKNOWN
    return EXIT_OK


def cmd_normalize(args) -> int:
    r = _load_poly(args)
    if args.weight and args.weight != "auto":
        mu = _parse_weight(args.weight, r.n)
    else:
        mu = _auto_weight(r, args.degree_bound)
    try:
        nf = normalize(r, mu, assert_psc=args.assert_psc)
    except PseudoconvexityError as exc:
        print(f"pseudoconvexity contradiction: {exc}", file=sys.stderr)
        return EXIT_CONTRADICTION
    ok, violations = verify_normal_form(nf, r, mu)
    payload = nf.to_json()
    payload["verified"] = ok
    payload["violations"] = violations
    lines = [f"weight: {nf.mu_final}"]
    if nf.lowered:
        lines.append("descent: " + "; ".join(nf.descent))
    lines.append("K: " + str(nf.K))
    lines.append("A: [" + ", ".join(rat_str(a) for a in nf.A) + "]")
    lines.append(f"residual: {nf.residual}")
    lines.append(f"verified: {ok}")
    for w in nf.warnings:
        lines.append(f"warning: {w}")
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK if ok else EXIT_CONTRADICTION


def cmd_boundary_system(args) -> int:
    r = _load_poly(args)
    bs = build_boundary_system(r, args.list_bound)
    problems = audit_boundary_system(bs)
    payload = bs.to_json()
    payload["audit"] = problems
    human = f"commutator multitype: {bs.commutator_multitype()}\n" \
            f"Levi rank: {bs.rank}; codimension slots: " \
            f"{sorted(bs.slow)}; audit: {'ok' if not problems else problems}"
    _emit(args, payload, human)
    return EXIT_OK if not problems else EXIT_CONTRADICTION


def cmd_torsion(args) -> int:
    r = _load_poly(args)
    bs = build_boundary_system(r, args.list_bound)
    try:
        bs2 = normalize_first_block(bs, r)
    except PseudoconvexityViolation as exc:
        print(f"pseudoconvexity violation: {exc}", file=sys.stderr)
        return EXIT_CONTRADICTION
    except BoundaryConstructionError as exc:
        raise CliError(str(exc)) from exc
    report = detect_torsion(bs2, r)
    payload = report.to_json()
    if not report.applicable:
        human = f"torsion: not applicable ({report.detail})"
    elif report.torsion:
        human = (f"torsion at slot {report.slot}: obstruction "
                 f"{report.obstruction} (linear coefficient "
                 f"{report.linear_coeff})")
    else:
        human = f"no torsion at slot {report.slot}"
    _emit(args, payload, human)
    return EXIT_OK


def cmd_enumerate(args) -> int:
    weights = enumerate_multitypes(args.n, Fraction(args.max_type))
    bound = counting_bound(args.n, Fraction(args.max_type))
    for w in weights:
        ok, _ = is_admissible(w)
        if not ok:
            raise CliError(f"enumerated weight {w} is not admissible",
                           EXIT_CONTRADICTION)
    payload = {"count": len(weights), "bound": bound,
               "weights": [w.to_json()["lambda"] for w in weights]}
    human = "\n".join(str(w) for w in weights) + \
            f"\nenumerated {len(weights)} <= {bound}"
    _emit(args, payload, human)
    return EXIT_OK


# ----------------------------------------------------------------------
# bundled worked examples
# ----------------------------------------------------------------------


def _example_sq_identity() -> bool:
    ok = True
    for p in (2, 3):
        for q in (2, 3):
            for eps in (Fraction(1, 2), Fraction(9, 10)):
                lhs = parse_poly(
                    f"|z2^{p} + ({eps.numerator}/{eps.denominator})*z3^{q}|^2",
                    3) + parse_poly(
                    f"(1 - ({eps.numerator}/{eps.denominator})^2)*|z3|^{2*q}",
                    3)
                rhs = parse_poly(
                    f"|z2|^{2*p} + |z3|^{2*q} + "
                    f"2*({eps.numerator}/{eps.denominator})"
                    f"*Re(z2^{p}*zbar3^{q})", 3)
                ok = ok and (lhs - rhs).is_zero()
    return ok


def _example_weighted_model() -> bool:
    r = parse_poly("-2*Re(z1) + |z2|^8 + |z2|^4*|z3|^6", 3)
    mt = multitype_search(r)
    if [str(e) for e in mt.value.entries] != ["1", "8", "12"]:
        return False
    nf = normalize(r, mt.value.weight(), assert_psc=True)
    ok, _ = verify_normal_form(nf, r, mt.value.weight())
    return ok and nf.K == [[4], [2, 3]] and nf.A == [Fraction(1), Fraction(1)] \
        and nf.residual.is_zero()


def _example_rank_gap() -> bool:
    r = parse_poly("Re(z1) + (Re(z2) + |z3|^2)^2", 3)
    mt = multitype_search(r)
    bs = build_boundary_system(r)
    c = bs.commutator_multitype()
    return [str(e) for e in mt.value.entries] == ["1", "2", "4"] and \
        [str(e) for e in c.entries] == ["1", "2", "inf"] and \
        mt.value.entries < c.entries


def _example_four_variable_selection() -> bool:
    r = parse_poly(
        "-2*Re(z1) + |z2|^4 + |z2|^2*|z3|^2 + |z2|^2*|z4|^2 + |z3|^2*|z4|^2", 4)
    mt = multitype_search(r)
    nf = normalize(r, mt.value.weight(), assert_psc=True)
    return nf.K == [[2], [1, 1], [0, 1, 1]]


def _torsion_model(eps: Fraction = Fraction(1, 10)) -> Poly:
    e = f"({eps.numerator}/{eps.denominator})"
    return parse_poly(
        "-2*Re(z1) + |z2|^6 + |z2|^2*|z3|^6 + |z2|^4*|z3|^2*|z4|^2"
        f" + |z2|^2*|z3|^4*|z4|^4 + 2*{e}*Re(z2*zbar2*z3^2*zbar3^3*z4*zbar4)"
        " + |z3|^8*|z4|^2", 4)


def _example_torsion() -> bool:
    r = _torsion_model()
    p = Poly(4, {k: c for k, c in r.terms.items()
                 if k[0][0] == 0 and k[1][0] == 0})
    verdict = psd_verdict(p)
    if verdict.kind != KIND_CERTIFIED or verdict.tier != 2:
        return False
    bs = build_boundary_system(r)
    bs2 = normalize_first_block(bs, r)
    report = detect_torsion(bs2, r)
    return report.applicable and report.torsion


def _example_counting(n: int = 3, m: int = 6) -> bool:
    weights = enumerate_multitypes(n, m)
    if len(weights) > counting_bound(n, m):
        return False
    return all(is_admissible(w)[0] for w in weights)


EXAMPLES = {
    "sq-identity": _example_sq_identity,
    "weighted-model": _example_weighted_model,
    "rank-gap": _example_rank_gap,
    "four-variable": _example_four_variable_selection,
    "torsion": _example_torsion,
    "counting": _example_counting,
}


def cmd_examples(args) -> int:
    failures = 0
    for name, fn in EXAMPLES.items():
        if args.only and name != args.only:
            continue
        if name == "counting" and (args.n or args.m):
            ok = _example_counting(args.n or 3, args.m or 6)
        else:
            ok = fn()
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
        if not ok:
            failures += 1
    return EXIT_OK if failures == 0 else EXIT_CONTRADICTION


# ----------------------------------------------------------------------
# argument parsing
# ----------------------------------------------------------------------


def _add_io(sub, needs_n=True):
    sub.add_argument("input", nargs="?", help="input file (expression or JSON)")
    sub.add_argument("--expr", help="inline expression")
    if needs_n:
        sub.add_argument("--n", type=int, help="ambient dimension")
    sub.add_argument("--json", action="store_true", help="JSON output")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="catlin",
        description="Exact multitype, normal form, and boundary-system "
                    "computations for polynomial hypersurface models.")
    ap.add_argument("--seed", type=int, default=0, help="sampling seed")
    sp = ap.add_subparsers(dest="command", required=True)

    s = sp.add_parser("parse", help="parse and canonicalize a polynomial")
    _add_io(s)
    s.set_defaults(fn=cmd_parse)

    s = sp.add_parser("multitype", help="multitype search with commutator "
                                        "corroboration")
    _add_io(s)
    s.add_argument("--degree-bound", type=int, default=4)
    s.add_argument("--commutator", action="store_true",
                   help="print search and commutator values separately")
    s.set_defaults(fn=cmd_multitype)

    s = sp.add_parser("psd", help="positivity verdict for the Levi form")
    _add_io(s)
    s.add_argument("--samples", type=int, default=200)
    s.add_argument("--cs-lattice-denominator", type=int, default=4)
    s.add_argument("--require-certificate", action="store_true")
    s.set_defaults(fn=cmd_psd)

    s = sp.add_parser("normalize", help="balanced sum-of-squares normal form")
    _add_io(s)
    s.add_argument("--weight", default="auto",
                   help='comma-separated weight entries or "auto"')
    s.add_argument("--degree-bound", type=int, default=4)
    s.add_argument("--assert-psc", action="store_true",
                   help="treat positivity failures as contradictions")
    s.set_defaults(fn=cmd_normalize)

    s = sp.add_parser("boundary-system", help="commutator multitype and "
                                              "boundary system")
    _add_io(s)
    s.add_argument("--list-bound", type=int, default=None)
    s.set_defaults(fn=cmd_boundary_system)

    s = sp.add_parser("torsion", help="first-block normalization and torsion "
                                      "detection")
    _add_io(s)
    s.add_argument("--list-bound", type=int, default=None)
    s.set_defaults(fn=cmd_torsion)

    s = sp.add_parser("enumerate", help="enumerate multitypes up to a type "
                                        "bound")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--max-type", required=True)
    s.add_argument("--json", action="store_true")
    s.set_defaults(fn=cmd_enumerate)

    s = sp.add_parser("examples", help="run the bundled worked examples")
    s.add_argument("--only", help="run a single named example")
    s.add_argument("--n", type=int, default=None)
    s.add_argument("--m", type=int, default=None)
    s.add_argument("--json", action="store_true")
    s.set_defaults(fn=cmd_examples)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (NonRealError, PolyError, OSError, json.JSONDecodeError,
            ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
