"""Command line entry point ``belltax``.

Exit codes: 0 success, 1 an ``--assert`` expectation failed, 2 usage or
input error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from .constructors import CONSTRUCTOR_NAMES, TRANSFORMS, construct, derive_class_variant
from .inequalities import SQUARED, VARIANTS, WignerTriple, delta_threshold, epsilon_max, generalized_wbi, triple_from, usual_wbi
from .jsonio import dumps, load_distribution, save_distribution
from .probcore import UNDEFINED, BelltaxError, UsageError, check_autonomy, deviation_profile, to_exact
from .taxonomy import ClassId, Partition, classification

EXIT_OK, EXIT_ASSERT, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _number(text: str):
    """Rational for 'n/d' or plain decimals, so exact inputs stay exact."""
    try:
        value = to_exact(text)
    except UsageError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    return value if "/" in text else float(value)


def _triple(text: str) -> WignerTriple:
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("--triple needs three comma-separated values p13,p12,p23")
    try:
        values = [to_exact(p) if "/" in p else float(p) for p in parts]
        return WignerTriple(*values)
    except (BelltaxError, ValueError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _default_seed() -> int:
    raw = os.environ.get("BELLTAX_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"BELLTAX_SEED must be an integer, got {raw!r}") from None


def _regime(args):
    from .verifier import STRICT, nearly

    if args.regime == "strict":
        return STRICT
    return nearly(args.delta if args.delta is not None else 1e-3)


def _emit(args, payload: dict, text: str) -> None:
    out = json.dumps(payload, indent=2) if args.json else text
    if getattr(args, "out", None) and args.command in ("report",):
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(out + "\n")
    else:
        print(out)


def _check_assert(args, ok: bool, what: str) -> int:
    if args.expect is None:
        return EXIT_OK
    if ok:
        return EXIT_OK
    print(f"assertion failed: expected {args.expect}, got {what}", file=sys.stderr)
    return EXIT_ASSERT


# ---------------------------------------------------------------------------
# subcommands


def cmd_classify(args) -> int:
    P = load_distribution(args.input)
    parts = list(Partition) if args.partition == "both" else [Partition.parse(args.partition)]
    results = [classification(P, p, args.tol) for p in parts]
    _emit(
        args,
        {
            "classes": [
                {"class": str(c.class_id), "strength": c.strength.value, "tie": c.tie, "valid": list(c.valid)}
                for c in results
            ]
        },
        "\n".join(str(c) for c in results),
    )
    if args.expect is None:
        return EXIT_OK
    want = args.expect.strip()
    if want.lower() in ("local", "weak", "strong"):
        ok = all(c.strength.value == want.lower() for c in results)
    else:
        target = ClassId.parse(want)
        ok = any(c.class_id == target for c in results)
    return _check_assert(args, ok, ", ".join(str(c) for c in results))


def cmd_check(args) -> int:
    if args.input is None and args.triple is None:
        raise UsageError("check needs --in or --triple")
    payload, lines = {}, []
    if args.input is not None:
        P = load_distribution(args.input)
        triple = triple_from(P)
        if triple is UNDEFINED:
            raise UsageError("the Wigner triple is undefined: a needed setting pair has zero probability")
        profile = deviation_profile(P)
        eps = profile.epsilon
        autonomy = check_autonomy(P, args.tol if args.tol is not None else (0 if P.exact else 1e-9))
        payload.update(
            autonomy=autonomy,
            max_delta=float(profile.max_delta),
            epsilon=eps,
        )
        lines += [f"autonomy: {'yes' if autonomy else 'no'}", f"max delta = {float(profile.max_delta):.6g}", f"eps = {eps:.6g}"]
        if args.regime is not None:
            regime = _regime(args)
            residual = regime.residual(P)
            payload["regime"] = {"name": regime.name, "residual": residual}
            lines.append(f"regime {regime.name}: residual {residual:.3g}")
    else:
        triple = args.triple
        eps = float(args.delta) ** (1 / 3) if args.delta else 0.0
        payload["epsilon"] = eps
    usual = usual_wbi(triple)
    payload["triple"] = [str(x) if isinstance(x, Fraction) else float(x) for x in triple.as_tuple()]
    payload["usual"] = usual.to_dict()
    lines.append(f"triple (p13, p12, p23) = ({', '.join(str(x) for x in triple.as_tuple())})")
    lines.append(f"usual WBI: {usual.lhs} <= {usual.rhs}  margin {usual.margin}  {'VIOLATED' if usual.violated else 'holds'}")
    generalized = None
    if eps < 1:
        generalized = generalized_wbi(triple, eps, args.variant)
        payload["generalized"] = generalized.to_dict()
        lines.append(
            f"generalized WBI at eps={eps:.6g}: margin {float(generalized.margin):.6g}  "
            f"{'VIOLATED' if generalized.violated else 'holds'}"
        )
    _emit(args, payload, "\n".join(lines))
    if args.expect is None:
        return EXIT_OK
    want = args.expect.strip().lower()
    if want == "holds":
        return _check_assert(args, not usual.violated, "violated" if usual.violated else "holds")
    if want == "violated":
        return _check_assert(args, usual.violated, "violated" if usual.violated else "holds")
    if want == "generalized-holds":
        ok = generalized is not None and not generalized.violated
        return _check_assert(args, ok, "violated" if not ok else "holds")
    raise UsageError(f"check --assert expects holds, violated or generalized-holds, got {args.expect!r}")


def cmd_construct(args) -> int:
    P = construct(args.name, delta=args.delta, p=args.p, a_settings=args.a_settings, b_settings=args.b_settings)
    if args.transform:
        P = derive_class_variant(P, *args.transform)
    text = dumps(P)
    if args.out:
        save_distribution(P, args.out)
        c = classification(P, Partition.ALPHA, args.tol)
        print(f"wrote {args.out} ({c})", file=sys.stderr)
    else:
        print(text)
    return EXIT_OK


def cmd_threshold(args) -> int:
    if args.triple is None:
        raise UsageError("threshold needs --triple p13,p12,p23")
    tol = args.tol if args.tol is not None else 1e-12
    eps = epsilon_max(args.triple, tol, args.variant)
    if eps is None:
        _emit(args, {"eps_max": None, "delta": None}, "the usual inequality holds; no threshold")
        return _check_assert(args, args.expect in (None, "holds"), "holds")
    delta = delta_threshold(args.triple, tol, args.variant)
    _emit(args, {"eps_max": eps, "delta": delta}, f"eps_max = {eps:.6f}\ndelta = {delta:.4e}")
    return _check_assert(args, args.expect in (None, "violated"), "violated")


def cmd_verify(args) -> int:
    from .verifier import feasibility_search, partition_suite, reproduce_table1, witness_problems

    if args.suite == "partition":
        summary = partition_suite(args.restarts, args.seed, args.generator)
        d = summary.to_dict()
        _emit(args, d, "\n".join(f"{k}: {v}" for k, v in d.items()))
        return _check_assert(args, summary.ok, "failures" if not summary.ok else "ok")
    if args.class_id is None:
        raise UsageError("verify needs --class or --suite")
    cid = ClassId.parse(args.class_id)
    regime = _regime(args)
    if args.suite == "collapse":
        res = feasibility_search(cid.index, regime, seed=args.seed, restarts=args.restarts, stop_at_witness=False)
        d = res.to_dict()
        _emit(args, d, "\n".join(f"{k}: {v}" for k, v in d.items()))
        return _check_assert(args, res.max_outcome_variation <= 1e-6, f"variation {res.max_outcome_variation:.3g}")
    verdicts = reproduce_table1(regime, seed=args.seed, restarts=args.restarts, classes=[cid.index])
    v = next(x for x in verdicts if x.class_id == cid)
    problems = witness_problems(v)
    d = v.to_dict() | {"witness_problems": problems}
    text = f"{v.class_id} under {regime.name}: {v.status} ({v.glyph})"
    for key in ("statement", "reduces_to", "falsification_margin"):
        if key in v.evidence:
            text += f"\n  {key}: {v.evidence[key]}"
    if "search" in v.evidence and "witness_margin" in v.evidence["search"]:
        text += f"\n  witness margin: {v.evidence['search']['witness_margin']}"
    if problems:
        text += "\n  witness problems: " + "; ".join(problems)
    _emit(args, d, text)
    if args.out and v.witness is not None:
        save_distribution(v.witness, args.out)
    return _check_assert(args, args.expect is None or v.status == args.expect.strip().lower(), v.status)


def cmd_report(args) -> int:
    from .verifier import STRICT, nearly, render_table, reproduce_table1, table_json

    regimes = []
    if args.regime in (None, "strict"):
        regimes.append(("PCorr", STRICT))
    if args.regime in (None, "nearly"):
        regimes.append(("nPCorr", nearly(args.delta if args.delta is not None else 1e-3)))
    columns = {name: reproduce_table1(r, seed=args.seed, restarts=args.restarts) for name, r in regimes}
    text = table_json(columns) if args.json else render_table(columns)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="belltax", description="Classify two-wing hidden-variable models and check Wigner-Bell inequalities.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, tol=True):
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.add_argument("--assert", dest="expect", metavar="EXPECTATION", help="exit 1 unless the outcome matches")
        if tol:
            p.add_argument("--tol", type=float, default=None, help="comparison tolerance (default 0 exact, 1e-9 float)")

    p = sub.add_parser("classify", help="minimal product form of a distribution")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--partition", default="alpha", choices=["alpha", "beta", "both"])
    common(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("check", help="usual and corrected Wigner-Bell inequality")
    p.add_argument("--in", dest="input")
    p.add_argument("--triple", type=_triple)
    p.add_argument("--delta", type=_number, help="deviation probability for a bare --triple")
    p.add_argument("--regime", choices=["strict", "nearly"])
    p.add_argument("--variant", choices=VARIANTS, default=SQUARED)
    common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("construct", help="write a built-in distribution as JSON")
    p.add_argument("--name", required=True, choices=CONSTRUCTOR_NAMES)
    p.add_argument("--out")
    p.add_argument("--delta", type=_number)
    p.add_argument("--p", type=_number, help="weight of the ++ amplitude for the quantum state")
    p.add_argument("--a-settings", help="comma-separated angles")
    p.add_argument("--b-settings", help="comma-separated angles")
    p.add_argument("--transform", action="append", choices=TRANSFORMS)
    common(p)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("threshold", help="largest eps for which a triple still violates the corrected inequality")
    p.add_argument("--triple", type=_triple)
    p.add_argument("--variant", choices=VARIANTS, default=SQUARED)
    common(p)
    p.set_defaults(func=cmd_threshold)

    for name, helptext in (("verify", "verdict for one class, or a property suite"), ("report", "verdict table for all classes")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--regime", choices=["strict", "nearly"], default="strict" if name == "verify" else None)
        p.add_argument("--delta", type=_number)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--restarts", type=int, default=100)
        p.add_argument("--out")
        common(p, tol=False)
    verify = sub.choices["verify"]
    verify.add_argument("--class", dest="class_id")
    verify.add_argument("--suite", choices=["partition", "collapse"])
    verify.add_argument("--generator", choices=["uniform", "near-perfect"], default="uniform")
    verify.set_defaults(func=cmd_verify)
    sub.choices["report"].set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if hasattr(args, "seed") and args.seed is None:
            args.seed = _default_seed()
        if getattr(args, "restarts", 1) < 1:
            raise UsageError("--restarts must be at least 1")
        return args.func(args)
    except BelltaxError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


run = main

if __name__ == "__main__":
    sys.exit(main())
