"""Command-line front end.

Exit codes: 0 the predicate holds / a witness was found / the report
verdict is true (``order`` exits 0 for either verdict), 1 the predicate
fails or nothing was found, 2 parse or usage error, 3 budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from importlib import resources

from treefree.errors import BudgetExhausted, ParseError
from treefree.freeness import check_freeness_hypotheses
from treefree.hnn import (
    MultipleHnnPresentation,
    are_equal,
    format_hnn_word,
    load_presentation,
    parse_hnn_word,
    parse_presentation,
    pinch_reduce,
)
from treefree.order import DEFAULT_BALL_BUDGET, enumerate_ball, search_cone, verdict_to_json
from treefree.torsion import (
    DEFAULT_SEARCH_BUDGET,
    TorsionCertificate,
    search_certificate,
    verify_certificate,
)
from treefree.words import Alphabet, is_conjugate, tokenize, translation_length

OK, FAIL, USAGE, BUDGET = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParseError(f"{self.prog}: {message}")


def bundled_presentation(name: str) -> str | None:
    """Text of a presentation shipped with the package (``gamma.txt``, ``free3.txt``)."""
    res = resources.files("treefree").joinpath("data", os.path.basename(name))
    if res.is_file():
        return res.read_text(encoding="utf-8")
    return None


def resolve_presentation(path: str) -> MultipleHnnPresentation:
    if os.path.exists(path):
        try:
            return load_presentation(path)
        except OSError as exc:
            raise ParseError(f"cannot read {path}: {exc}") from None
    text = bundled_presentation(path)
    if text is None:
        raise ParseError(f"no such presentation file: {path}")
    return parse_presentation(text)


def _free_alphabet(args, texts) -> Alphabet:
    if args.presentation:
        return resolve_presentation(args.presentation).base
    names: list[str] = []
    for text in texts:
        for name, _ in tokenize(text):
            if name not in names:
                names.append(name)
    return Alphabet(names or ["x"])


def _emit(args, payload: dict, plain: str) -> None:
    if args.output == "plain":
        print(plain)
    else:
        print(json.dumps(payload, sort_keys=False))


def cmd_reduce(args):
    a = _free_alphabet(args, [args.word])
    w = a.format(a.parse(args.word))
    _emit(args, {"word": w}, w)
    return OK


def cmd_tl(args):
    a = _free_alphabet(args, [args.word])
    w = a.parse(args.word)
    n = translation_length(w)
    _emit(args, {"word": a.format(w), "translation_length": n}, str(n))
    return OK


def cmd_conj(args):
    a = _free_alphabet(args, [args.w1, args.w2])
    result = is_conjugate(a.parse(args.w1), a.parse(args.w2))
    _emit(args, {"conjugate": result}, str(result).lower())
    return OK if result else FAIL


def cmd_triv(args):
    p = resolve_presentation(args.presentation)
    w = parse_hnn_word(p, args.word)
    reduced, reports = pinch_reduce(p, w)
    trivial = len(reduced.syllables) == 1 and not reduced.syllables[0]
    _emit(
        args,
        {"trivial": trivial, "reduced": format_hnn_word(p, reduced), "pinches": len(reports)},
        str(trivial).lower(),
    )
    return OK if trivial else FAIL


def cmd_eq(args):
    p = resolve_presentation(args.presentation)
    result = are_equal(p, parse_hnn_word(p, args.w1), parse_hnn_word(p, args.w2))
    _emit(args, {"equal": result}, str(result).lower())
    return OK if result else FAIL


def cmd_check_freeness(args):
    p = resolve_presentation(args.presentation)
    report = check_freeness_hypotheses(p)
    data = report.to_json(p)
    plain = "verdict: " + str(report.verdict).lower()
    if report.failures:
        plain += "; " + "; ".join(report.failures)
    _emit(args, data, plain)
    return OK if report.verdict else FAIL


def _read_cert(text: str) -> str:
    if os.path.exists(text):
        with open(text, encoding="utf-8") as fh:
            return fh.read()
    return text


def cmd_verify_gt(args):
    p = resolve_presentation(args.presentation)
    cert = TorsionCertificate.from_json(p, _read_cert(args.cert))
    ok = verify_certificate(p, cert)
    _emit(args, {"valid": ok, "certificate": cert.to_json(p)}, str(ok).lower())
    return OK if ok else FAIL


def cmd_search_gt(args):
    p = resolve_presentation(args.presentation)
    g = parse_hnn_word(p, args.g)
    bounds = {"max_factors": args.max_factors, "max_conj_len": args.max_conj_len}
    try:
        cert = search_certificate(
            p, g, args.max_factors, args.max_conj_len, budget=args.budget
        )
    except BudgetExhausted as exc:
        _emit(args, {"result": "budget-exhausted", "evaluations": exc.used, **bounds}, "budget exhausted")
        return BUDGET
    if cert is None:
        _emit(args, {"result": "none", "certificate": None, **bounds}, "none")
        return FAIL
    data = cert.to_json(p)
    _emit(args, {"result": "found", "certificate": data, **bounds}, json.dumps(data))
    return OK


def cmd_order(args):
    p = resolve_presentation(args.presentation)
    try:
        ball = enumerate_ball(
            p, args.radius, budget=args.budget, conjugates=args.mode == "bi"
        )
    except BudgetExhausted as exc:
        _emit(
            args,
            {"mode": args.mode, "radius": args.radius, "verdict": "budget-exhausted", "equality_tests": exc.used},
            "budget exhausted",
        )
        return BUDGET
    verdict = search_cone(ball, args.mode)
    data = verdict_to_json(ball, verdict)
    if verdict.refuted:
        plain = f"refuted: no {args.mode}-order exists ({len(data['trace'])} trace steps)"
    else:
        plain = (
            f"no-obstruction: consistent cone on {len(ball)} elements "
            "(inconclusive beyond the ball)"
        )
    _emit(args, data, plain)
    return OK


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--output", choices=("json", "plain"), default="json")

    pres = _Parser(add_help=False)
    pres.add_argument("-p", "--presentation", required=True, help="presentation file")

    opt_pres = _Parser(add_help=False)
    opt_pres.add_argument("-p", "--presentation", help="presentation file for the alphabet")

    parser = _Parser(prog="treefree", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("reduce", parents=[common, opt_pres], help="freely reduce a word")
    s.add_argument("word")
    s.set_defaults(func=cmd_reduce)

    s = sub.add_parser("tl", parents=[common, opt_pres], help="translation length in F")
    s.add_argument("word")
    s.set_defaults(func=cmd_tl)

    s = sub.add_parser("conj", parents=[common, opt_pres], help="conjugacy in F")
    s.add_argument("w1")
    s.add_argument("w2")
    s.set_defaults(func=cmd_conj)

    s = sub.add_parser("triv", parents=[common, pres], help="triviality in the HNN extension")
    s.add_argument("word")
    s.set_defaults(func=cmd_triv)

    s = sub.add_parser("eq", parents=[common, pres], help="equality in the HNN extension")
    s.add_argument("w1")
    s.add_argument("w2")
    s.set_defaults(func=cmd_eq)

    s = sub.add_parser("check-freeness", parents=[common, pres], help="hypothesis report")
    s.set_defaults(func=cmd_check_freeness)

    s = sub.add_parser("verify-gt", parents=[common, pres], help="verify a torsion certificate")
    s.add_argument("--cert", required=True, help="certificate JSON text or file")
    s.set_defaults(func=cmd_verify_gt)

    s = sub.add_parser("search-gt", parents=[common, pres], help="search a torsion certificate")
    s.add_argument("-g", required=True, help="candidate element")
    s.add_argument("--max-factors", type=int, required=True)
    s.add_argument("--max-conj-len", type=int, required=True)
    s.add_argument("--budget", type=int, default=DEFAULT_SEARCH_BUDGET)
    s.set_defaults(func=cmd_search_gt)

    s = sub.add_parser("order", parents=[common, pres], help="positive-cone search on a ball")
    s.add_argument("--mode", choices=("left", "bi"), required=True)
    s.add_argument("--radius", type=int, required=True)
    s.add_argument("--budget", type=int, default=DEFAULT_BALL_BUDGET)
    s.set_defaults(func=cmd_order)
    return parser


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "radius", 0) < 0 or getattr(args, "max_factors", 1) < 1 or getattr(args, "max_conj_len", 0) < 0:
            raise ParseError("bounds must be nonnegative (max-factors at least 1)")
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
