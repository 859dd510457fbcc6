"""Command-line frontend: parse | jac | certify | solve | reduce | check.

Machine outputs are JSON with exact dyadic string encodings; parse and jac
print human-readable canonical text. Configuration precedence is flags,
then KKIT_-prefixed environment variables, then the documented defaults
(radius 8, depth 48, precision cap 4096, workers = logical cores).

Exit codes: 0 success, 1 UNKNOWN solve status, 2 usage error, 3 parse
error, 4 certification failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from fractions import Fraction

from .dyadic import Dyadic, Interval
from .enclose import Box, Shape
from .algebra import DependenceRelation, polynomial_text
from .certify import (Budget, Certificate, CertifyFailure, certificate_from_json,
                      certificate_to_json, certify_regular_zero,
                      check_certificate)
from .formula import ParseError, formula_text, parse, parse_system_text
from .reduce import eliminate_dependence, reduced_to_json
from .search import SearchConfig, solve_formula

EXIT_OK = 0
EXIT_UNKNOWN = 1
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_CERTIFY = 4

_BOX_PREC = 96


def _env(name: str, default, cast):
    raw = os.environ.get(f"KKIT_{name}")
    if raw is None:
        return default
    try:
        return cast(raw)
    except ValueError:
        raise SystemExit(f"invalid KKIT_{name}={raw!r}")


def _default_config() -> dict:
    return {
        "radius": _env("RADIUS", Fraction(8), Fraction),
        "depth": _env("DEPTH", 48, int),
        "precision": _env("PRECISION", 4096, int),
        "workers": _env("WORKERS", os.cpu_count() or 1, int),
        "seed": _env("SEED", 0, int),
    }


def _read_text(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _endpoint(raw) -> Dyadic:
    s = str(raw).strip()
    try:
        return Dyadic.parse(s)
    except ValueError:
        pass
    return Dyadic.from_fraction(Fraction(s), _BOX_PREC, round_up=False)


def _interval(pair) -> Interval:
    lo, hi = pair
    lo_s, hi_s = str(lo).strip(), str(hi).strip()
    try:
        return Interval(Dyadic.parse(lo_s), Dyadic.parse(hi_s))
    except ValueError:
        return Interval.from_fractions(Fraction(lo_s), Fraction(hi_s), _BOX_PREC)


def _parse_box(text: str, shape: Shape) -> Box:
    data = json.loads(text, parse_float=str, parse_int=str)
    if not isinstance(data, list):
        raise ValueError("box must be a JSON array")
    if data and not isinstance(data[0], list):
        data = [data]
    if len(data) != shape.n:
        raise ValueError(f"box has {len(data)} coordinates, system needs {shape.n}")
    return Box(shape, tuple(_interval(p) for p in data))


def _load_box_arg(arg: str, shape: Shape) -> Box:
    text = _read_text(arg) if os.path.exists(arg) else arg
    return _parse_box(text, shape)


def _load_formula_arg(arg: str):
    text = _read_text(arg) if os.path.exists(arg) else arg
    return parse(text.strip())


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def cmd_parse(args) -> int:
    try:
        f = _load_formula_arg(args.formula)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    _emit(formula_text(f), args.out)
    return EXIT_OK


def cmd_jac(args) -> int:
    try:
        sys_ = parse_system_text(_read_text(args.system))
    except (ParseError, ValueError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    lines = []
    for i, row in enumerate(sys_.jac):
        for j, entry in enumerate(row):
            lines.append(f"J[{i + 1}][{j + 1}] = {polynomial_text(entry)}")
    _emit("\n".join(lines), args.out)
    return EXIT_OK


def cmd_certify(args) -> int:
    cfgd = _default_config()
    try:
        sys_ = parse_system_text(_read_text(args.system))
        box = _load_box_arg(args.box, sys_.shape)
    except (ParseError, ValueError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    cap = args.precision if args.precision else cfgd["precision"]
    result = certify_regular_zero(sys_, box, Budget(precision_cap=cap))
    if isinstance(result, CertifyFailure):
        print(f"certification failed: {result.reason}: {result.detail}",
              file=sys.stderr)
        return EXIT_CERTIFY
    _emit(certificate_to_json(result), args.out)
    return EXIT_OK


def cmd_solve(args) -> int:
    cfgd = _default_config()
    try:
        f = _load_formula_arg(args.formula)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    radius = Fraction(args.radius) if args.radius else cfgd["radius"]
    cfg = SearchConfig(
        radius=Dyadic.from_fraction(radius, _BOX_PREC, round_up=True),
        max_depth=args.depth or cfgd["depth"],
        precision_cap=args.precision or cfgd["precision"],
        workers=args.workers or cfgd["workers"],
        seed=args.seed if args.seed is not None else cfgd["seed"],
    )
    t0 = time.monotonic()
    report = solve_formula(f, cfg)
    elapsed = time.monotonic() - t0
    _emit(report.to_json(timing=elapsed if args.timing else None), args.out)
    return EXIT_OK if report.status in ("SAT", "REGION-UNSAT") else EXIT_UNKNOWN


def _parse_relation(text: str) -> DependenceRelation:
    parts = text.split(";")
    if len(parts) != 3:
        raise ValueError("relation must be 'd;k1,...;g'")
    d = int(parts[0])
    k = tuple(int(v) for v in parts[1].split(",") if v.strip() != "")
    g = Fraction(parts[2]) if parts[2].strip() else Fraction(0)
    return DependenceRelation(d, k, g)


def cmd_reduce(args) -> int:
    try:
        sys_ = parse_system_text(_read_text(args.system))
        cert = certificate_from_json(_read_text(args.cert))
        rel = _parse_relation(args.relation)
    except (ParseError, ValueError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        reduced = eliminate_dependence(sys_, rel, cert)
    except ValueError as exc:
        print(f"reduction failed: {exc}", file=sys.stderr)
        return EXIT_CERTIFY
    _emit(reduced_to_json(reduced), args.out)
    return EXIT_OK


def cmd_check(args) -> int:
    try:
        cert = certificate_from_json(_read_text(args.cert))
    except (ParseError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    if check_certificate(cert):
        print("certificate OK")
        return EXIT_OK
    print("certificate INVALID", file=sys.stderr)
    return EXIT_CERTIFY


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kkit",
                                description="certified solving for restricted "
                                            "exponential polynomial systems")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("parse", help="echo a formula in canonical form")
    sp.add_argument("--formula", required=True,
                    help="formula file or inline text")
    sp.add_argument("--out")
    sp.set_defaults(fn=cmd_parse)

    sp = sub.add_parser("jac", help="print the formal Jacobian of a system file")
    sp.add_argument("--system", required=True)
    sp.add_argument("--out")
    sp.set_defaults(fn=cmd_jac)

    sp = sub.add_parser("certify", help="certify a regular zero in a box")
    sp.add_argument("--system", required=True)
    sp.add_argument("--box", required=True,
                    help="box file or inline JSON array of endpoint pairs")
    sp.add_argument("--precision", type=int)
    sp.add_argument("--out")
    sp.set_defaults(fn=cmd_certify)

    sp = sub.add_parser("solve", help="solve a formula file")
    sp.add_argument("--formula", required=True)
    sp.add_argument("--radius")
    sp.add_argument("--depth", type=int)
    sp.add_argument("--precision", type=int)
    sp.add_argument("--workers", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--timing", action="store_true",
                    help="include wall-clock timing in the report")
    sp.add_argument("--out")
    sp.set_defaults(fn=cmd_solve)

    sp = sub.add_parser("reduce", help="eliminate a certified dependence")
    sp.add_argument("--system", required=True)
    sp.add_argument("--cert", required=True)
    sp.add_argument("--relation", required=True, help="'d;k1,...;g'")
    sp.add_argument("--out")
    sp.set_defaults(fn=cmd_reduce)

    sp = sub.add_parser("check", help="re-verify a certificate file")
    sp.add_argument("--cert", required=True)
    sp.set_defaults(fn=cmd_check)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
