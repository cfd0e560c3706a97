"""Command-line front end.

Exit codes: 0 all checks pass, 1 a property failed, 2 bad input,
3 an internal invariant was violated.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .covering import (
    HALF,
    BallDifference,
    annulus_constant_1d,
    covering_number_interval,
    covering_number_linf_box,
    greedy_cover_1d,
    greedy_cover_annulus,
    lattice_cover_upper_bound,
    linf_box_certificate,
    volume_lower_bound,
    _max_admissible_pitch,
)
from .errors import InputError, InternalInvariantError, TheoremViolation
from .extremal import ExtremalParams, build_extremal, choose_params, convergence_table
from .measure import DiscreteDistribution, NormBall
from .rational import as_rational, ceil_q, format_rational
from .search import (
    LAWS,
    U64_MAX,
    claim1_witness,
    dinkelbach_maximize,
    monte_carlo_check,
    random_distribution,
    verify_theorem1,
    verify_theorem2,
)

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3


def rational_arg(text: str) -> Fraction:
    return as_rational(text)


rational_arg.__name__ = "rational"


def positive_rational_arg(text: str) -> Fraction:
    value = as_rational(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"must be > 0: {text}")
    return value


positive_rational_arg.__name__ = "positive rational"


def seed_arg(text: str) -> int:
    value = int(text)
    if not 0 <= value <= U64_MAX:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def int_list_arg(text: str) -> list[int]:
    try:
        values = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers: {text}") from None
    if not values or any(v < 1 for v in values):
        raise argparse.ArgumentTypeError("expected a non-empty list of positive integers")
    return values


def _p_arg(text: str):
    text = text.strip().lower()
    if text in {"1", "2"}:
        return int(text)
    if text in {"inf", "infinity"}:
        return math.inf
    raise argparse.ArgumentTypeError("norm must be 1, 2 or inf")


def _resolved(args) -> dict:
    out = {}
    for key, value in sorted(vars(args).items()):
        if key == "func":
            continue
        if isinstance(value, Fraction):
            value = format_rational(value)
        elif isinstance(value, float) and math.isinf(value):
            value = "inf"
        elif isinstance(value, Path):
            value = str(value)
        elif isinstance(value, list):
            value = [format_rational(v) if isinstance(v, Fraction) else v for v in value]
        out[key] = value
    return out


def _emit(args, text: str):
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _csv(rows, comments=()) -> str:
    buf = io.StringIO()
    for line in comments:
        buf.write(f"# {line}\n")
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def _load_distribution(path) -> DiscreteDistribution:
    try:
        obj = json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    try:
        return DiscreteDistribution.from_json(obj)
    except InputError as exc:
        raise InputError(f"{path}: {exc}") from None


def _checks_for(mu: DiscreteDistribution, b: Fraction, a: Fraction, p) -> list[dict]:
    checks = []
    if mu.dimension == 1:
        checks.append(verify_theorem2(mu, b, a).to_json())
        if 2 * b > a:
            try:
                report = claim1_witness(mu, b, a)
                checks.append({"check": "claim1_witness", "passed": True, **report.to_json()})
            except TheoremViolation as exc:
                checks.append({"check": "claim1_witness", "passed": False, "context": exc.context})
        F, K = NormBall.interval(b), NormBall.interval(a)
    else:
        F, K = NormBall(mu.dimension, p, b), NormBall(mu.dimension, p, a)
        checks.append(verify_theorem1(mu, F, K, "sum").to_json())
    checks.append(verify_theorem1(mu, F, K, "diff").to_json())
    return checks


def cmd_verify(args) -> int:
    if args.dist is not None:
        cases = [(0, None, _load_distribution(args.dist))]
    else:
        count = args.random if args.random is not None else 1000
        cases = [
            (k, (args.seed + k) % (U64_MAX + 1),
             random_distribution((args.seed + k) % (U64_MAX + 1), d=args.dimension, max_atoms=args.max_atoms))
            for k in range(count)
        ]
    results = []
    for index, seed, mu in cases:
        checks = _checks_for(mu, args.b, args.a, args.p)
        case = {"case": index, "seed": seed, "passed": all(c["passed"] for c in checks), "checks": checks}
        if args.dist is not None:
            case["distribution"] = mu.to_json()
        results.append(case)
    failures = sum(not case["passed"] for case in results)
    if args.format == "csv":
        rows = [["case", "seed", "check", "passed", "strict", "constant", "lhs", "rhs", "slack", "slack_decimal"]]
        for case in results:
            for c in case["checks"]:
                rows.append([case["case"], "" if case["seed"] is None else case["seed"], c["check"], c["passed"],
                             c.get("strict", ""), c.get("constant", ""), c.get("lhs", ""), c.get("rhs", ""),
                             c.get("slack", c.get("witness_mass", "")), c.get("slack_decimal", "")])
        _emit(args, _csv(rows, [json.dumps(_resolved(args)), f"failures={failures}"]))
    else:
        _emit(args, _dump({"command": "verify", "config": _resolved(args), "passed": failures == 0,
                           "failures": failures, "cases": results}))
    return EXIT_OK if failures == 0 else EXIT_FAIL


def cmd_extremal(args) -> int:
    table = convergence_table(args.a, args.n)
    if args.format == "csv":
        comments = [
            json.dumps(_resolved(args)),
            f"epsilon={format_rational(table.epsilon)} r={format_rational(table.r)} "
            f"predicted_limit={table.predicted_limit} n0={table.n0} ok={table.ok}",
        ]
        _emit(args, _csv(table.csv_rows(), comments))
    else:
        _emit(args, _dump({"command": "extremal", "config": _resolved(args), **table.to_json()}))
    return EXIT_OK if table.ok else EXIT_FAIL


def cmd_cover(args) -> int:
    b, a, d, rho = args.b, args.a, args.d, args.rho
    F, K = NormBall(d, args.p_f, b), NormBall(d, args.p_k, a)
    exact = None
    if args.mode == "sum":
        if d == 1:
            exact = covering_number_interval(b, a, rho)
            cert = greedy_cover_1d(-b, b, a, rho)
        elif F.p == K.p == math.inf and rho == HALF:
            exact = covering_number_linf_box(b, a, d)
            cert = linf_box_certificate(b, a, d)
        else:
            cert = lattice_cover_upper_bound(F, K, rho, args.pitch or _max_admissible_pitch(K, rho))
        lower = volume_lower_bound(F, K, rho)
    else:
        if d == 1:
            cert = greedy_cover_annulus(b, a, rho)
            exact = cert.bound
            if rho == HALF and annulus_constant_1d(b, a) != exact + 1:
                raise InternalInvariantError("annulus constant mismatch")
        else:
            cert = lattice_cover_upper_bound(BallDifference(F, K), K, rho,
                                             args.pitch or _max_admissible_pitch(K, rho))
        lower = volume_lower_bound(BallDifference(F, K), K, rho)
    cert_json = cert.to_json()
    if not cert_json["verified"]:
        raise InternalInvariantError(f"covering certificate failed verification: {cert_json}")
    if exact is not None and exact != cert.bound:
        raise InternalInvariantError(f"exact covering number {exact} != certificate size {cert.bound}")
    number = exact if exact is not None else None
    report = {
        "command": "cover",
        "config": _resolved(args),
        "mode": args.mode,
        "covering_number": number,
        "exact": exact is not None,
        "upper_bound": cert.bound,
        "volume_lower_bound": format_rational(lower),
        "lower_bound": max(1 if args.mode == "sum" else 0, ceil_q(lower)),
        "constant": cert.bound if args.mode == "sum" else cert.bound + 1,
        "certificate": cert_json,
    }
    if args.mode == "diff" and d == 1 and rho == HALF:
        report["annulus_constant_1d"] = annulus_constant_1d(b, a)
    _emit(args, _dump(report))
    return EXIT_OK


def cmd_search(args) -> int:
    if args.support is not None:
        support = [as_rational(s) for s in args.support.split(",") if s.strip()]
        source = {"support": [format_rational(s) for s in support]}
    else:
        if args.n is None:
            raise InputError("--support-from extremal needs --n")
        eps, r = choose_params(args.a)
        mu = build_extremal(ExtremalParams(args.n[0], args.a, eps, r))
        support = [x for (x,) in mu.points]
        source = {"extremal": {"n": args.n[0], "a": format_rational(args.a),
                               "epsilon": format_rational(eps), "r": format_rational(r)}}
    result = dinkelbach_maximize(support, args.b, args.a, restarts=args.restarts, max_iters=args.max_iters,
                                 tol=args.tol, seed=args.seed)
    _emit(args, _dump({"command": "search", "config": _resolved(args), "source": source, **result.to_json()}))
    if result.exact_ratio >= result.bound:
        raise TheoremViolation(f"search found ratio {result.exact_ratio} >= {result.bound}")
    return EXIT_OK


def cmd_mc(args) -> int:
    result = monte_carlo_check(args.law, args.b, args.a, args.samples, args.seed)
    _emit(args, _dump({"command": "mc", "config": _resolved(args), **result.to_json()}))
    return EXIT_FAIL if result.flagged else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="symineq", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, formats=("json",)):
        p.add_argument("--output", "-o", type=Path, default=None, help="write the report here instead of stdout")
        p.add_argument("--format", choices=formats, default=formats[0])

    p = sub.add_parser("verify", help="check the inequalities on a given or random laws")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--dist", type=Path, help="distribution JSON file")
    src.add_argument("--random", type=int, help="number of seeded random distributions (default 1000)")
    p.add_argument("--b", type=positive_rational_arg, required=True)
    p.add_argument("--a", type=positive_rational_arg, required=True)
    p.add_argument("--seed", type=seed_arg, default=0)
    p.add_argument("--max-atoms", type=int, default=12)
    p.add_argument("--dimension", type=int, default=1)
    p.add_argument("--p", type=_p_arg, default=math.inf, help="norm for d > 1 (1, 2 or inf)")
    common(p, ("json", "csv"))
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("extremal", help="convergence table for the sharpness construction (b = 1)")
    p.add_argument("--a", type=positive_rational_arg, required=True)
    p.add_argument("--n", type=int_list_arg, required=True, help="comma-separated n values")
    common(p, ("csv", "json"))
    p.set_defaults(func=cmd_extremal)

    p = sub.add_parser("cover", help="covering numbers and certificates")
    p.add_argument("--b", type=positive_rational_arg, required=True, help="radius of F")
    p.add_argument("--a", type=positive_rational_arg, required=True, help="radius of K")
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--p-f", type=_p_arg, default=math.inf)
    p.add_argument("--p-k", type=_p_arg, default=math.inf)
    p.add_argument("--rho", type=positive_rational_arg, default=HALF)
    p.add_argument("--pitch", type=positive_rational_arg, default=None)
    p.add_argument("--mode", choices=("sum", "diff"), default="sum")
    common(p)
    p.set_defaults(func=cmd_cover)

    p = sub.add_parser("search", help="Dinkelbach search for a worst-case law on a fixed support")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--support", help="comma-separated rational support points")
    src.add_argument("--support-from", choices=("extremal",))
    p.add_argument("--a", type=positive_rational_arg, required=True)
    p.add_argument("--b", type=positive_rational_arg, required=True)
    p.add_argument("--n", type=int_list_arg, default=None, help="n for --support-from extremal")
    p.add_argument("--seed", type=seed_arg, default=0)
    p.add_argument("--restarts", type=int, default=32)
    p.add_argument("--max-iters", type=int, default=200)
    p.add_argument("--tol", type=float, default=1e-10)
    common(p)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("mc", help="Monte Carlo spot check for a continuous law")
    p.add_argument("--law", choices=LAWS, required=True)
    p.add_argument("--b", type=positive_rational_arg, required=True)
    p.add_argument("--a", type=positive_rational_arg, required=True)
    p.add_argument("--samples", type=int, default=10**6)
    p.add_argument("--seed", type=seed_arg, default=0)
    common(p)
    p.set_defaults(func=cmd_mc)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except TheoremViolation as exc:
        print(f"property failure: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InternalInvariantError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
