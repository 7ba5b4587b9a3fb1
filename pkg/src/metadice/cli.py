"""Command-line front end.

Reports go to stdout as JSON, a one-line human summary goes to stderr.
Exit codes: 0 success, 1 violations found, 2 usage or validation error.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction

from . import fractal, generation as gen_mod, presets
from .generation import (
    AdmissibilityError,
    BasicTuple,
    BasicTupleError,
    InfiniteIndex,
    MemberCapError,
    WeightFunction,
    build_generation,
    first_divergence,
    lambda_config,
    minimal_lambda,
)
from .preference import (
    GOLDEN_P,
    cycle_report,
    monte_carlo_rho,
    rho_q,
    trybula_triplet,
    win_probabilities,
)
from .quantile import format_rational, to_rational

EXIT_OK, EXIT_VIOLATIONS, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _rational(text: str) -> Fraction:
    try:
        return to_rational(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def _p_value(text: str):
    if text == "golden":
        return GOLDEN_P
    return _rational(text)


def _projection(text: str):
    if text == "best_fit_plane":
        return text
    try:
        i, j = (int(t) for t in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError("projection is best_fit_plane or i,j") from exc
    return (i, j)


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2) + "\n")


def _say(msg: str) -> None:
    sys.stderr.write(msg + "\n")


def _load(args, allow_float: bool = False):
    """BasicTuple from --preset/--tuple, or a float triple for ``trybula --p golden``."""
    name = args.preset
    if args.tuple is not None:
        if name is not None:
            raise UsageError("give either --preset or --tuple, not both")
        with open(args.tuple) as fh:
            return BasicTuple.from_dict(json.load(fh))
    if name is None:
        raise UsageError("one of --preset or --tuple is required")
    if name == "trybula":
        p = getattr(args, "p", None)
        if p is None:
            raise UsageError("trybula needs --p num/den or --p golden")
        if isinstance(p, float):
            if not allow_float:
                raise UsageError("--p golden (float mode) is only supported by preset and simulate")
            return trybula_triplet(p)
        return presets.trybula(p)
    try:
        return presets.get_preset(name)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from exc


def _config(basic: BasicTuple, args):
    if args.lam is not None:
        return lambda_config(basic, args.lam, args.strict)
    return minimal_lambda(basic, args.strict)


def cmd_preset(args) -> int:
    args.preset, args.tuple = args.name, None
    obj = _load(args, allow_float=True)
    if isinstance(obj, BasicTuple):
        _emit(obj.to_dict())
        _say(f"{obj.name or 'trybula'}: m={obj.m}, r={obj.r}, R={obj.R}, P={obj.cycle.min_probability}")
        return EXIT_OK
    report = cycle_report(obj)
    _emit(
        {
            "name": "trybula",
            "p": args.p,
            "float_mode": True,
            "members": [q.to_dict() for q in obj],
            "cycle": report.to_dict(),
        }
    )
    _say(f"trybula (float): P={report.min_probability:.15g}")
    return EXIT_OK


def _infinite_probe_indexes(m: int) -> list:
    idx = [InfiniteIndex((), (j,)) for j in range(1, m + 1)]
    idx.append(InfiniteIndex((), tuple(range(1, m + 1))))
    idx.append(InfiniteIndex((1, 2, 1), (m,)))
    idx.append(InfiniteIndex((1, 2, 1), (1,)))
    return idx


def cmd_verify(args) -> int:
    basic = _load(args)
    config = _config(basic, args)
    g = build_generation(basic, config, args.k)
    ones = WeightFunction.constant(1)
    reports = {"bijection": gen_mod.verify_bijection(g)}
    if args.k >= 1:
        reports["theorem1"] = gen_mod.verify_theorem1(g)
    if args.k >= 2:
        reports["meta_intransitivity"] = gen_mod.verify_meta_intransitivity(g)
    reports["proposition1"] = gen_mod.verify_proposition1(g, ones)
    if config.strict:
        probes = _infinite_probe_indexes(basic.m)
        reports["theorem2"] = gen_mod.verify_theorem2(basic, config, probes)
        reports["proposition2"] = gen_mod.verify_proposition2(basic, config, probes, ones)
    ok = all(rep.ok for rep in reports.values())
    _emit(
        {
            "basic": basic.name or basic.to_dict(),
            "lambda": format_rational(config.lam),
            "strict": config.strict,
            "k": args.k,
            "members": len(g),
            "reports": {k: v.to_dict() for k, v in reports.items()},
            "ok": ok,
        }
    )
    pairs = reports["theorem1"].pairs_checked if "theorem1" in reports else 0
    nviol = sum(len(getattr(v, "violations", None) or getattr(v, "duplicates", [])) for v in reports.values())
    _say(f"verify: {len(g)} members, {pairs} pairs, {nviol} violations")
    return EXIT_OK if ok else EXIT_VIOLATIONS


def cmd_dim(args) -> int:
    basic = _load(args)
    if args.lam is not None and args.lam <= 1:
        raise UsageError(f"lambda must exceed 1, got {args.lam}")
    rep = fractal.dimension_report(basic, args.lam)
    _emit(rep.to_dict())
    _say(f"d={rep.d:.6g}, d_sup={rep.d_sup:.6g}, fractal_dust={rep.fractal_dust}")
    return EXIT_OK


def _write(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def cmd_plot(args) -> int:
    basic = _load(args)
    config = _config(basic, args)
    g = build_generation(basic, config, args.k)
    cloud = fractal.embed_points(g)
    if args.csv is None and args.svg is None:
        args.csv = "-"
    if args.csv is not None:
        _write(args.csv, fractal.export_csv(cloud))
    if args.svg is not None:
        _write(args.svg, fractal.export_svg(cloud, args.projection))
    _say(f"plot: {len(cloud)} points in {cloud.n} coordinates, affine rank {cloud.affine_rank}")
    return EXIT_OK


def _within(est, exact, se) -> bool:
    if se == 0:
        return est == float(exact)
    return abs(est - float(exact)) <= 3 * se


def cmd_simulate(args) -> int:
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    obj = _load(args, allow_float=True)
    rows = []
    if args.k is None:
        members = obj.members if isinstance(obj, BasicTuple) else obj
        m = len(members)
        for i in range(m):
            lo, hi = members[i], members[(i + 1) % m]
            exact = rho_q(hi, lo)
            est = monte_carlo_rho(hi, lo, args.trials, args.seed + i)
            wp = win_probabilities(lo, hi)
            rows.append(
                {
                    "edge": [i + 1, (i + 1) % m + 1],
                    "exact_rho": _num(exact),
                    "estimate_rho": est.estimate,
                    "standard_error": est.standard_error,
                    "exact_p_less": _num(wp.less),
                    "estimate_p_less": (1 + est.estimate) / 2 if wp.tie == 0 else None,
                    "within_3se": _within(est.estimate, exact, est.standard_error),
                }
            )
    else:
        if not isinstance(obj, BasicTuple):
            raise UsageError("float mode cannot build generations")
        config = _config(obj, args)
        g = build_generation(obj, config, args.k)
        items = list(g.members.items())
        if len(items) < 2:
            raise UsageError("need at least two members to sample pairs")
        rng = random.Random(args.seed)
        for t in range(args.pairs):
            (ia, xa), (ib, xb) = rng.sample(items, 2)
            nu = first_divergence(ia, ib)
            exact = obj.rho_table[ia[nu - 1] - 1][ib[nu - 1] - 1]
            est = monte_carlo_rho(xa, xb, args.trials, args.seed + t)
            pair_exact = rho_q(xa, xb)
            rows.append(
                {
                    "pair": [list(ia), list(ib)],
                    "nu": nu,
                    "exact_rho": _num(exact),
                    "estimate_rho": est.estimate,
                    "standard_error": est.standard_error,
                    "within_3se": _within(est.estimate, exact, est.standard_error),
                    "pair_exact_rho": _num(pair_exact),
                    "pair_within_3se": _within(est.estimate, pair_exact, est.standard_error),
                }
            )
    ok = all(r["within_3se"] for r in rows)
    _emit({"trials": args.trials, "seed": args.seed, "k": args.k, "rows": rows, "ok": ok})
    _say(f"simulate: {sum(r['within_3se'] for r in rows)}/{len(rows)} estimates within 3 SE")
    return EXIT_OK if ok else EXIT_VIOLATIONS


def _num(v):
    return format_rational(v) if isinstance(v, Fraction) else v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="metadice", description="Meta-intransitive dice generations and their fractals."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def source(p, with_p=True):
        p.add_argument("--preset", help="ed, cid, sid or trybula")
        p.add_argument("--tuple", metavar="FILE", help="basic tuple JSON file")
        if with_p:
            p.add_argument("--p", type=_p_value, help="trybula parameter: num/den or 'golden'")

    def gen_opts(p):
        p.add_argument("--k", type=int, default=2, help="generation depth (default 2)")
        p.add_argument("--lambda", dest="lam", type=_rational, help="contraction lambda")
        p.add_argument("--strict", action="store_true", help="require lambda > 1 + R/r")

    p = sub.add_parser("preset", help="print a built-in basic tuple")
    p.add_argument("name")
    p.add_argument("--p", type=_p_value, help="trybula parameter: num/den or 'golden'")
    p.set_defaults(func=cmd_preset)

    p = sub.add_parser("verify", help="check a generation exhaustively")
    source(p)
    gen_opts(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("dim", help="similarity dimension report")
    source(p)
    p.add_argument("--lambda", dest="lam", type=_rational)
    p.set_defaults(func=cmd_dim)

    p = sub.add_parser("plot", help="export the point embedding as CSV and/or SVG")
    source(p)
    gen_opts(p)
    p.add_argument("--csv", nargs="?", const="-", metavar="PATH")
    p.add_argument("--svg", nargs="?", const="-", metavar="PATH")
    p.add_argument("--projection", type=_projection, default="best_fit_plane")
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("simulate", help="Monte Carlo cross-check of exact preferences")
    source(p)
    p.add_argument("--k", type=int, default=None, help="sample member pairs of generation k")
    p.add_argument("--lambda", dest="lam", type=_rational)
    p.add_argument("--strict", action="store_true")
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--pairs", type=int, default=10, help="member pairs to sample with --k")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, BasicTupleError, AdmissibilityError, MemberCapError, ValueError, OSError) as exc:
        _emit({"error": type(exc).__name__, "message": str(exc)})
        _say(f"error: {exc}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
