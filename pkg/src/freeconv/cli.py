"""Command-line front end.

Subcommands: moments, cumulants, commutator, anticommutator, iterate,
expr, density, check, table1.  Distributions are given in the compact
law grammar (semicircular:2, poisson:1,1, arcsine:1/2,
bernoulli:1/2,-1,1, atomic:(1/2@-1,1/2@1), projection:1/2); commutator
expressions use bracket syntax like [[1,2],[3,4]].

Rationals print exactly as p/q by default; --decimal switches to fixed
decimal rendering.  Exit status: 0 on success / all checks passing, 1
on a failed check or route disagreement, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from . import analytic, checks, freeops, mixedmoments, transforms
from .freeops import LawError, PreconditionError
from .ncpart import PartitionError
from .series import SeriesError, dump_series


def _fmt(value, decimal: int | None) -> str:
    if decimal is None:
        return str(value)
    return f"{float(value):.{decimal}f}"


def _parse_law(text: str):
    return freeops.parse_law(text)


def _table(rows: list[tuple], headers: tuple[str, ...]) -> str:
    cells = [headers] + [tuple(str(c) for c in row) for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(headers))]
    lines = []
    for i, row in enumerate(cells):
        lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
        if i == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines)


def _moment_cumulant_table(dist, decimal):
    r = dist.r_transform()
    rows = [(n, _fmt(dist.moment(n), decimal), _fmt(r.coef(n), decimal))
            for n in range(1, dist.order + 1)]
    return _table(rows, ("n", "moment", "cumulant"))


def cmd_moments(args) -> int:
    dist = freeops.make_law(_parse_law(args.law), args.order)
    if args.dump_series:
        print(f"# {transforms.TransformKind.Moments.value} of {args.law}")
        print(dump_series(dist.moment_series()), end="")
        return 0
    print(f"# moments of {args.law} to order {args.order}")
    rows = [(n, _fmt(dist.moment(n), args.decimal)) for n in range(1, dist.order + 1)]
    print(_table(rows, ("n", "moment")))
    return 0


def cmd_cumulants(args) -> int:
    dist = freeops.make_law(_parse_law(args.law), args.order)
    r = dist.r_transform()
    if args.dump_series:
        print(f"# {transforms.TransformKind.RCumulants.value} of {args.law}")
        print(dump_series(r), end="")
        return 0
    print(f"# free cumulants of {args.law} to order {args.order}")
    rows = [(n, _fmt(r.coef(n), args.decimal)) for n in range(1, r.order + 1)]
    print(_table(rows, ("n", "cumulant")))
    return 0


def _oracle_moments(mu, nu, order):
    out = []
    for n in range(1, order + 1):
        raw = mixedmoments.commutator_moment_oracle(mu, nu, n)
        if n % 2 == 1:
            # the i^n prefactor makes odd moments purely imaginary, so the
            # raw sum must vanish for the distribution to be real
            out.append(raw)
        else:
            out.append(raw if n % 4 == 0 else -raw)
    return out


def cmd_commutator(args) -> int:
    order = args.order
    if order is None:
        order = 8 if args.route in ("oracle", "all") else 12
    if args.route in ("oracle", "all") and order > 8:
        print("error: the oracle route is limited to order 8", file=sys.stderr)
        return 2
    mu = freeops.make_law(_parse_law(args.a), order)
    nu = freeops.make_law(_parse_law(args.b), order)

    results: dict[str, list] = {}
    if args.route in ("theorem12", "all"):
        c = freeops.free_commutator(mu, nu)
        results["theorem12"] = list(c.moments)
    if args.route in ("cor14", "all"):
        route = freeops.commutator_moment_route(mu, nu)
        results["cor14"] = list(route.moments)
    if args.route in ("oracle", "all"):
        results["oracle"] = _oracle_moments(mu, nu, order)

    primary_name = "theorem12" if "theorem12" in results else args.route
    common = min(len(v) for v in results.values())
    if "theorem12" in results:
        dist = freeops.free_commutator(mu, nu)
    else:
        dist = freeops.Distribution(tuple(results[primary_name][:common]))

    if args.dump_series:
        print(f"# {transforms.TransformKind.Moments.value} of the commutator")
        print(dump_series(dist.moment_series()), end="")
        print(f"# {transforms.TransformKind.RCumulants.value} of the commutator")
        print(dump_series(dist.r_transform()), end="")
    else:
        print(f"# commutator of a = {args.a}, b = {args.b} (order {order}, "
              f"route {args.route})")
        print(_moment_cumulant_table(dist, args.decimal))

    if args.route == "all":
        disagree = []
        for name, vals in results.items():
            for n in range(common):
                if vals[n] != results["theorem12"][n]:
                    disagree.append((name, n + 1, vals[n], results["theorem12"][n]))
        if disagree:
            name, n, got, want = disagree[0]
            print(f"route agreement: DISAGREE ({name} at n={n}: {got} vs {want})")
            return 1
        print(f"route agreement: AGREE ({', '.join(sorted(results))})")
    return 0


def cmd_anticommutator(args) -> int:
    order = args.order or 12
    mu = freeops.make_law(_parse_law(args.a), order)
    nu = freeops.make_law(_parse_law(args.b), order)
    c = freeops.free_anticommutator_even(mu, nu)
    print(f"# anticommutator of even a = {args.a}, b = {args.b} (order {order})")
    print(_moment_cumulant_table(c, args.decimal))
    return 0


def cmd_iterate(args) -> int:
    mu = freeops.make_law(_parse_law(args.mu), args.order)
    traj = freeops.iterate_trajectory(mu, args.steps)
    gamma = mu.variance
    print(f"# iterated commutators of {args.mu} (order {args.order})")
    rows = []
    for m, c in enumerate(traj, start=1):
        predicted = Fraction(1, 2) * (2 * gamma) ** m
        rows.append((m, _fmt(c.variance, args.decimal), _fmt(predicted, args.decimal),
                     " ".join(_fmt(c.moment(n), args.decimal)
                              for n in range(2, min(args.order, 8) + 1, 2))))
    print(_table(rows, ("m", "variance", "(2g)^m/2", "even moments 2..")))
    return 0


def cmd_expr(args) -> int:
    tree = freeops.parse_expr(args.tree)
    spec_texts = [s for s in args.args.split(";") if s.strip()]
    if len(spec_texts) != tree.n_args():
        print(f"error: expression takes {tree.n_args()} arguments, got "
              f"{len(spec_texts)}", file=sys.stderr)
        return 2
    dists = tuple(freeops.make_law(_parse_law(s), args.order) for s in spec_texts)
    depth, box = freeops.expr_depths(tree)
    print(f"# expression {tree} with depth {depth}, bracket depth {box}")
    rec = freeops.eval_expr(tree, dists)
    closed = freeops.eval_expr_closed_form(tree, dists)
    rows = [(n, _fmt(rec.moment(n), args.decimal), _fmt(closed.moment(n), args.decimal))
            for n in range(1, args.order + 1)]
    print(_table(rows, ("n", "recursion", "closed form")))
    # a bare argument has no bracket, so the closed form only sees its even part
    agree = True if tree.is_leaf else rec == closed
    print(f"route agreement: {'AGREE' if agree else 'DISAGREE'}")
    return 0 if agree else 1


_DENSITY_EXAMPLES = ("semi_proj", "semi_semi", "proj_half", "proj_proj",
                     "proj_proj_small", "proj_proj_mid")


def cmd_density(args) -> int:
    which, _, param = args.example.partition(":")
    if which not in _DENSITY_EXAMPLES:
        print(f"error: unknown example {which!r}; choose from "
              f"{', '.join(_DENSITY_EXAMPLES)}", file=sys.stderr)
        return 2
    lam = Fraction(param) if param else None
    if which != "semi_semi" and lam is None:
        print(f"error: example {which} needs a trace parameter, e.g. "
              f"{which}:1/4", file=sys.stderr)
        return 2

    model = analytic.closed_form_model(which, lam) if which != "semi_semi" \
        else analytic.closed_form_model(which)
    if args.grid:
        lo_s, hi_s, steps_s = args.grid.split(":")
        lo, hi, steps = float(Fraction(lo_s)), float(Fraction(hi_s)), int(steps_s)
    else:
        lo = min(a for a, _ in model.support)
        hi = max(b for _, b in model.support)
        lo, hi, steps = 1.02 * lo, 1.02 * hi, 101
    grid = [lo + (hi - lo) * k / (steps - 1) for k in range(steps)] if steps > 1 else [lo]

    if args.method == "stieltjes":
        eq = (analytic.example_equation(which) if which == "semi_semi"
              else analytic.example_equation(which, lam))
        model = analytic.solve_density(eq, grid)

    print("t,density")
    for loc, w in model.atoms:
        print(f"# atom {loc:.12g} {w:.12g}")
    for t in grid:
        print(f"{t:.12g},{model.density(t):.12g}")
    if getattr(model, "flagged", ()):
        for t in model.flagged:
            print(f"# flagged {t:.12g}")
    return 0


def cmd_check(args) -> int:
    if args.partition is not None:
        return _check_instance(args)
    if args.suite is None:
        print("error: provide --suite, or --partition for a one-off instance",
              file=sys.stderr)
        return 2
    if args.suite == "all":
        names = list(checks.CHECKS)
    elif args.suite in checks.CHECKS:
        names = [args.suite]
    else:
        print(f"error: unknown suite {args.suite!r}; choose from "
              f"{', '.join(checks.CHECKS)} or all", file=sys.stderr)
        return 2
    workers = max(1, int(os.environ.get("FREECONV_THREADS", "1")))
    if workers > 1 and len(names) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(lambda n: checks.CHECKS[n](args.seed), names))
    else:
        reports = [checks.CHECKS[n](args.seed) for n in names]
    ok = True
    for report in reports:  # buffered per suite, printed in a fixed order
        print("\n".join(report.lines()))
        ok = ok and report.ok
    print(f"\n{'ALL PASS' if ok else 'FAILURES PRESENT'} "
          f"({sum(len(r.items) for r in reports)} items)")
    return 0 if ok else 1


def _check_instance(args) -> int:
    """One-off complement computation on a partition given in print syntax."""
    from . import ncpart

    part = ncpart.parse_partition(args.partition)
    if args.eps is not None:
        eps = ncpart.EpsSignature.parse(args.eps)
        if len(eps) != part.n:
            print("error: signature length does not match the partition",
                  file=sys.stderr)
            return 2
        comp = ncpart.eps_complement(eps, part)
        print(f"eps-complement of {part} under {eps}: {comp}")
    else:
        print(f"kreweras complement of {part}: {ncpart.kreweras(part)}")
    cls = ncpart.parity_class(part)
    print(f"parity class: {cls.value}")
    if cls is ncpart.ParityClass.NCO:
        t0, t1 = ncpart.twist_interval(part)
        print(f"twist interval: [{t0},{t1}]; twist: {ncpart.twist(part)}")
    return 0


def cmd_table1(args) -> int:
    spec = _parse_law(args.law)
    mu = freeops.make_law(spec, 2 * args.order)
    computed = transforms.r_even(mu.r_transform()).comp_inverse()
    try:
        tabulated = freeops.re_inverse_series(spec, args.order)
    except LawError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"# inverse of the even-cumulant series of {args.law} (order {args.order})")
    rows = [(n, _fmt(computed.coef(n), args.decimal), _fmt(tabulated.coef(n), args.decimal))
            for n in range(1, args.order + 1)]
    print(_table(rows, ("n", "computed", "closed form")))
    if computed == tabulated:
        print("verdict: MATCH")
        return 0
    print("verdict: MISMATCH")
    return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="freeconv",
        description="Distributions of free commutators, exactly, with a "
                    "numerical density layer.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, order_default=12):
        p.add_argument("--order", type=int, default=order_default,
                       help=f"truncation order (default {order_default})")
        p.add_argument("--decimal", type=int, default=None, metavar="K",
                       help="render numbers with K decimal digits instead of p/q")

    p = sub.add_parser("moments", help="moment table of a law")
    p.add_argument("--law", required=True)
    add_common(p)
    p.add_argument("--dump-series", action="store_true")
    p.set_defaults(fn=cmd_moments)

    p = sub.add_parser("cumulants", help="free cumulant table of a law")
    p.add_argument("--law", required=True)
    add_common(p)
    p.add_argument("--dump-series", action="store_true")
    p.set_defaults(fn=cmd_cumulants)

    p = sub.add_parser("commutator", help="distribution of i(ab-ba)")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--order", type=int, default=None,
                   help="truncation order (default 12; 8 with the oracle)")
    p.add_argument("--decimal", type=int, default=None, metavar="K")
    p.add_argument("--route", choices=("theorem12", "cor14", "oracle", "all"),
                   default="theorem12",
                   help="cumulant engine, moment-inversion route, brute-force "
                        "oracle, or all with a cross-check verdict")
    p.add_argument("--dump-series", action="store_true")
    p.set_defaults(fn=cmd_commutator)

    p = sub.add_parser("anticommutator", help="distribution of ab+ba (even inputs)")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--order", type=int, default=None)
    p.add_argument("--decimal", type=int, default=None, metavar="K")
    p.set_defaults(fn=cmd_anticommutator)

    p = sub.add_parser("iterate", help="iterated commutators of an even law")
    p.add_argument("--mu", required=True)
    p.add_argument("--steps", type=int, required=True)
    add_common(p)
    p.set_defaults(fn=cmd_iterate)

    p = sub.add_parser("expr", help="evaluate a commutator expression")
    p.add_argument("--tree", required=True, help="bracket syntax, e.g. [[1,2],[3,4]]")
    p.add_argument("--args", required=True,
                   help="semicolon-separated law specs, one per leaf")
    add_common(p, order_default=8)
    p.set_defaults(fn=cmd_expr)

    p = sub.add_parser("density", help="emit a density as CSV")
    p.add_argument("--example", required=True,
                   help="semi_semi, or semi_proj:L, proj_half:L, proj_proj:L")
    p.add_argument("--grid", default=None, metavar="A:B:STEPS")
    p.add_argument("--method", choices=("closed", "stieltjes"), default="closed")
    p.set_defaults(fn=cmd_density)

    p = sub.add_parser("check", help="run acceptance suites, or check one instance")
    p.add_argument("--suite", default=None,
                   help=f"one of {', '.join(checks.CHECKS)}, or all")
    p.add_argument("--seed", type=int, default=0,
                   help="seed for the randomized suites")
    p.add_argument("--partition", default=None, metavar="{{1,2},{3}}",
                   help="compute complements of one partition instead")
    p.add_argument("--eps", default=None, metavar="11221",
                   help="signature for the one-off complement")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("table1", help="tabulated inverse of the even-cumulant series")
    p.add_argument("--law", required=True)
    add_common(p, order_default=8)
    p.set_defaults(fn=cmd_table1)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (LawError, PreconditionError, PartitionError, SeriesError,
            analytic.OutOfRegionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
