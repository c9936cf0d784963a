"""Acceptance suites: every headline identity of the package, runnable as
a batch.  The CLI `check` subcommand and the acceptance tests both drive
the registry at the bottom of this module, so a passing test run and a
passing `freeconv check --suite all` mean the same thing.

Each suite returns a report of labelled pass/fail items; the first
counterexample (when one exists) is carried in the item detail.
"""

from __future__ import annotations

import itertools
import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

from . import analytic, freeops, mixedmoments, ncpart, transforms
from .freeops import (
    CommutatorExpr,
    Distribution,
    bernoulli,
    arcsine,
    free_add,
    free_commutator,
    free_poisson,
    free_power,
    iterate_trajectory,
    make_law,
    negate,
    projection,
    semicircular,
)
from .series import PowerSeries, UnitSeries, one_plus

F = Fraction


@dataclass
class CheckItem:
    label: str
    ok: bool
    detail: str = ""


@dataclass
class CheckReport:
    name: str
    items: list[CheckItem] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def ok(self) -> bool:
        return all(item.ok for item in self.items)

    def add(self, label: str, ok: bool, detail: str = ""):
        self.items.append(CheckItem(label, bool(ok), detail))

    def expect_equal(self, label: str, got, want):
        if got == want:
            self.add(label, True)
        else:
            self.add(label, False, f"got {got!r}, want {want!r}")

    def lines(self) -> list[str]:
        out = [f"[{'PASS' if self.ok else 'FAIL'}] {self.name}  ({self.elapsed:.2f}s)"]
        for item in self.items:
            mark = "ok " if item.ok else "FAIL"
            detail = f"  -- {item.detail}" if item.detail and not item.ok else ""
            out.append(f"  {mark} {item.label}{detail}")
        return out


def _timed(fn):
    def run(seed: int = 0) -> CheckReport:
        t0 = time.perf_counter()
        report = fn(seed)
        report.elapsed = time.perf_counter() - t0
        return report

    run.__name__ = fn.__name__
    return run


def _random_distribution(rng, order, even=False, nonzero_var=False):
    moments = [F(rng.randrange(-3, 4), rng.randrange(1, 4)) for _ in range(order)]
    if even:
        moments[0::2] = [F(0)] * len(moments[0::2])
    dist = Distribution(tuple(moments))
    if nonzero_var and dist.variance == 0:
        moments[1] = dist.mean**2 + 1
        dist = Distribution(tuple(moments))
    return dist


@_timed
def check_star_inverse(seed: int) -> CheckReport:
    """Zeta and Moeb invert each other under the convolution."""
    report = CheckReport("star-inverse")
    got = transforms.star(transforms.zeta_series(12), transforms.moebius_series(12))
    report.expect_equal("Zeta * Moeb = Id to order 12", got, PowerSeries.identity(12))
    return report


@_timed
def check_figure1(seed: int) -> CheckReport:
    """The insertion-bead instance and the Kreweras specialisation."""
    report = CheckReport("figure1")
    got = ncpart.eps_complement((1, 1, 2, 2, 1), ncpart.Partition(5, ((1, 2), (3, 4, 5))))
    report.expect_equal("bead instance 11221", got,
                        ncpart.Partition(5, ((1,), (2, 3, 5), (4,))))
    bad = None
    for n in range(1, 8):
        ones = (1,) * n
        for p in ncpart.enumerate_nc(n):
            if ncpart.eps_complement(ones, p) != ncpart.kreweras(p):
                bad = p
                break
        if bad:
            break
    report.add("all-ones complement is Kreweras, n <= 7", bad is None,
               f"counterexample {bad}" if bad else "")
    return report


_ORACLE_PAIRS = (
    ("semicircular:2 x semicircular:2", lambda: (make_law(semicircular(2), 8),
                                                 make_law(semicircular(2), 8))),
    ("semicircular:2 x projection:1/4", lambda: (make_law(semicircular(2), 8),
                                                 make_law(projection(F(1, 4)), 8))),
    ("projection:1/3 x projection:1/2", lambda: (make_law(projection(F(1, 3)), 8),
                                                 make_law(projection(F(1, 2)), 8))),
    ("arcsine:1 x bernoulli:1/2,-1,1", lambda: (make_law(arcsine(1), 8),
                                                make_law(bernoulli(F(1, 2), -1, 1), 8))),
)


@_timed
def check_oracle_core(seed: int) -> CheckReport:
    """Brute-force double sum versus the cumulant engine, all n <= 8."""
    report = CheckReport("oracle-core")
    for label, build in _ORACLE_PAIRS:
        mu, nu = build()
        c = free_commutator(mu, nu)
        bad = None
        for n in range(1, 9):
            raw = mixedmoments.commutator_moment_oracle(mu, nu, n)
            want = raw if n % 4 == 0 else (-raw if n % 2 == 0 else F(0))
            if n % 2 == 1 and raw != 0:
                bad = (n, "odd moment nonzero", raw)
                break
            if c.moment(n) != want:
                bad = (n, c.moment(n), want)
                break
        report.add(f"i^n oracle = engine: {label}", bad is None,
                   f"first mismatch at n={bad[0]}: {bad[1:]}" if bad else "")
    return report


@_timed
def check_cancellation(seed: int) -> CheckReport:
    """Odd-block terms cancel; the even-block restriction equals the full sum."""
    report = CheckReport("nco-cancellation")
    rng = random.Random(seed)
    inputs = [(label, build()) for label, build in _ORACLE_PAIRS]
    inputs += [(f"random pair {k}", (_random_distribution(rng, 6),
                                     _random_distribution(rng, 6)))
               for k in range(5)]
    for label, (mu, nu) in inputs:
        mu6 = Distribution(mu.moments[:6])
        nu6 = Distribution(nu.moments[:6])
        bad = None
        for n in range(1, 7):
            if mixedmoments.nco_cancellation(mu6, nu6, n) != 0:
                bad = (n, "odd-block sum nonzero")
                break
            if (mixedmoments.commutator_moment_nce(mu6, nu6, n)
                    != mixedmoments.commutator_moment_oracle(mu6, nu6, n)):
                bad = (n, "NCE restriction differs from full sum")
                break
        report.add(f"cancellation: {label}", bad is None, str(bad) if bad else "")
    return report


@_timed
def check_symmetric_poisson(seed: int) -> CheckReport:
    """Two radius-2 semicirculars: cumulants 0,2,0,2,..."""
    report = CheckReport("symmetric-poisson")
    s = make_law(semicircular(2), 12)
    c = free_commutator(s, s)
    report.expect_equal(
        "cumulant sequence to order 12", c.r_transform(),
        PowerSeries(tuple(F(0) if n % 2 else F(2) for n in range(1, 13))))
    report.expect_equal("m2 = 2", c.moment(2), F(2))
    report.expect_equal("m4 = 10 (even-partition sum)", c.moment(4), F(10))
    return report


@_timed
def check_bernoulli_reduction(seed: int) -> CheckReport:
    """Commutator with a symmetric two-point law is mu plus its negative."""
    report = CheckReport("bernoulli-reduction")
    flip = make_law(bernoulli(F(1, 2), -1, 1), 12)
    for spec in (semicircular(2), free_poisson(1, 1), projection(F(1, 3))):
        mu = make_law(spec, 12)
        got = free_commutator(mu, flip)
        want = free_add(mu, negate(mu))
        report.expect_equal(f"reduction for {spec}", got, want)
    return report


@_timed
def check_table1(seed: int) -> CheckReport:
    """Tabulated inverses of the even-cumulant series, all four rows."""
    report = CheckReport("table1")
    rows = (semicircular(2), free_poisson(1, 1), arcsine(F(3, 2)),
            bernoulli(F(1, 3), -2, 1))
    for spec in rows:
        mu = make_law(spec, 16)
        ev = transforms.r_even(mu.r_transform())
        inv = freeops.re_inverse_series(spec, 8)
        report.expect_equal(f"compose = Id for {spec}", ev.compose(inv),
                            PowerSeries.identity(8))
    return report


@_timed
def check_routes(seed: int) -> CheckReport:
    """Compositional-inversion and S-transform routes against the engine."""
    report = CheckReport("routes")
    rng = random.Random(seed)
    bad_m = bad_s = bad_v = None
    for k in range(10):
        mu = _random_distribution(rng, 12, nonzero_var=True)
        nu = _random_distribution(rng, 12, nonzero_var=True)
        c = free_commutator(mu, nu)
        route = freeops.commutator_moment_route(mu, nu)
        if route.moments != c.moments[:route.order] or route.order < 10:
            bad_m = k
        if c.variance != freeops.commutator_variance(mu, nu):
            bad_v = k
        mue = freeops.even_part(mu)
        nue = freeops.even_part(nu)
        ce = free_commutator(mue, nue)
        gamma = freeops.commutator_variance(mue, nue)
        s_route = freeops.commutator_s_route_even(mue, nue)
        direct = transforms.s_transform(
            freeops.negate_dilate_shift(freeops.q_map(ce), 1 / gamma, 0).moment_series())
        if s_route != direct:
            bad_s = k
    report.add("moment route = engine to order 10, 10 random pairs", bad_m is None,
               f"pair {bad_m}" if bad_m is not None else "")
    report.add("S route = engine (even parts), 10 random pairs", bad_s is None,
               f"pair {bad_s}" if bad_s is not None else "")
    report.add("variance = 2 gamma_a gamma_b, 10 random pairs", bad_v is None,
               f"pair {bad_v}" if bad_v is not None else "")
    return report


@_timed
def check_r_diagonal(seed: int) -> CheckReport:
    """Cumulants of (ab, ba) live on alternating words for even free inputs."""
    report = CheckReport("r-diagonal")
    s = make_law(semicircular(2), 8)
    b = make_law(bernoulli(F(1, 2), -1, 1), 8)
    rng = random.Random(seed)
    re = _random_distribution(rng, 8, even=True)
    for label, mu, nu in (("semicircular x semicircular", s, s),
                          ("semicircular x bernoulli", s, b),
                          ("bernoulli x bernoulli", b, b),
                          ("random even pair", re, _random_distribution(rng, 8, even=True))):
        joint = mixedmoments.JointDist2.from_distributions(mu, nu, 8)
        det = mixedmoments.r_diagonal_test(joint)
        if det is None:
            report.add(f"R-diagonality: {label}", False, "non-alternating cumulant found")
            continue
        ok = mixedmoments.determining_series_check(joint, mu, nu)
        report.add(f"determining series identities: {label}", ok)
    circ = mixedmoments.r_diagonal_test(mixedmoments.JointDist2.from_distributions(s, b, 8))
    report.expect_equal("circular pair has identity determining series",
                        circ.f if circ else None, PowerSeries.identity(4))
    haar = mixedmoments.r_diagonal_test(mixedmoments.JointDist2.from_distributions(b, b, 8))
    report.expect_equal("Haar-unitary pair has Moebius determining series",
                        haar.f if haar else None, transforms.moebius_series(4))
    return report


def _all_trees(n: int) -> list[CommutatorExpr]:
    if n == 1:
        return [CommutatorExpr.leaf(1)]

    def shift(e, by):
        if e.is_leaf:
            return CommutatorExpr.leaf(e.index + by)
        return CommutatorExpr.node(shift(e.left, by), shift(e.right, by))

    out = []
    for k in range(1, n):
        for left in _all_trees(k):
            for right in _all_trees(n - k):
                out.append(CommutatorExpr.node(left, shift(right, k)))
    return out


@_timed
def check_expressions(seed: int) -> CheckReport:
    """Higher-order commutativity of nested commutators."""
    report = CheckReport("expressions")
    rng = random.Random(seed)
    bad = None
    for n in (2, 3, 4):
        args = tuple(_random_distribution(rng, 8) for _ in range(n))
        trees = _all_trees(n)
        for f in trees:
            if freeops.eval_expr(f, args) != freeops.eval_expr_closed_form(f, args):
                bad = str(f)
                break
    report.add("recursion = flattened closed form, all trees n <= 4", bad is None,
               f"tree {bad}" if bad else "")
    bad = None
    for n in (3, 4):
        args = tuple(_random_distribution(rng, 8) for _ in range(n))
        trees = _all_trees(n)
        for f, fhat in itertools.product(trees, repeat=2):
            d, dhat = f.depth_vector(), fhat.depth_vector()
            if sorted(d) != sorted(dhat):
                continue
            for tau in itertools.permutations(range(n)):
                if all(d[i] == dhat[tau[i]] for i in range(n)):
                    f_args = tuple(args[tau[i]] for i in range(n))
                    if freeops.eval_expr(f, f_args) != freeops.eval_expr(fhat, args):
                        bad = (str(f), str(fhat), tau)
                    break
            if bad:
                break
    report.add("depth-permutation identities, n <= 4", bad is None, str(bad) if bad else "")

    def chain(start, steps):
        c = start
        for _ in range(steps - 1):
            c = free_commutator(c, start)
        return c

    nu = _random_distribution(rng, 8)
    bad = None
    for m in range(1, 4):
        for n in range(1, 4):
            if chain(chain(nu, n), m) != chain(chain(nu, m), n):
                bad = (m, n)
    report.add("canonical iterates commute, m,n <= 3", bad is None, str(bad) if bad else "")
    return report


@_timed
def check_square_relation(seed: int) -> CheckReport:
    """The even-square identities for ten random even distributions."""
    report = CheckReport("square-relation")
    rng = random.Random(seed)
    bad = bad_m = None
    for k in range(10):
        mu = _random_distribution(rng, 12, even=True)
        lhs, rhs = freeops.square_relation_even(mu)
        if lhs != rhs:
            bad = k
        zz = transforms.star(transforms.zeta_series(6), transforms.zeta_series(6))
        if freeops.q_map(mu).moment_series() != transforms.star(lhs, zz):
            bad_m = k
    report.add("even cumulants = cumulants of square * Moeb, 10 random", bad is None,
               f"input {bad}" if bad is not None else "")
    report.add("moments of square = even cumulants * Zeta * Zeta, 10 random",
               bad_m is None, f"input {bad_m}" if bad_m is not None else "")
    return report


@_timed
def check_iterate(seed: int) -> CheckReport:
    """Iterated commutators: variances, the Bernoulli limit, the product
    formula for the limiting S-transform."""
    report = CheckReport("iterate")
    for spec, gamma in ((bernoulli(F(1, 2), -1, 1), F(1)), (arcsine(1), F(1, 2))):
        mu = make_law(spec, 12)
        traj = iterate_trajectory(mu, 6)
        bad = None
        for m, c in enumerate(traj, start=1):
            if c.variance != F(1, 2) * (2 * gamma) ** m:
                bad = m
        report.add(f"variance (2 gamma)^m / 2 for {spec}", bad is None,
                   f"m = {bad}" if bad else "")

    order = 12
    mu = Distribution(tuple(
        F(0) if n % 2 else F(1, 2 ** (n // 2)) for n in range(1, order + 1)))
    target = Distribution.from_r_transform(PowerSeries.monomial(2, F(1, 2), order))
    c10 = freeops.iterate_commutator(mu, 10)
    rel2 = abs(c10.moment(2) - target.moment(2))
    rel4 = abs(c10.moment(4) - target.moment(4)) / abs(target.moment(4))
    report.add("ten-step Bernoulli iterate: m2 exact, m4 within 1e-3 relative",
               rel2 == 0 and rel4 < F(1, 1000), f"m2 drift {rel2}, m4 rel {rel4}")
    drift_ok = all(
        abs(freeops.iterate_commutator(mu, m).moment(4) - target.moment(4))
        / abs(target.moment(4)) <= F(1, 2**m)
        for m in (4, 6, 8, 10))
    report.add("observed drift of m4 below 2^-m", drift_ok)

    g = UnitSeries.constant(1, 8) / one_plus(1, 8)
    res = freeops.limit_s(g, 8)
    target_series = freeops.exp_half(-2, 8)
    ok = all(
        abs(a - b) <= bound
        for a, b, bound in zip(res.series.all_coeffs(), target_series.all_coeffs(),
                               res.tail_bound))
    report.add("product for 1/(1+w) matches exp_half(-2w) within tail bound", ok)
    return report


@_timed
def check_analytic(seed: int) -> CheckReport:
    """Densities: the semicircular recovery, atoms, support endpoint,
    moment agreement and normalisation."""
    import numpy as np

    report = CheckReport("analytic")
    eq = analytic.example_equation("semi_proj", F(1, 2))
    grid = np.linspace(-1.3, 1.3, 27)
    model = analytic.solve_density(eq, grid)
    err = max(abs(model.density(t) - math.sqrt(2 - t * t) / math.pi) for t in grid)
    report.add("semicircular sqrt(2) density within 1e-6 pointwise", err < 1e-6,
               f"max err {err:.2e}")

    m4 = analytic.solve_density(analytic.example_equation("semi_proj", F(1, 4)),
                                np.linspace(-1.2, 1.2, 13))
    ok = len(m4.atoms) == 1 and abs(m4.atoms[0][1] - 0.5) < 1e-6
    report.add("atom weight 1/2 at trace 1/4", ok, f"atoms {m4.atoms}")

    pts = analytic.support_endpoints(analytic.example_equation("semi_semi"))
    endpoint = max(pts)
    report.add("two-semicircular support endpoint 3.33019 within 1e-4",
               abs(endpoint - 3.33019) < 1e-4, f"endpoint {endpoint:.6f}")

    s = make_law(semicircular(2), 12)
    c = free_commutator(s, s)
    cf = analytic.closed_form_model("semi_semi")
    bad = None
    for n in range(1, 9):
        got = analytic.density_moments(cf, n)
        want = float(c.moment(n))
        if abs(got - want) > 1e-5 * max(1.0, abs(want)):
            bad = (n, got, want)
    report.add("two-semicircular moments <= 8 within 1e-5 of engine", bad is None,
               str(bad) if bad else "")

    solved = analytic.solve_density(analytic.example_equation("semi_semi"),
                                    np.linspace(-3.0, 3.0, 25))
    err = max(abs(solved.density(t) - cf.density(t)) for t in np.linspace(-3.0, 3.0, 25))
    report.add("inverted density matches closed form within 1e-6", err < 1e-6,
               f"max err {err:.2e}")

    cases = [("semi_proj", F(1, 2)), ("semi_proj", F(1, 4)), ("semi_semi", None),
             ("proj_half", F(1, 4)), ("proj_half", F(1, 2)),
             ("proj_proj", F(1, 10)), ("proj_proj", F(1, 5)),
             ("proj_proj", F(7, 20)), ("proj_proj", F(1, 2))]
    bad = None
    for which, lam in cases:
        model = (analytic.closed_form_model(which, lam) if lam is not None
                 else analytic.closed_form_model(which))
        mass = analytic.total_mass(model)
        if abs(mass - 1.0) > 1e-6:
            bad = (which, lam, mass)
    report.add("all closed-form models normalise to 1 within 1e-6", bad is None,
               str(bad) if bad else "")
    return report


@_timed
def check_positivity(seed: int) -> CheckReport:
    """Hankel detection of the convolution square root and the even part
    leaving the measure cone."""
    report = CheckReport("positivity")
    lam = F(9, 20)
    c = free_commutator(make_law(projection(lam), 12),
                        make_law(projection(F(1, 2)), 12))
    ok, first = analytic.hankel_positive(free_power(c, F(1, 2)), 6)
    report.add("half power of projection commutator fails by order 6",
               not ok and first is not None and first <= 6,
               f"first failing order {first}")
    ok, first = analytic.hankel_positive(freeops.even_part(make_law(projection(lam), 12)), 6)
    report.add("even part of projection(0.45) fails by order 6",
               not ok and first is not None and first <= 6,
               f"first failing order {first}")
    ok, _ = analytic.hankel_positive(make_law(semicircular(2), 12), 6)
    report.add("semicircular remains positive through order 6", ok)
    return report


CHECKS = {
    "star-inverse": check_star_inverse,
    "figure1": check_figure1,
    "oracle-core": check_oracle_core,
    "nco-cancellation": check_cancellation,
    "symmetric-poisson": check_symmetric_poisson,
    "bernoulli-reduction": check_bernoulli_reduction,
    "table1": check_table1,
    "routes": check_routes,
    "r-diagonal": check_r_diagonal,
    "expressions": check_expressions,
    "square-relation": check_square_relation,
    "iterate": check_iterate,
    "analytic": check_analytic,
    "positivity": check_positivity,
}

# acceptance numbering and per-criterion runtime budgets in seconds
ACCEPTANCE = {
    1: ("star-inverse", 1.0),
    2: ("figure1", 10.0),
    3: ("oracle-core", 60.0),
    4: ("nco-cancellation", None),
    5: ("symmetric-poisson", None),
    6: ("bernoulli-reduction", None),
    7: ("table1", None),
    8: ("routes", None),
    9: ("r-diagonal", None),
    10: ("expressions", None),
    11: ("square-relation", None),
    12: ("iterate", None),
    13: ("analytic", 120.0),
    14: ("positivity", None),
}
