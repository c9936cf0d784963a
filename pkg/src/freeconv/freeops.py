"""Distributions as exact moment sequences and the free operations.

A ``Distribution`` is nothing more than a truncated moment sequence
with rational entries; signed functionals are allowed (extracting even
cumulants or taking convolution square roots can leave the cone of
measures, which is the point of the positivity checks in the analytic
module).

The central operation is ``free_commutator``: the distribution of
i(ab - ba) for free a, b, computed through the even free cumulants,

    even-cumulants(out) = 2 * (even(a) star even(b) star Zeta),

with odd cumulants forced to zero.  Two alternative routes
(``commutator_moment_route`` via compositional inversion,
``commutator_s_route_even`` via S-transforms) and a brute-force oracle
(mixedmoments module) are kept deliberately independent so the routes
can be checked against each other.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

from .series import PowerSeries, UnitSeries, one_plus, shift_div
from .transforms import (
    moebius_series,
    moments_to_r,
    r_even,
    r_to_moments,
    s_transform,
    star,
    zeta_series,
)

_ZERO = Fraction(0)
_ONE = Fraction(1)


class LawError(ValueError):
    """Invalid law specification."""


class PreconditionError(ValueError):
    """An operation's hypothesis (evenness, nonzero variance, ...) fails."""


@dataclass(frozen=True)
class Distribution:
    """Moments mu(X^1..X^N); mu(1) = 1 implicitly."""

    moments: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "moments", tuple(Fraction(m) for m in self.moments))
        if len(self.moments) < 1:
            raise PreconditionError("a distribution needs at least one moment")

    @property
    def order(self) -> int:
        return len(self.moments)

    def moment(self, n: int) -> Fraction:
        if n == 0:
            return _ONE
        return self.moments[n - 1]

    def moment_series(self) -> PowerSeries:
        return PowerSeries(self.moments)

    @classmethod
    def from_moment_series(cls, m: PowerSeries) -> "Distribution":
        return cls(m.coeffs)

    @classmethod
    def from_r_transform(cls, r: PowerSeries) -> "Distribution":
        return cls(r_to_moments(r).coeffs)

    def r_transform(self) -> PowerSeries:
        return _r_of(self)

    @property
    def mean(self) -> Fraction:
        return self.moments[0]

    @property
    def variance(self) -> Fraction:
        if self.order < 2:
            raise PreconditionError("variance needs two moments")
        return self.moments[1] - self.moments[0] ** 2

    @property
    def is_even(self) -> bool:
        return all(m == 0 for m in self.moments[0::2])

    def __repr__(self):
        return f"Distribution({list(self.moments)})"


@lru_cache(maxsize=512)
def _r_of(dist: Distribution) -> PowerSeries:
    return moments_to_r(dist.moment_series())


def _check_orders(*dists: Distribution):
    orders = {d.order for d in dists}
    if len(orders) != 1:
        raise PreconditionError(f"mixed truncation orders: {sorted(orders)}")


# ---------------------------------------------------------------------------
# Named laws
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LawSpec:
    kind: str
    params: tuple

    def __str__(self):
        if self.kind == "atomic":
            inner = ",".join(f"{w}@{a}" for w, a in self.params)
            return f"atomic:({inner})"
        return f"{self.kind}:{','.join(str(p) for p in self.params)}"


def semicircular(r) -> LawSpec:
    r = Fraction(r)
    if r <= 0:
        raise LawError("semicircular radius must be positive")
    return LawSpec("semicircular", (r,))


def free_poisson(alpha, beta) -> LawSpec:
    alpha, beta = Fraction(alpha), Fraction(beta)
    if alpha <= 0 or beta <= 0:
        raise LawError("free Poisson parameters must be positive")
    return LawSpec("poisson", (alpha, beta))


def arcsine(r) -> LawSpec:
    r = Fraction(r)
    if r <= 0:
        raise LawError("arcsine radius must be positive")
    return LawSpec("arcsine", (r,))


def bernoulli(lam, t0, t1) -> LawSpec:
    lam, t0, t1 = Fraction(lam), Fraction(t0), Fraction(t1)
    if not 0 < lam < 1:
        raise LawError("bernoulli weight must lie in (0,1)")
    if not t0 < t1:
        raise LawError("bernoulli atoms must satisfy t0 < t1")
    return LawSpec("bernoulli", (lam, t0, t1))


def atomic(pairs) -> LawSpec:
    pairs = tuple((Fraction(w), Fraction(a)) for w, a in pairs)
    if sum(w for w, _ in pairs) != 1:
        raise LawError("atomic weights must sum to 1")
    return LawSpec("atomic", pairs)


def projection(lam) -> LawSpec:
    lam = Fraction(lam)
    if not 0 < lam < 1:
        raise LawError("projection trace must lie in (0,1)")
    return LawSpec("projection", (lam,))


def _half_binomial(k: int) -> Fraction:
    # binomial(1/2, k)
    num = _ONE
    x = Fraction(1, 2)
    for i in range(k):
        num *= x - i
    return num / factorial(k)


def make_law(spec: LawSpec, order: int = 16) -> Distribution:
    """Exact moments to the given order.

    The semicircular, free Poisson and arcsine rows carry closed-form
    free-cumulant series, from which the moments come via the
    moment-cumulant formula; purely atomic laws get their moments as
    weighted powers directly.
    """
    if order < 1:
        raise LawError("order must be at least 1")
    kind, params = spec.kind, spec.params
    if kind == "semicircular":
        (r,) = params
        r_series = PowerSeries(
            tuple(r * r / 4 if n == 2 else _ZERO for n in range(1, order + 1)))
        return Distribution.from_r_transform(r_series)
    if kind == "poisson":
        alpha, beta = params
        r_series = PowerSeries(tuple(alpha * beta**n for n in range(1, order + 1)))
        return Distribution.from_r_transform(r_series)
    if kind == "arcsine":
        (r,) = params
        coeffs = []
        for n in range(1, order + 1):
            if n % 2 == 0:
                k = n // 2
                coeffs.append(_half_binomial(k) * r**n)
            else:
                coeffs.append(_ZERO)
        return Distribution.from_r_transform(PowerSeries(tuple(coeffs)))
    if kind == "bernoulli":
        lam, t0, t1 = params
        pairs = ((lam, t0), (1 - lam, t1))
    elif kind == "projection":
        (lam,) = params
        pairs = ((1 - lam, _ZERO), (lam, _ONE))
    elif kind == "atomic":
        pairs = params
    else:
        raise LawError(f"unknown law kind {kind!r}")
    moments = tuple(
        sum((w * a**n for w, a in pairs), _ZERO) for n in range(1, order + 1))
    return Distribution(moments)


def re_inverse_rational(spec: LawSpec) -> tuple[tuple[Fraction, ...], tuple[Fraction, ...]]:
    """Closed-form compositional inverse of the even-cumulant series, as a
    rational function (numerator, denominator) with coefficients listed by
    ascending power of w.  Known for the four classical rows:

        semicircular r:    4w / r^2
        free Poisson a,b:  w / (b^2 (a + w))
        arcsine r:         (2w + w^2) / r^2
        two atoms t0 < t1, weight l at t0:
                           w(1+w)(1+2w)^2 / ((t1-t0)^2 (w^2 + w + l(1-l)))
    """
    kind, params = spec.kind, spec.params
    one = _ONE
    if kind == "semicircular":
        (r,) = params
        return (Fraction(0), 4 / (r * r)), (one,)
    if kind == "poisson":
        alpha, beta = params
        b2 = beta * beta
        return (Fraction(0), one), (alpha * b2, b2)
    if kind == "arcsine":
        (r,) = params
        r2 = r * r
        return (Fraction(0), 2 / r2, 1 / r2), (one,)
    if kind == "projection":
        (lam,) = params
        spec = bernoulli(1 - lam, 0, 1)
        kind, params = spec.kind, spec.params
    if kind == "bernoulli":
        lam, t0, t1 = params
        # w (1+w) (1+2w)^2 = w + 5w^2 + 8w^3 + 4w^4
        num = (Fraction(0), one, Fraction(5), Fraction(8), Fraction(4))
        gap2 = (t1 - t0) ** 2
        den = (gap2 * lam * (1 - lam), gap2, gap2)
        return num, den
    raise LawError(f"no tabulated inverse for law kind {kind!r}")


def re_inverse_series(spec: LawSpec, order: int) -> PowerSeries:
    """The tabulated inverse as a truncated series."""
    from .series import UnitSeries

    num, den = re_inverse_rational(spec)
    num_ps = PowerSeries(tuple(
        num[n] if n < len(num) else _ZERO for n in range(1, order + 1)))
    if num and num[0] != 0:
        raise LawError("tabulated inverse must vanish at the origin")
    den_us = UnitSeries(den[0], tuple(
        den[n] if n < len(den) else _ZERO for n in range(1, order + 1)))
    return num_ps.div_unit(den_us)


_LAW_RE = re.compile(r"^([a-z]+):(.*)$")


def parse_law(text: str) -> LawSpec:
    """Parse the compact grammar, e.g. ``semicircular:2``, ``poisson:1,1``,
    ``bernoulli:1/2,-1,1``, ``atomic:(1/2@-1,1/2@1)``, ``projection:1/2``."""
    t = text.strip()
    m = _LAW_RE.match(t)
    if not m:
        raise LawError(f"cannot parse law spec {text!r}")
    kind, rest = m.group(1), m.group(2)
    try:
        if kind == "atomic":
            if not (rest.startswith("(") and rest.endswith(")")):
                raise LawError("atomic spec needs a parenthesised atom list")
            pairs = []
            for item in rest[1:-1].split(","):
                w, _, a = item.partition("@")
                pairs.append((Fraction(w), Fraction(a)))
            return atomic(pairs)
        params = [Fraction(p) for p in rest.split(",") if p != ""]
        if kind == "semicircular":
            return semicircular(*params)
        if kind == "poisson":
            return free_poisson(*params)
        if kind == "arcsine":
            return arcsine(*params)
        if kind == "bernoulli":
            return bernoulli(*params)
        if kind == "projection":
            return projection(*params)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise LawError(f"cannot parse law spec {text!r}: {exc}") from None
    raise LawError(f"unknown law kind {kind!r}")


# ---------------------------------------------------------------------------
# Free convolutions
# ---------------------------------------------------------------------------

def free_add(mu: Distribution, nu: Distribution) -> Distribution:
    """Additive free convolution: free cumulants add."""
    _check_orders(mu, nu)
    return Distribution.from_r_transform(mu.r_transform() + nu.r_transform())


def free_power(mu: Distribution, t) -> Distribution:
    """Convolution power: scales the free cumulants by t (t = 1/2 gives
    the convolution square root, which may leave the measure cone)."""
    return Distribution.from_r_transform(mu.r_transform().scale(Fraction(t)))


def free_mul(mu: Distribution, nu: Distribution) -> Distribution:
    """Multiplicative free convolution: free cumulants convolve."""
    _check_orders(mu, nu)
    return Distribution.from_r_transform(star(mu.r_transform(), nu.r_transform()))


def negate_dilate_shift(mu: Distribution, lam, t) -> Distribution:
    """Distribution of lam*X + t, by the binomial moment transform."""
    lam, t = Fraction(lam), Fraction(t)
    full = (_ONE,) + mu.moments
    out = []
    for n in range(1, mu.order + 1):
        acc = _ZERO
        for k in range(n + 1):
            acc += comb(n, k) * lam**k * t ** (n - k) * full[k]
        out.append(acc)
    return Distribution(tuple(out))


def negate(mu: Distribution) -> Distribution:
    return negate_dilate_shift(mu, -1, 0)


def even_part(mu: Distribution) -> Distribution:
    """Zero the odd free cumulants, keep the even ones."""
    r = mu.r_transform()
    kept = tuple(c if n % 2 == 0 else _ZERO for n, c in enumerate(r.coeffs, start=1))
    return Distribution.from_r_transform(PowerSeries(kept))


def q_map(mu: Distribution) -> Distribution:
    """Distribution of the square; output order floor(N/2)."""
    if mu.order < 2:
        raise PreconditionError("squaring needs at least two moments")
    return Distribution(tuple(mu.moment(2 * n) for n in range(1, mu.order // 2 + 1)))


# ---------------------------------------------------------------------------
# The free commutator and its routes
# ---------------------------------------------------------------------------

def commutator_even_cumulants(mu: Distribution, nu: Distribution) -> PowerSeries:
    """Even-cumulant series of i(ab-ba): 2 (even(a) star even(b) star Zeta)."""
    _check_orders(mu, nu)
    if mu.order < 2:
        raise PreconditionError("commutator needs order >= 2")
    m = mu.order // 2
    ea = r_even(mu.r_transform()).truncate(m)
    eb = r_even(nu.r_transform()).truncate(m)
    return star(star(ea, eb), zeta_series(m)).scale(2)


def free_commutator(mu: Distribution, nu: Distribution) -> Distribution:
    """Distribution of i(ab - ba) for free a, b; always even."""
    _check_orders(mu, nu)
    n = mu.order
    if n == 1:
        return Distribution((_ZERO,))
    r = commutator_even_cumulants(mu, nu).substitute_square().pad(n)
    return Distribution.from_r_transform(r)


def free_anticommutator_even(mu: Distribution, nu: Distribution) -> Distribution:
    """Distribution of ab + ba for free even a, b, where it coincides with
    the commutator.  The anticommutator of non-even inputs is rejected."""
    if not (mu.is_even and nu.is_even):
        raise PreconditionError("anticommutator supported for even inputs only")
    return free_commutator(mu, nu)


def commutator_moment_route(mu: Distribution, nu: Distribution) -> Distribution:
    """Moment series of i(ab-ba) by compositional inversion:

        M = ( 2/(w (1+w/2)(1+w)^2) * invE_a(w/2) * invE_b(w/2) )^{<-1>} (z^2),

    where invE is the inverse of the even-cumulant series.  Requires
    nonzero variances; the output order is 2*(floor(N/2) - 1)."""
    _check_orders(mu, nu)
    if mu.variance == 0 or nu.variance == 0:
        raise PreconditionError("moment route needs nonzero variances")
    m = mu.order // 2
    if m < 2:
        raise PreconditionError("moment route needs order >= 4")
    half = Fraction(1, 2)
    inv_a = r_even(mu.r_transform()).truncate(m).comp_inverse().dilate(half)
    inv_b = r_even(nu.r_transform()).truncate(m).comp_inverse().dilate(half)
    prod = (inv_a * inv_b).scale(2)
    core = shift_div(prod, 1).as_power()  # divide by w
    k = core.order
    denom = one_plus(half, k) * one_plus(1, k) * one_plus(1, k)
    h = core.div_unit(denom)
    moments = h.comp_inverse().substitute_square()
    return Distribution.from_moment_series(moments)


def commutator_s_route_even(mu: Distribution, nu: Distribution) -> UnitSeries:
    """S-transform of c^2/gamma_c for even inputs:

        S(w) = (1 + w/2)/(1 + w) * S_a(w/2) * S_b(w/2),

    with S_a the S-transform of a^2/gamma_a."""
    _check_orders(mu, nu)
    if not (mu.is_even and nu.is_even):
        raise PreconditionError("S route requires even inputs")
    if mu.variance == 0 or nu.variance == 0:
        raise PreconditionError("S route needs nonzero variances")
    half = Fraction(1, 2)
    sa = _normalized_square_s(mu).dilate(half)
    sb = _normalized_square_s(nu).dilate(half)
    k = sa.order
    front = one_plus(half, k) / one_plus(1, k)
    return front * sa * sb


def _normalized_square_s(mu: Distribution) -> UnitSeries:
    sq = negate_dilate_shift(q_map(mu), 1 / mu.variance, 0)
    return s_transform(sq.moment_series())


def commutator_variance(mu: Distribution, nu: Distribution) -> Fraction:
    """gamma_c = 2 gamma_a gamma_b, read off the linear coefficients."""
    return 2 * mu.variance * nu.variance


def square_relation_even(mu: Distribution) -> tuple[PowerSeries, PowerSeries]:
    """For even mu, both sides of the square identity: the even-cumulant
    series of mu, and cumulants(mu^2) star Moeb.  Callers assert equality."""
    if not mu.is_even:
        raise PreconditionError("square relation requires an even distribution")
    m = mu.order // 2
    lhs = r_even(mu.r_transform()).truncate(m)
    rhs = star(q_map(mu).r_transform(), moebius_series(m))
    return lhs, rhs


# ---------------------------------------------------------------------------
# Commutator expressions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CommutatorExpr:
    """Binary bracket tree; leaves carry 1-based argument indices."""

    index: int | None = None
    left: "CommutatorExpr | None" = None
    right: "CommutatorExpr | None" = None

    @classmethod
    def leaf(cls, index: int) -> "CommutatorExpr":
        return cls(index=index)

    @classmethod
    def node(cls, left: "CommutatorExpr", right: "CommutatorExpr") -> "CommutatorExpr":
        return cls(index=None, left=left, right=right)

    @property
    def is_leaf(self) -> bool:
        return self.index is not None

    def n_args(self) -> int:
        if self.is_leaf:
            return 1
        return self.left.n_args() + self.right.n_args()

    def depth_vector(self) -> tuple[int, ...]:
        if self.is_leaf:
            return (0,)
        return tuple(
            d + 1 for d in self.left.depth_vector() + self.right.depth_vector())

    def box_depth_vector(self) -> tuple[int, ...]:
        if self.is_leaf:
            return ()
        lt = tuple(t + 1 for t in self.left.box_depth_vector())
        rt = tuple(t + 1 for t in self.right.box_depth_vector())
        return lt + (1,) + rt

    def __str__(self):
        if self.is_leaf:
            return str(self.index)
        return f"[{self.left},{self.right}]"


def expr_depths(e: CommutatorExpr) -> tuple[tuple[int, ...], tuple[int, ...]]:
    return e.depth_vector(), e.box_depth_vector()


def parse_expr(text: str) -> CommutatorExpr:
    """Parse bracket syntax like ``[[1,2],[3,4]]``."""
    s = text.replace(" ", "")

    def rec(pos: int) -> tuple[CommutatorExpr, int]:
        if pos < len(s) and s[pos] == "[":
            left, pos = rec(pos + 1)
            if pos >= len(s) or s[pos] != ",":
                raise LawError(f"expected ',' at {pos} in {text!r}")
            right, pos = rec(pos + 1)
            if pos >= len(s) or s[pos] != "]":
                raise LawError(f"expected ']' at {pos} in {text!r}")
            return CommutatorExpr.node(left, right), pos + 1
        m = re.match(r"\d+", s[pos:])
        if not m:
            raise LawError(f"expected an argument index at {pos} in {text!r}")
        return CommutatorExpr.leaf(int(m.group(0))), pos + len(m.group(0))

    expr, pos = rec(0)
    if pos != len(s):
        raise LawError(f"trailing input in {text!r}")

    def leaves(e):
        return [e.index] if e.is_leaf else leaves(e.left) + leaves(e.right)

    got = leaves(expr)
    if got != list(range(1, len(got) + 1)):
        raise LawError(f"leaf indices must read 1..n left to right, got {got}")
    return expr


def eval_expr(e: CommutatorExpr, args: tuple[Distribution, ...]) -> Distribution:
    """Evaluate by recursion on the commutator."""
    if e.n_args() != len(args):
        raise PreconditionError(
            f"expression takes {e.n_args()} arguments, got {len(args)}")
    _check_orders(*args)

    def rec(node: CommutatorExpr) -> Distribution:
        if node.is_leaf:
            return args[node.index - 1]
        return free_commutator(rec(node.left), rec(node.right))

    return rec(e)


def eval_expr_closed_form(e: CommutatorExpr, args: tuple[Distribution, ...]) -> Distribution:
    """Evaluate through the flattened even-cumulant product

        even(out) = [prod_star 2^{d_i} even(arg_i) star prod_star 2^{t_j} Zeta]
                    dilated by 4^-(t_1 + ... + t_{n-1}),

    with d the depth vector and t the bracket-depth vector.  The dilation
    exponent is pinned by the linear coefficient: every bracket multiplies
    it by two, and sum(d) - sum(t) counts the brackets.  For a single
    argument this reconstructs only the even part."""
    n = e.n_args()
    if n != len(args):
        raise PreconditionError(
            f"expression takes {n} arguments, got {len(args)}")
    _check_orders(*args)
    order = args[0].order
    m = order // 2
    if m < 1:
        raise PreconditionError("closed form needs order >= 2")
    depths = e.depth_vector()
    box_depths = e.box_depth_vector()
    factors = [
        r_even(arg.r_transform()).truncate(m).scale(Fraction(2**d))
        for d, arg in zip(depths, args)
    ]
    factors += [zeta_series(m).scale(Fraction(2**t)) for t in box_depths]
    acc = factors[0]
    for f in factors[1:]:
        acc = star(acc, f)
    acc = acc.dilate(Fraction(1, 4 ** sum(box_depths)))
    return Distribution.from_r_transform(acc.substitute_square().pad(order))


# ---------------------------------------------------------------------------
# Iterated commutators and their limit
# ---------------------------------------------------------------------------

def iterate_trajectory(mu: Distribution, steps: int) -> list[Distribution]:
    """c_1 = mu, c_k = commutator(c_{k-1}, mu); requires an even start."""
    if steps < 1:
        raise PreconditionError("need at least one step")
    if not mu.is_even:
        raise PreconditionError("iteration is defined for even distributions")
    out = [mu]
    for _ in range(steps - 1):
        out.append(free_commutator(out[-1], mu))
    return out


def iterate_commutator(mu: Distribution, steps: int) -> Distribution:
    return iterate_trajectory(mu, steps)[-1]


@dataclass(frozen=True)
class LimitSeries:
    """A truncated infinite product together with the coefficientwise
    increment contributed by the last retained factor."""

    series: UnitSeries
    delta: tuple[Fraction, ...]

    @property
    def tail_bound(self) -> tuple[Fraction, ...]:
        """|reported - exact| <= tail_bound coefficientwise.  Successive
        increments shrink with ratio about 1/2 (each extra factor is
        1 + O(w/2^k)), so twice the last increment dominates the tail."""
        return tuple(2 * d for d in self.delta)


def limit_s(g: UnitSeries, order: int, factors: int = 24) -> LimitSeries:
    """The S-transform limit (1/(1+w)) * prod_{k>=1} g(w/2^k),
    truncated to ``factors`` product terms."""
    if g.order < order:
        raise PreconditionError("input series too short for requested order")
    g = g.truncate(order)
    acc = UnitSeries.constant(1, order) / one_plus(1, order)
    prev = acc
    for k in range(1, factors + 1):
        if k == factors:
            prev = acc
        acc = acc * g.dilate(Fraction(1, 2**k))
    delta = tuple(abs(a - b) for a, b in zip(acc.all_coeffs(), prev.all_coeffs()))
    return LimitSeries(acc, delta)


def exp_half(t_coeff, order: int) -> UnitSeries:
    """The 1/2-exponential series evaluated at t = t_coeff * w:
    1 + sum t^n / ([1][2]...[n]) with [n] = 2 - 2^(1-n)."""
    t = Fraction(t_coeff)
    coeffs = []
    denom = _ONE
    power = _ONE
    for n in range(1, order + 1):
        denom *= 2 - Fraction(1, 2 ** (n - 1))
        power *= t
        coeffs.append(power / denom)
    return UnitSeries(_ONE, tuple(coeffs))
