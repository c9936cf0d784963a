"""Brute-force oracle for mixed moments of x1 = ab, x2 = ba.

For free a, b the mixed moment of a word in (ab, ba) is a sum over
non-crossing partitions pairing cumulants of a against moments of b
read along the word's complementation map:

    phi(x_{l_1} ... x_{l_n}) =
        sum_{pi in NC(n)} coef[pi](R(mu_a)) * coef[C_eps(pi)](M(mu_b)),

with eps the word itself.  Summing over all words with signs gives the
moments of ab - ba directly, without ever touching the commutator
formula; that is the whole point of this module, which shares only the
series and partition primitives with the main engine and none of its
commutator code paths.

The same machinery assembles the joint two-variable distribution of
(ab, ba) and tests it for R-diagonality (cumulants supported on
alternating words, with a single determining series).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from . import ncpart
from .freeops import Distribution, PreconditionError
from .series import NCSeries2, PowerSeries, all_words
from .transforms import (
    moebius_series,
    moments2_to_r2,
    moments_to_r,
    r_even,
    star,
    zeta_series,
)

_ZERO = Fraction(0)
_ONE = Fraction(1)

MAX_ORACLE_ORDER = 8  # the (pi, eps) double sum has 2^n * Catalan(n) terms


def _check_budget(n: int):
    if not 1 <= n <= MAX_ORACLE_ORDER:
        raise PreconditionError(
            f"oracle sums supported for 1 <= n <= {MAX_ORACLE_ORDER}, got {n}")


def _product_over(coeffs: tuple[Fraction, ...]):
    cache: dict = {}

    def prod(shape):
        v = cache.get(shape)
        if v is None:
            v = _ONE
            for s in shape:
                v *= coeffs[s - 1]
            cache[shape] = v
        return v

    return prod


def _eps_word(eps) -> tuple[int, ...]:
    if isinstance(eps, ncpart.EpsSignature):
        return eps.entries
    word = tuple(eps)
    if any(l not in (1, 2) for l in word):
        raise PreconditionError(f"word letters must be 1 or 2: {word}")
    return word


def mixed_word_moment(mu_a: Distribution, mu_b: Distribution, eps) -> Fraction:
    """phi of the word in (ab, ba) spelled by eps."""
    word = _eps_word(eps)
    n = len(word)
    _check_budget(n)
    if mu_a.order < n or mu_b.order < n:
        raise PreconditionError("distribution order too small for this word")
    cum = _product_over(moments_to_r(mu_a.moment_series()).coeffs)
    mom = _product_over(mu_b.moments)
    acc = _ZERO
    for (pi_shape, comp_shape), count in ncpart.eps_pair_counts(n, word).items():
        cv = cum(pi_shape)
        if cv == 0:
            continue
        mv = mom(comp_shape)
        if mv == 0:
            continue
        acc += count * cv * mv
    return acc


def _signed_sum(mu_a, mu_b, n, keep) -> Fraction:
    """sum over words and partitions of (-1)^(#2s) cum_a(pi) mom_b(C(pi)),
    restricted to partition shapes accepted by ``keep``."""
    _check_budget(n)
    if mu_a.order < n or mu_b.order < n:
        raise PreconditionError("distribution order too small")
    cum = _product_over(moments_to_r(mu_a.moment_series()).coeffs)
    mom = _product_over(mu_b.moments)
    total = _ZERO
    for word in itertools.product((1, 2), repeat=n):
        sign = -1 if sum(1 for l in word if l == 2) % 2 else 1
        acc = _ZERO
        for (pi_shape, comp_shape), count in ncpart.eps_pair_counts(n, word).items():
            if not keep(pi_shape):
                continue
            cv = cum(pi_shape)
            if cv == 0:
                continue
            mv = mom(comp_shape)
            if mv == 0:
                continue
            acc += count * cv * mv
        total += sign * acc
    return total


def commutator_moment_oracle(mu_a: Distribution, mu_b: Distribution, n: int) -> Fraction:
    """phi((ab - ba)^n), the full double sum.

    The main engine's moments relate by m_n(i(ab-ba)) = i^n * this value:
    equal for n = 0 mod 4, negated for n = 2 mod 4, zero for odd n."""
    return _signed_sum(mu_a, mu_b, n, lambda shape: True)


def nco_cancellation(mu_a: Distribution, mu_b: Distribution, n: int) -> Fraction:
    """The same sum restricted to partitions with an odd block; the twist
    involution pairs these terms off, so the result must be exactly 0."""
    return _signed_sum(mu_a, mu_b, n, lambda shape: any(s % 2 for s in shape))


def commutator_moment_nce(mu_a: Distribution, mu_b: Distribution, n: int) -> Fraction:
    """The sum restricted to all-even-block partitions; equals the full
    oracle by the cancellation identity."""
    return _signed_sum(mu_a, mu_b, n, lambda shape: not any(s % 2 for s in shape))


# ---------------------------------------------------------------------------
# Joint distribution of (ab, ba) and R-diagonality
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class JointDist2:
    """Joint moments of (ab, ba) and the derived two-variable cumulants."""

    M2: NCSeries2
    R2: NCSeries2

    @classmethod
    def from_distributions(cls, mu_a: Distribution, mu_b: Distribution,
                           order: int) -> "JointDist2":
        _check_budget(order)
        m2 = NCSeries2(order, {
            w: mixed_word_moment(mu_a, mu_b, w) for w in all_words(order)})
        return cls(m2, moments2_to_r2(m2))


def joint_ab_ba(mu_a: Distribution, mu_b: Distribution, order: int) -> JointDist2:
    """Joint distribution of (ab, ba) for free a, b, to the given order."""
    return JointDist2.from_distributions(mu_a, mu_b, order)


@dataclass(frozen=True)
class DeterminingSeries:
    """The single series carrying an R-diagonal pair's cumulants."""

    f: PowerSeries


def _alternating_word(start: int, length: int) -> tuple[int, ...]:
    return tuple(start if i % 2 == 0 else 3 - start for i in range(length))


def r_diagonal_test(joint: JointDist2) -> DeterminingSeries | None:
    """Pass iff the two-variable cumulants sit on alternating even words,
    with (1,2,...) and (2,1,...) carrying equal coefficients."""
    order = joint.R2.order
    half = order // 2
    if half < 1:
        return None
    for word, value in joint.R2.table.items():
        k = len(word)
        if k % 2 == 0 and word in (_alternating_word(1, k), _alternating_word(2, k)):
            continue
        if value != 0:
            return None
    coeffs = []
    for k in range(1, half + 1):
        a = joint.R2.table[_alternating_word(1, 2 * k)]
        b = joint.R2.table[_alternating_word(2, 2 * k)]
        if a != b:
            return None
        coeffs.append(a)
    return DeterminingSeries(PowerSeries(tuple(coeffs)))


def determining_series_check(joint: JointDist2, mu_a: Distribution,
                             mu_b: Distribution) -> bool:
    """Verify the determining series against its two independent
    expressions: cumulants of the product x1*x2 pushed through Moeb, and,
    for even inputs, even(a) star Zeta star even(b)."""
    det = r_diagonal_test(joint)
    if det is None:
        raise PreconditionError("pair is not R-diagonal")
    half = det.f.order
    x1x2 = PowerSeries(tuple(
        joint.M2.table[_alternating_word(1, 2 * k)] for k in range(1, half + 1)))
    via_product = star(moments_to_r(x1x2), moebius_series(half))
    if via_product != det.f:
        return False
    if mu_a.is_even and mu_b.is_even:
        ea = r_even(moments_to_r(mu_a.moment_series().truncate(2 * half)))
        eb = r_even(moments_to_r(mu_b.moment_series().truncate(2 * half)))
        via_even = star(star(ea, zeta_series(half)), eb)
        if via_even != det.f:
            return False
    return True


def commutator_r_from_joint(joint: JointDist2) -> PowerSeries:
    """Substitute (iz, -iz) into the two-variable cumulants: the n-th
    coefficient is i^n sum_w (-1)^(#2s in w) R2[w]; odd sums must vanish
    for the result to be a real series."""
    order = joint.R2.order
    out = []
    for n in range(1, order + 1):
        acc = _ZERO
        for word in itertools.product((1, 2), repeat=n):
            d = sum(1 for l in word if l == 2)
            acc += (-1) ** d * joint.R2.table[word]
        if n % 2 == 1:
            if acc != 0:
                raise PreconditionError(
                    f"substitution produced an imaginary coefficient at order {n}")
            out.append(_ZERO)
        else:
            out.append((-1) ** (n // 2) * acc)
    return PowerSeries(tuple(out))


def anticommutator_r_from_joint(joint: JointDist2) -> PowerSeries:
    """Substitute (z, z): the n-th coefficient sums all words of length n."""
    order = joint.R2.order
    out = []
    for n in range(1, order + 1):
        acc = _ZERO
        for word in itertools.product((1, 2), repeat=n):
            acc += joint.R2.table[word]
        out.append(acc)
    return PowerSeries(tuple(out))
