"""Combinatorial convolutions and moment/cumulant transforms.

The convolution ``star`` sums, for each coefficient order n, the
products of block-size coefficients of the left operand over a
non-crossing partition against those of the right operand over its
Kreweras complement.  ``star2`` is the word-indexed two-variable
version, with the complement acting on positions.

Everything is exact; the Zeta/Moebius pair is mutually inverse under
star, which together with ``star(f, Id) = f`` pins down the moment /
free-cumulant conversions.
"""

from __future__ import annotations

import enum
from fractions import Fraction
from functools import lru_cache
from math import comb

from . import ncpart
from .series import (
    NCSeries2,
    OrderMismatchError,
    PowerSeries,
    SeriesError,
    UnitSeries,
    one_plus,
    shift_div,
    word_restrict,
    words_of_length,
)

_ZERO = Fraction(0)
_ONE = Fraction(1)

MAX_TWO_VARIABLE_ORDER = 10


class TransformKind(enum.Enum):
    """Labels for series tables in CLI output."""

    Moments = "moments"
    RCumulants = "free cumulants"
    REven = "even free cumulants"
    STransform = "S-transform"


def moeb_coefficient(n: int) -> Fraction:
    """(-1)^(n+1) (2n-2)! / ((n-1)! n!), a signed Catalan number."""
    c = comb(2 * n - 2, n - 1) // n
    return Fraction(c if n % 2 == 1 else -c)


def zeta_series(order: int = 16) -> PowerSeries:
    return PowerSeries((_ONE,) * order)


def moebius_series(order: int = 16) -> PowerSeries:
    return PowerSeries(tuple(moeb_coefficient(n) for n in range(1, order + 1)))


def zeta2_series(order: int) -> NCSeries2:
    return NCSeries2.from_function(order, lambda w: _ONE)


def moeb2_series(order: int) -> NCSeries2:
    return NCSeries2.from_function(order, lambda w: moeb_coefficient(len(w)))


def sum2_series(order: int) -> NCSeries2:
    """Sum(z1, z2) = z1 + z2, the unit for the two-variable convolution."""
    return NCSeries2.from_function(order, lambda w: _ONE if len(w) == 1 else _ZERO)


def special_series(which: str, order: int):
    table = {
        "Zeta": zeta_series,
        "Moeb": moebius_series,
        "Zeta2": zeta2_series,
        "Moeb2": moeb2_series,
    }
    if which not in table:
        raise ValueError(f"unknown special series {which!r}")
    if which.endswith("2") and order > MAX_TWO_VARIABLE_ORDER:
        raise SeriesError(f"two-variable series limited to order {MAX_TWO_VARIABLE_ORDER}")
    if order < 1:
        raise SeriesError("order must be at least 1")
    return table[which](order)


def _block_product(coeffs: tuple[Fraction, ...]):
    """Memoized products of coefficients over block-size multisets."""
    cache: dict = {}

    def prod(shape: tuple[int, ...]) -> Fraction:
        v = cache.get(shape)
        if v is None:
            v = _ONE
            for s in shape:
                v *= coeffs[s - 1]
            cache[shape] = v
        return v

    return prod


def star(f: PowerSeries, g: PowerSeries) -> PowerSeries:
    """Combinatorial convolution over non-crossing partitions."""
    if f.order != g.order:
        raise OrderMismatchError(f"orders differ: {f.order} vs {g.order}")
    fp = _block_product(f.coeffs)
    gp = _block_product(g.coeffs)
    out = []
    for n in range(1, f.order + 1):
        acc = _ZERO
        for (left, right), count in ncpart.shape_pair_counts(n).items():
            fv = fp(left)
            if fv == 0:
                continue
            gv = gp(right)
            if gv == 0:
                continue
            acc += count * fv * gv
        out.append(acc)
    return PowerSeries(tuple(out))


@lru_cache(maxsize=None)
def _nc_with_kreweras(n: int):
    """Block index tuples of each pi in NC(n) together with its complement."""
    return tuple(
        (part.blocks, ncpart.kreweras(part).blocks) for part in ncpart.enumerate_nc(n)
    )


def star2(F: NCSeries2, G: NCSeries2) -> NCSeries2:
    """Two-variable convolution; associative with unit Sum(z1,z2)."""
    if F.order != G.order:
        raise OrderMismatchError(f"orders differ: {F.order} vs {G.order}")
    table: dict = {}
    for n in range(1, F.order + 1):
        pairs = _nc_with_kreweras(n)
        for word in words_of_length(n):
            acc = _ZERO
            for pi_blocks, kr_blocks in pairs:
                fv = _ONE
                for blk in pi_blocks:
                    fv *= F.table[word_restrict(word, blk)]
                    if fv == 0:
                        break
                if fv == 0:
                    continue
                gv = _ONE
                for blk in kr_blocks:
                    gv *= G.table[word_restrict(word, blk)]
                    if gv == 0:
                        break
                acc += fv * gv
            table[word] = acc
    return NCSeries2(F.order, table)


# ---------------------------------------------------------------------------
# Moment/cumulant conversions
# ---------------------------------------------------------------------------

def moments_to_r(m: PowerSeries) -> PowerSeries:
    return star(m, moebius_series(m.order))


def r_to_moments(r: PowerSeries) -> PowerSeries:
    return star(r, zeta_series(r.order))


def moments2_to_r2(m: NCSeries2) -> NCSeries2:
    return star2(m, moeb2_series(m.order))


def r2_to_moments2(r: NCSeries2) -> NCSeries2:
    return star2(r, zeta2_series(r.order))


def r_even(r: PowerSeries) -> PowerSeries:
    """Generating series of the even coefficients, reindexed; the output
    order is floor(N/2)."""
    if r.order < 2:
        raise SeriesError("even part needs order >= 2")
    return PowerSeries(tuple(r.coef(2 * n) for n in range(1, r.order // 2 + 1)))


def fourier(f: PowerSeries) -> UnitSeries:
    """Combinatorial Fourier transform: the compositional inverse divided
    by w.  Multiplicative for star; output order drops by one."""
    return shift_div(f.comp_inverse(), 1)


def s_transform(m: PowerSeries) -> UnitSeries:
    """S-transform of a moment series with nonzero first moment:
    ((1+w)/w) * inverse(M).  Output order drops by one."""
    inv = m.comp_inverse()
    return shift_div(inv, 1) * one_plus(1, m.order - 1)
