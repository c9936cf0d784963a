from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from freeconv.series import (
    CoefficientRangeError,
    InversionError,
    NCSeries2,
    OrderMismatchError,
    PowerSeries,
    SeriesDivisionError,
    UnitSeries,
    arith,
    coef_partition,
    coef_word,
    dump_series,
    geometric,
    one_plus,
    parse_series,
    shift_div,
)
from freeconv.ncpart import Partition
from freeconv.transforms import moebius_series, zeta_series


def fr(*nums):
    return tuple(F(x) for x in nums)


small_fracs = st.fractions(min_value=-4, max_value=4, max_denominator=6)


def series_strategy(order=8, nonzero_linear=False):
    first = small_fracs.filter(lambda x: x != 0) if nonzero_linear else small_fracs
    rest = st.lists(small_fracs, min_size=order - 1, max_size=order - 1)
    return st.tuples(first, rest).map(lambda t: PowerSeries((t[0], *t[1])))


class TestBasics:
    def test_coef_and_range(self):
        f = PowerSeries(fr(1, 2, 3))
        assert f.coef(2) == 2
        assert f.order == 3
        with pytest.raises(CoefficientRangeError):
            f.coef(4)
        with pytest.raises(CoefficientRangeError):
            f.coef(0)

    def test_coef_examples(self):
        assert zeta_series(8).coef(5) == 1
        assert moebius_series(8).coef(4) == -5
        assert PowerSeries.identity(6).coef(1) == 1

    def test_order_mismatch(self):
        with pytest.raises(OrderMismatchError):
            arith(PowerSeries.zero(4), PowerSeries.zero(5), "add")


class TestArith:
    def test_zeta_minus_zeta(self):
        assert arith(zeta_series(8), zeta_series(8), "sub").is_zero()

    def test_z_times_z(self):
        z = PowerSeries.identity(6)
        assert z * z == PowerSeries.monomial(2, 1, 6)

    def test_unit_geometric_division(self):
        # 1 / (1+w) = 1 - w + w^2 - ...  (geometric series by hand)
        one = UnitSeries.constant(1, 6)
        q = arith(one, one_plus(1, 6), "div")
        assert q.all_coeffs() == fr(1, -1, 1, -1, 1, -1, 1)

    def test_unit_div_roundtrip(self):
        u = UnitSeries(F(2), fr(1, 0, -3, 5))
        v = UnitSeries(F(-1), fr(4, 1, 1, 2))
        assert (u * v) / v == u

    def test_power_div(self):
        z2 = PowerSeries.monomial(2, 1, 6)
        z = PowerSeries.identity(6)
        assert (z2 / z).coeffs[:3] == fr(1, 0, 0)
        with pytest.raises(SeriesDivisionError):
            z / z2  # divisor has zero leading coefficient
        with pytest.raises(SeriesDivisionError):
            z / z  # quotient would be the constant 1

    def test_unit_div_by_zero_const(self):
        u = UnitSeries.constant(1, 4)
        with pytest.raises(SeriesDivisionError):
            u / UnitSeries.constant(0, 4)

    @given(series_strategy(), series_strategy())
    @settings(max_examples=40, deadline=None)
    def test_addition_commutes(self, f, g):
        assert f + g == g + f

    @given(series_strategy(), series_strategy())
    @settings(max_examples=40, deadline=None)
    def test_multiplication_commutes(self, f, g):
        assert f * g == g * f

    @given(series_strategy(), series_strategy(), series_strategy())
    @settings(max_examples=25, deadline=None)
    def test_multiplication_associates(self, f, g, h):
        assert (f * g) * h == f * (g * h)


class TestCompose:
    def test_zeta_of_square(self):
        z2 = PowerSeries.monomial(2, 1, 8)
        got = zeta_series(8).compose(z2)
        assert got == PowerSeries(fr(0, 1, 0, 1, 0, 1, 0, 1))

    def test_compose_identity(self):
        f = PowerSeries(fr(3, -1, 2, 0, 5))
        assert f.compose(PowerSeries.identity(5)) == f

    def test_hand_expansion(self):
        # z^2 o (z + z^2) = z^2 + 2 z^3 + z^4
        f = PowerSeries.monomial(2, 1, 4)
        g = PowerSeries(fr(1, 1, 0, 0))
        assert f.compose(g) == PowerSeries(fr(0, 1, 2, 1))


class TestInverse:
    def test_identity(self):
        z = PowerSeries.identity(7)
        assert z.comp_inverse() == z

    def test_zeta_truncated(self):
        # z/(1-z) inverts to w/(1+w): coefficients (-1)^(n-1)
        zeta = zeta_series(9)
        inv = zeta.comp_inverse()
        assert inv == PowerSeries(tuple(F(-1) ** (n - 1) for n in range(1, 10)))
        assert zeta.compose(inv) == PowerSeries.identity(9)

    def test_semicircular_table_row(self):
        # even-cumulant series of a radius-r semicircular is (r^2/4) z,
        # whose inverse is 4w/r^2
        for r in (F(2), F(3, 2)):
            f = PowerSeries.monomial(1, r * r / 4, 6)
            assert f.comp_inverse() == PowerSeries.monomial(1, 4 / (r * r), 6)

    def test_noninvertible(self):
        with pytest.raises(InversionError):
            PowerSeries.monomial(2, 1, 4).comp_inverse()

    @given(series_strategy(nonzero_linear=True))
    @settings(max_examples=30, deadline=None)
    def test_two_sided_inverse(self, f):
        ident = PowerSeries.identity(f.order)
        g = f.comp_inverse()
        assert f.compose(g) == ident
        assert g.compose(f) == ident

    def test_two_sided_inverse_order_16(self):
        import random

        rng = random.Random(7)
        for _ in range(3):
            coeffs = [F(rng.randrange(1, 5))] + [
                F(rng.randrange(-3, 4), rng.randrange(1, 4)) for _ in range(15)
            ]
            f = PowerSeries(tuple(coeffs))
            assert f.compose(f.comp_inverse()) == PowerSeries.identity(16)


class TestDilate:
    def test_identity_scale(self):
        assert zeta_series(8).dilate(1) == zeta_series(8)

    def test_square_scaling(self):
        assert PowerSeries.monomial(2, 1, 4).dilate(2) == PowerSeries.monomial(2, 4, 4)

    def test_quarter_zeta(self):
        got = zeta_series(6).dilate(F(1, 4))
        assert got == PowerSeries(tuple(F(1, 4**n) for n in range(1, 7)))

    @given(series_strategy(), small_fracs.filter(lambda x: x != 0))
    @settings(max_examples=40, deadline=None)
    def test_dilate_inverts(self, f, lam):
        assert f.dilate(lam).dilate(1 / lam) == f


class TestShiftDiv:
    def test_power_down(self):
        got = shift_div(PowerSeries.monomial(2, 1, 4), 1)
        assert got.all_coeffs() == fr(0, 1, 0, 0)

    def test_unit_up(self):
        w = UnitSeries(F(0), fr(1, 0, 0))
        got = shift_div(w, -1)
        assert got.all_coeffs() == fr(0, 0, 1, 0, 0)

    def test_zeta_down(self):
        got = shift_div(zeta_series(6), 1)
        assert got.all_coeffs() == fr(1, 1, 1, 1, 1, 1)

    def test_not_divisible(self):
        with pytest.raises(SeriesDivisionError):
            shift_div(zeta_series(6), 2)


class TestCoefPartition:
    def test_zeta_is_one(self):
        p = Partition(5, ((1, 2), (3, 4, 5)))
        assert coef_partition(zeta_series(6), p) == 1

    def test_square_series(self):
        z2 = PowerSeries.monomial(2, 1, 6)
        assert coef_partition(z2, Partition(4, ((1, 2), (3, 4)))) == 1
        assert coef_partition(z2, Partition(4, ((1, 2, 3, 4),))) == 0

    def test_moebius(self):
        assert coef_partition(moebius_series(6), Partition(3, ((1, 2), (3,)))) == -1

    def test_shape_only(self):
        f = PowerSeries(fr(2, 3, 5, 7))
        a = Partition(4, ((1, 4), (2, 3)))
        b = Partition(4, ((1, 2), (3, 4)))
        assert coef_partition(f, a) == coef_partition(f, b)


class TestWordSeries:
    def test_dense_storage(self):
        s = NCSeries2(3)
        assert len(s.table) == 2 + 4 + 8
        assert s.coef_word((1, 2, 1)) == 0

    def test_restriction(self):
        s = NCSeries2.from_function(3, lambda w: F(sum(w)))
        part = Partition(3, ((1, 3), (2,)))
        # coefficient of (1,1) times coefficient of (2,)
        assert coef_word(s, (1, 2, 1), part) == F(2) * F(2)

    def test_range(self):
        s = NCSeries2(2)
        with pytest.raises(CoefficientRangeError):
            s.coef_word((1, 1, 1))


class TestSerialization:
    def test_power_roundtrip(self):
        f = PowerSeries(fr(F(1, 3), -2, 0, 7))
        text = dump_series(f)
        assert text.splitlines()[0] == "order=4"
        assert parse_series(text) == f

    def test_unit_roundtrip(self):
        u = UnitSeries(F(5, 7), fr(0, -1, 3))
        assert parse_series(dump_series(u)) == u

    def test_word_roundtrip(self):
        s = NCSeries2.from_function(2, lambda w: F(len(w), 1 + w[0]))
        assert parse_series(dump_series(s)) == s

    def test_geometric_builder(self):
        g = geometric(F(-1), 4)
        assert g.all_coeffs() == fr(1, -1, 1, -1, 1)
