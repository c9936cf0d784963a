import itertools
import random
from fractions import Fraction as F

import pytest

from freeconv.freeops import (
    CommutatorExpr,
    Distribution,
    LawError,
    PreconditionError,
    arcsine,
    atomic,
    bernoulli,
    commutator_moment_route,
    commutator_s_route_even,
    commutator_variance,
    eval_expr,
    eval_expr_closed_form,
    even_part,
    exp_half,
    expr_depths,
    free_add,
    free_anticommutator_even,
    free_commutator,
    free_mul,
    free_poisson,
    free_power,
    iterate_commutator,
    iterate_trajectory,
    limit_s,
    make_law,
    negate,
    negate_dilate_shift,
    parse_expr,
    parse_law,
    projection,
    q_map,
    semicircular,
    square_relation_even,
)
from freeconv.series import PowerSeries, UnitSeries, one_plus
from freeconv.transforms import (
    moebius_series,
    r_even,
    r_to_moments,
    s_transform,
    star,
    zeta_series,
)


def point_mass(t, order):
    t = F(t)
    return Distribution(tuple(t**n for n in range(1, order + 1)))


def rand_dist(rng, order, even=False, nonzero_mean=False, nonzero_var=False):
    moments = [F(rng.randrange(-3, 4), rng.randrange(1, 4)) for _ in range(order)]
    if even:
        moments[0::2] = [F(0)] * len(moments[0::2])
    if nonzero_mean and moments[0] == 0:
        moments[0] = F(1)
    d = Distribution(tuple(moments))
    if nonzero_var and d.variance == 0:
        moments[1] = d.mean**2 + 1
        d = Distribution(tuple(moments))
    return d


def semicircular_r2(variance, order):
    # semicircular with possibly irrational radius, pinned by its variance
    return Distribution.from_r_transform(
        PowerSeries.monomial(2, F(variance), order))


class TestLaws:
    def test_semicircular_moments(self):
        d = make_law(semicircular(2), 8)
        assert d.moments == (F(0), F(1), F(0), F(2), F(0), F(5), F(0), F(14))

    def test_bernoulli_pm_one(self):
        d = make_law(bernoulli(F(1, 2), -1, 1), 6)
        assert d.moments == (F(0), F(1), F(0), F(1), F(0), F(1))

    def test_free_poisson(self):
        d = make_law(free_poisson(1, 1), 5)
        assert d.moments == (F(1), F(2), F(5), F(14), F(42))

    def test_projection(self):
        d = make_law(projection(F(1, 3)), 5)
        assert all(m == F(1, 3) for m in d.moments)

    def test_arcsine_variance(self):
        d = make_law(arcsine(1), 6)
        assert d.variance == F(1, 2)
        assert d.is_even

    def test_parse_round_trip(self):
        for text in ("semicircular:2", "poisson:1,1", "arcsine:1/2",
                     "bernoulli:1/2,-1,1", "atomic:(1/2@-1,1/2@1)",
                     "projection:1/2"):
            spec = parse_law(text)
            assert parse_law(str(spec)) == spec

    def test_parse_rejects(self):
        for text in ("semicircular:-1", "poisson:1", "bernoulli:2,-1,1",
                     "projection:0", "atomic:(1@1,1@2)", "nonsense:1"):
            with pytest.raises(LawError):
                parse_law(text)

    def test_atomic_matches_bernoulli(self):
        a = make_law(atomic([(F(1, 2), -1), (F(1, 2), 1)]), 6)
        b = make_law(bernoulli(F(1, 2), -1, 1), 6)
        assert a == b


class TestFreeAdd:
    def test_point_masses(self):
        assert free_add(point_mass(2, 6), point_mass(F(1, 2), 6)) == point_mass(F(5, 2), 6)

    def test_semicircular_radii(self):
        # variances add: two radius-2 semicirculars give variance 2
        s = make_law(semicircular(2), 8)
        out = free_add(s, s)
        assert out.r_transform() == PowerSeries.monomial(2, 2, 8)

    def test_zero_unit(self):
        rng = random.Random(0)
        mu = rand_dist(rng, 8)
        assert free_add(mu, point_mass(0, 8)) == mu


class TestFreePower:
    def test_identity(self):
        rng = random.Random(1)
        mu = rand_dist(rng, 8)
        assert free_power(mu, 1) == mu

    def test_half_power_squares_back(self):
        rng = random.Random(2)
        for _ in range(4):
            mu = rand_dist(rng, 10)
            half = free_power(mu, F(1, 2))
            assert free_add(half, half) == mu

    def test_semicircular_half(self):
        s = make_law(semicircular(2), 6)
        assert free_power(s, F(1, 2)).r_transform() == PowerSeries.monomial(2, F(1, 2), 6)


class TestFreeMul:
    def test_unit(self):
        rng = random.Random(3)
        mu = rand_dist(rng, 8)
        assert free_mul(mu, point_mass(1, 8)) == mu

    def test_s_transform_multiplies(self):
        rng = random.Random(4)
        for _ in range(3):
            mu = rand_dist(rng, 9, nonzero_mean=True)
            nu = rand_dist(rng, 9, nonzero_mean=True)
            prod = free_mul(mu, nu)
            assert s_transform(prod.moment_series()) == (
                s_transform(mu.moment_series()) * s_transform(nu.moment_series()))


class TestCommutator:
    def test_symmetric_poisson(self):
        s = make_law(semicircular(2), 12)
        c = free_commutator(s, s)
        r = c.r_transform()
        assert r.coeffs == tuple(F(0) if n % 2 else F(2) for n in range(1, 13))
        assert c.moment(2) == 2 and c.moment(4) == 10

    def test_bernoulli_reduction(self):
        flip = make_law(bernoulli(F(1, 2), -1, 1), 12)
        for spec in (semicircular(2), free_poisson(1, 1), projection(F(1, 3))):
            mu = make_law(spec, 12)
            assert free_commutator(mu, flip) == free_add(mu, negate(mu))

    def test_scalar_argument_vanishes(self):
        rng = random.Random(5)
        mu = rand_dist(rng, 8)
        assert free_commutator(mu, point_mass(F(7, 2), 8)) == point_mass(0, 8)

    def test_output_even(self):
        rng = random.Random(6)
        for _ in range(4):
            mu, nu = rand_dist(rng, 12), rand_dist(rng, 12)
            assert free_commutator(mu, nu).is_even

    def test_symmetric(self):
        rng = random.Random(7)
        mu, nu = rand_dist(rng, 10), rand_dist(rng, 10)
        assert free_commutator(mu, nu) == free_commutator(nu, mu)

    def test_depends_only_on_even_cumulants(self):
        rng = random.Random(8)
        mu, nu = rand_dist(rng, 10), rand_dist(rng, 10)
        base = free_commutator(mu, nu)
        assert free_commutator(negate(mu), nu) == base
        assert free_commutator(even_part(mu), nu) == base
        assert free_commutator(negate_dilate_shift(mu, 1, F(5, 3)), nu) == base
        assert free_commutator(mu, negate_dilate_shift(nu, 1, -2)) == base

    def test_half_power_associative(self):
        rng = random.Random(9)

        def op(a, b):
            return free_power(free_commutator(a, b), F(1, 2))

        for _ in range(3):
            a, b, c = (rand_dist(rng, 8) for _ in range(3))
            assert op(op(a, b), c) == op(a, op(b, c))


class TestAnticommutator:
    def test_even_pair_equals_commutator(self):
        s = make_law(semicircular(2), 10)
        b = make_law(bernoulli(F(1, 2), -1, 1), 10)
        assert free_anticommutator_even(s, s) == free_commutator(s, s)
        assert free_anticommutator_even(b, b) == free_commutator(b, b)

    def test_rejects_non_even(self):
        p = make_law(projection(F(1, 2)), 8)
        with pytest.raises(PreconditionError):
            free_anticommutator_even(p, p)


class TestAffine:
    def test_negate_flips_odd_moments(self):
        rng = random.Random(20)
        mu = rand_dist(rng, 8)
        got = negate(mu)
        assert got.moments == tuple(
            -m if n % 2 else m for n, m in enumerate(mu.moments, start=1))

    def test_projection_shift_to_symmetric_atoms(self):
        # projection of trace 1/2, shifted down by 1/2: atoms at +-1/2
        shifted = negate_dilate_shift(make_law(projection(F(1, 2)), 8), 1, F(-1, 2))
        want = make_law(atomic([(F(1, 2), F(-1, 2)), (F(1, 2), F(1, 2))]), 8)
        assert shifted == want

    def test_dilation_scales_cumulants(self):
        rng = random.Random(21)
        mu = rand_dist(rng, 8)
        lam = F(2, 3)
        assert negate_dilate_shift(mu, lam, 0).r_transform() == \
            mu.r_transform().dilate(lam)


class TestEvenPartAndQ:
    def test_even_fixed_point(self):
        s = make_law(semicircular(2), 8)
        assert even_part(s) == s

    def test_point_mass_collapses(self):
        assert even_part(point_mass(3, 8)) == point_mass(0, 8)

    def test_q_semicircular_is_poisson(self):
        s = make_law(semicircular(2), 12)
        assert q_map(s) == make_law(free_poisson(1, 1), 6)

    def test_q_flip(self):
        b = make_law(bernoulli(F(1, 2), -1, 1), 8)
        assert q_map(b) == point_mass(1, 4)

    def test_square_transport(self):
        # squaring carries the half-power commutator to free multiplication
        rng = random.Random(10)
        for _ in range(3):
            mu = rand_dist(rng, 12, even=True)
            nu = rand_dist(rng, 12, even=True)
            lhs = q_map(free_power(free_commutator(mu, nu), F(1, 2)))
            rhs = free_mul(q_map(mu), q_map(nu))
            assert lhs == rhs


class TestMomentRoute:
    def test_semicircular_projection(self):
        a = make_law(semicircular(2), 12)
        b = make_law(projection(F(1, 4)), 12)
        got = commutator_moment_route(a, b)
        expect = free_commutator(a, b)
        assert got.moments == expect.moments[: got.order]

    def test_random_pairs(self):
        rng = random.Random(11)
        for _ in range(3):
            mu = rand_dist(rng, 12, nonzero_var=True)
            nu = rand_dist(rng, 12, nonzero_var=True)
            got = commutator_moment_route(mu, nu)
            assert got.order == 10
            assert got.moments == free_commutator(mu, nu).moments[:10]

    def test_zero_variance_rejected(self):
        with pytest.raises(PreconditionError):
            commutator_moment_route(point_mass(2, 8), point_mass(1, 8))


class TestSRoute:
    def test_variance_identity(self):
        rng = random.Random(12)
        for _ in range(5):
            mu = rand_dist(rng, 8, nonzero_var=True)
            nu = rand_dist(rng, 8, nonzero_var=True)
            c = free_commutator(mu, nu)
            assert c.variance == commutator_variance(mu, nu)

    def test_matches_direct_s_transform(self):
        rng = random.Random(13)
        for _ in range(3):
            mu = rand_dist(rng, 12, even=True, nonzero_var=True)
            nu = rand_dist(rng, 12, even=True, nonzero_var=True)
            got = commutator_s_route_even(mu, nu)
            c = free_commutator(mu, nu)
            gamma = commutator_variance(mu, nu)
            direct = s_transform(
                negate_dilate_shift(q_map(c), 1 / gamma, 0).moment_series())
            assert got == direct

    def test_semicircular_pair_closed_form(self):
        # both normalized squares are free Poisson(1,1), so the S-route
        # gives (1+w/2)/(1+w) * (1+w/2)^-2 at argument w/2
        s = make_law(semicircular(2), 18)
        got = commutator_s_route_even(s, s)
        k = got.order
        half = F(1, 2)
        expect = (one_plus(half, k) / one_plus(1, k)) * (
            UnitSeries.constant(1, k) / one_plus(half, k)) * (
            UnitSeries.constant(1, k) / one_plus(half, k))
        assert got == expect
        assert k >= 8

    def test_rejects_non_even(self):
        p = make_law(projection(F(1, 3)), 8)
        s = make_law(semicircular(2), 8)
        with pytest.raises(PreconditionError):
            commutator_s_route_even(p, s)


class TestSquareRelation:
    def test_semicircular(self):
        s = make_law(semicircular(2), 12)
        lhs, rhs = square_relation_even(s)
        assert lhs == rhs == PowerSeries.identity(6)

    def test_bernoulli_gives_moebius(self):
        b = make_law(bernoulli(F(1, 2), -1, 1), 12)
        lhs, rhs = square_relation_even(b)
        assert lhs == rhs == moebius_series(6)

    def test_arcsine_table_row(self):
        d = make_law(arcsine(F(3, 2)), 16)
        ev = r_even(d.r_transform())
        # tabulated inverse (2w + w^2)/r^2
        r2 = F(9, 4)
        inv = PowerSeries(tuple(
            F(2) / r2 if n == 1 else (F(1) / r2 if n == 2 else F(0))
            for n in range(1, 9)))
        assert ev.compose(ev.comp_inverse()) == PowerSeries.identity(8)
        assert ev.comp_inverse() == inv

    def test_random_even(self):
        rng = random.Random(14)
        for _ in range(4):
            mu = rand_dist(rng, 12, even=True)
            lhs, rhs = square_relation_even(mu)
            assert lhs == rhs
            # moment identity for the square
            m = q_map(mu).moment_series()
            zz = star(zeta_series(6), zeta_series(6))
            assert m == star(lhs, zz)


def all_trees(n):
    if n == 1:
        return [CommutatorExpr.leaf(1)]
    out = []
    for k in range(1, n):
        for left in all_trees(k):
            for right in all_trees(n - k):
                shifted = _shift(right, k)
                out.append(CommutatorExpr.node(left, shifted))
    return out


def _shift(e, by):
    if e.is_leaf:
        return CommutatorExpr.leaf(e.index + by)
    return CommutatorExpr.node(_shift(e.left, by), _shift(e.right, by))


class TestExpressions:
    def test_parse_and_print(self):
        e = parse_expr("[[1,2],[3,4]]")
        assert str(e) == "[[1,2],[3,4]]"
        assert e.n_args() == 4
        with pytest.raises(LawError):
            parse_expr("[[1,3],[2,4]]")
        with pytest.raises(LawError):
            parse_expr("[1,2")

    def test_depth_examples(self):
        left_comb = parse_expr("[[[1,2],3],4]")
        assert left_comb.depth_vector() == (3, 3, 2, 1)
        balanced = parse_expr("[[1,2],[3,4]]")
        assert balanced.depth_vector() == (2, 2, 2, 2)
        assert parse_expr("[1,2]").box_depth_vector() == (1,)
        assert expr_depths(left_comb) == ((3, 3, 2, 1), (3, 2, 1))

    def test_exchange_identity(self):
        rng = random.Random(15)
        args = tuple(rand_dist(rng, 8) for _ in range(4))
        f = parse_expr("[[1,2],[3,4]]")
        swapped = (args[0], args[2], args[1], args[3])
        assert eval_expr(f, args) == eval_expr(f, swapped)

    def test_recursion_matches_closed_form(self):
        rng = random.Random(16)
        for n in range(2, 5):
            args = tuple(rand_dist(rng, 8) for _ in range(n))
            for tree in all_trees(n):
                assert eval_expr(tree, args) == eval_expr_closed_form(tree, args)

    def test_closed_form_single_even_argument(self):
        rng = random.Random(17)
        mu = rand_dist(rng, 8, even=True)
        leaf = CommutatorExpr.leaf(1)
        assert eval_expr_closed_form(leaf, (mu,)) == eval_expr(leaf, (mu,)) == mu

    def test_permutation_identities(self):
        rng = random.Random(18)
        for n in (3, 4):
            args = tuple(rand_dist(rng, 8) for _ in range(n))
            trees = all_trees(n)
            for f, fhat in itertools.product(trees, repeat=2):
                d, dhat = f.depth_vector(), fhat.depth_vector()
                if sorted(d) != sorted(dhat):
                    continue
                # box-depths must then also agree as multisets
                assert sorted(f.box_depth_vector()) == sorted(fhat.box_depth_vector())
                for tau in itertools.permutations(range(n)):
                    if all(d[i] == dhat[tau[i]] for i in range(n)):
                        f_args = tuple(args[tau[i]] for i in range(n))
                        assert eval_expr(f, f_args) == eval_expr(fhat, args)
                        break  # one witness permutation suffices per pair

    def test_canonical_iterates_commute(self):
        rng = random.Random(19)
        nu = rand_dist(rng, 8)

        def chain(start, steps):
            c = start
            for _ in range(steps - 1):
                c = free_commutator(c, start)
            return c

        for m in range(1, 4):
            for n in range(1, 4):
                assert chain(chain(nu, n), m) == chain(chain(nu, m), n)


class TestIterated:
    def test_variance_law(self):
        for spec, gamma in ((bernoulli(F(1, 2), -1, 1), F(1)),
                            (arcsine(1), F(1, 2))):
            mu = make_law(spec, 12)
            assert mu.variance == gamma
            traj = iterate_trajectory(mu, 6)
            for m, c in enumerate(traj, start=1):
                assert c.variance == F(1, 2) * (2 * gamma) ** m

    def test_rejects_non_even(self):
        with pytest.raises(PreconditionError):
            iterate_commutator(make_law(projection(F(1, 2)), 8), 3)

    def test_bernoulli_converges_to_semicircular(self):
        # variance-1/2 two-point law, stored by its rational moments 2^-n
        order = 12
        mu = Distribution(tuple(
            F(0) if n % 2 else F(1, 2 ** (n // 2)) for n in range(1, order + 1)))
        target = semicircular_r2(F(1, 2), order)

        def rel_errors(c):
            return [abs(c.moment(k) - target.moment(k)) / abs(target.moment(k))
                    for k in range(2, order + 1, 2)]

        prev = None
        for m in (4, 6, 8, 10):
            errs = rel_errors(iterate_commutator(mu, m))
            assert errs[0] == 0  # the variance is pinned at 1/2 throughout
            assert errs[1] <= F(1, 2**m)  # the observed drift of the 4th moment
            if prev is not None:
                assert all(e < p for e, p in zip(errs[1:], prev[1:]))
            prev = errs
        # at ten steps the named moments sit within 1e-3 of the limit
        assert prev[0] == 0 and prev[1] < F(1, 1000)

    def test_product_formula_for_squares(self):
        # semicircular with variance 1/2; its doubled square is free
        # Poisson(1,1), so g(w) = 1/(1+w)
        order = 14
        mu = semicircular_r2(F(1, 2), order)
        two_sq = negate_dilate_shift(q_map(mu), 2, 0)
        g = s_transform(two_sq.moment_series())
        k = g.order
        assert g == UnitSeries.constant(1, k) / one_plus(1, k)
        for m in range(2, 6):
            c_m = iterate_commutator(mu, m)
            lhs = s_transform(
                negate_dilate_shift(q_map(c_m), 2, 0).moment_series())
            rhs = one_plus(F(1, 2 ** (m - 1)), k) / one_plus(1, k)
            for j in range(1, m):
                rhs = rhs * g.dilate(F(1, 2**j))
            rhs = rhs * g.dilate(F(1, 2 ** (m - 1)))
            assert lhs == rhs


class TestLimit:
    def test_constant_input(self):
        one = UnitSeries.constant(1, 8)
        res = limit_s(one, 8)
        assert res.series == UnitSeries.constant(1, 8) / one_plus(1, 8)
        assert all(b == 0 for b in res.tail_bound)
        assert all(d == 0 for d in res.delta)

    def test_exp_half_zero(self):
        assert exp_half(0, 6) == UnitSeries.constant(1, 6)

    def test_product_matches_exp_half(self):
        g = UnitSeries.constant(1, 8) / one_plus(1, 8)
        res = limit_s(g, 8)
        target = exp_half(-2, 8)
        for j, (a, b, bound) in enumerate(
                zip(res.series.all_coeffs(), target.all_coeffs(), res.tail_bound)):
            assert abs(a - b) <= bound, f"coefficient {j}"
            assert abs(a - b) < F(1, 10**6)
