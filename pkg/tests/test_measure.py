import math
from fractions import Fraction as Q

import pytest
from hypothesis import given, strategies as st

from oracles import brute_box_prob, brute_pair_prob
from strategies import coords, distributions, positive
from symineq.errors import DimensionMismatch, InputError
from symineq.extremal import ExtremalParams, build_extremal
from symineq.measure import DiscreteDistribution, NormBall, prob_diff_in, prob_sum_in, ratio
from symineq.rational import as_rational, ceil_q, floor_q, to_decimal_string

P_VALUES = (1, 2, math.inf)


def extremal_n2():
    return build_extremal(ExtremalParams(2, 1, Q(1, 100), Q(1, 2)))


class TestRational:
    @pytest.mark.parametrize("text, value", [("3/4", Q(3, 4)), ("-2", Q(-2)), ("0.125", Q(1, 8)), (" 7 ", Q(7))])
    def test_parse(self, text, value):
        assert as_rational(text) == value

    @pytest.mark.parametrize("bad", [0.5, "abc", "1/0", None, True])
    def test_rejects_inexact_or_garbage(self, bad):
        with pytest.raises(InputError):
            as_rational(bad)

    @given(st.fractions(max_denominator=50))
    def test_floor_ceil_match_math(self, x):
        assert floor_q(x) == math.floor(x)
        assert ceil_q(x) == math.ceil(x)

    def test_decimal_rendering(self):
        assert to_decimal_string(Q(7, 4)) == "1.75"
        assert to_decimal_string(Q(1, 3)) == "0.333333333333333"
        assert to_decimal_string(Q(2, 3)) == "0.666666666666667"


class TestDistribution:
    def test_canonical_form_merges_and_sorts(self):
        mu = DiscreteDistribution(1, [((2,), Q(1, 4)), ((-1,), Q(1, 2)), ((2,), Q(1, 4))])
        assert mu.atoms == (((Q(-1),), Q(1, 2)), ((Q(2),), Q(1, 2)))
        assert mu == DiscreteDistribution.uniform([2, -1])
        assert hash(mu) == hash(DiscreteDistribution.uniform([-1, 2]))

    @pytest.mark.parametrize(
        "atoms",
        [
            [],
            [((0,), Q(1, 2))],
            [((0,), Q(3, 2)), ((1,), Q(-1, 2))],
            [((0, 1), 1)],
        ],
    )
    def test_invalid(self, atoms):
        with pytest.raises(InputError):
            DiscreteDistribution(1, atoms)

    def test_json_roundtrip(self):
        mu = DiscreteDistribution(2, [((Q(1, 3), -2), Q(1, 3)), ((0, 0), Q(2, 3))])
        obj = mu.to_json()
        assert obj["atoms"][1] == {"point": ["1/3", "-2"], "weight": "1/3"}
        assert DiscreteDistribution.from_json(obj) == mu

    @pytest.mark.parametrize(
        "obj",
        [
            [],
            {"atoms": []},
            {"dimension": 1, "atoms": [{"point": [0.5], "weight": "1"}]},
            {"dimension": 1, "atoms": [{"point": ["0"], "weight": "1/2"}]},
            {"dimension": 1, "atoms": [{"point": "0", "weight": "1"}]},
            {"dimension": "1", "atoms": []},
        ],
    )
    def test_json_rejects_malformed(self, obj):
        with pytest.raises(InputError):
            DiscreteDistribution.from_json(obj)

    def test_product(self):
        mu = DiscreteDistribution.uniform([0, 1])
        prod = mu.product(DiscreteDistribution.point_mass(5))
        assert prod.dimension == 2
        assert prod.atoms == (((0, 5), Q(1, 2)), ((1, 5), Q(1, 2)))


class TestNormBall:
    def test_radii_and_rho(self):
        K = NormBall(3, 1, Q(5, 2))
        assert K.inner_radius == Q(5, 2)
        assert K.diameter == 5
        assert K.rho == Q(1, 2)

    def test_l2_membership_without_roots(self):
        ball = NormBall(2, 2, 5)
        assert ball.contains((3, 4))
        assert not ball.contains((3, Q(4001, 1000)))

    def test_boundary_counts_inside(self):
        for p in P_VALUES:
            assert NormBall(2, p, 1).contains((1, 0))

    def test_bad_p(self):
        with pytest.raises(InputError):
            NormBall(1, 3, 1)


class TestWorkedExamples:
    def test_point_mass_sum(self):
        assert prob_sum_in(DiscreteDistribution.point_mass((0, 0)), NormBall(2, math.inf, 1)) == 1

    def test_symmetric_two_point_sum(self):
        assert prob_sum_in(DiscreteDistribution.uniform([-1, 1]), NormBall.interval(1)) == Q(1, 2)

    def test_extremal_sum_matches_enumeration(self):
        mu = extremal_n2()
        expected = brute_pair_prob(mu.atoms, 1, math.inf, +1)
        assert expected == Q(7, 16)
        assert prob_sum_in(mu, NormBall.interval(1)) == expected

    @pytest.mark.parametrize("radius", [0, Q(1, 3), 7])
    def test_point_mass_diff(self, radius):
        assert prob_diff_in(DiscreteDistribution.point_mass((Q(9, 7),)), NormBall.interval(radius)) == 1

    @pytest.mark.parametrize("n", [1, 2, 7, 30])
    def test_extremal_diff(self, n):
        mu = build_extremal(ExtremalParams(n, 1, Q(1, 100), Q(1, 2)))
        assert prob_diff_in(mu, NormBall.interval(1)) == Q(1, 2 * n)

    def test_far_apart_diff(self):
        assert prob_diff_in(DiscreteDistribution.uniform([0, 3]), NormBall.interval(1)) == Q(1, 2)

    def test_ratio_examples(self):
        F = NormBall.interval(Q(3, 2))
        assert ratio(DiscreteDistribution.point_mass(0), F, NormBall.interval(Q(1, 2))).value == 1
        assert ratio(extremal_n2(), NormBall.interval(1), NormBall.interval(1)).value == Q(7, 4)

    def test_ratio_product_is_multiplicative(self):
        mu = extremal_n2()
        prod = mu.product(mu)
        box = NormBall(2, math.inf, 1)
        result = ratio(prod, box, box)
        assert result.numerator == brute_pair_prob(prod.atoms, 1, math.inf, +1) == Q(49, 256)
        assert result.value == Q(7, 4) ** 2

    def test_ratio_diff_mode(self):
        mu = DiscreteDistribution.uniform([0, 1, 5])
        r = ratio(mu, NormBall.interval(4), NormBall.interval(1), mode="diff")
        assert r.numerator == Q(7, 9) and r.denominator == Q(5, 9)

    def test_undefined_ratio_is_not_a_crash(self):
        from symineq.measure import RatioResult

        r = RatioResult(Q(1, 2), Q(0))
        assert not r.defined and r.value is None

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            prob_sum_in(DiscreteDistribution.point_mass(0), NormBall(2, 1, 1))


class TestAgainstBruteForce:
    @given(distributions(), positive, st.sampled_from([+1, -1]))
    def test_one_dimensional(self, mu, radius, sign):
        got = prob_sum_in(mu, NormBall.interval(radius)) if sign > 0 else prob_diff_in(mu, NormBall.interval(radius))
        assert got == brute_pair_prob(mu.atoms, radius, math.inf, sign)

    @given(distributions(dimension=2, max_atoms=6), positive, st.sampled_from(P_VALUES), st.sampled_from([+1, -1]))
    def test_two_dimensional(self, mu, radius, p, sign):
        ball = NormBall(2, p, radius)
        got = prob_sum_in(mu, ball) if sign > 0 else prob_diff_in(mu, ball)
        assert got == brute_pair_prob(mu.atoms, radius, p, sign)

    def test_large_coordinates_use_exact_fallback(self):
        big = Q(10**30 + 1, 3)
        mu = DiscreteDistribution(2, [((big, 0), Q(1, 2)), ((-big, 1), Q(1, 2))])
        for p in P_VALUES:
            assert prob_sum_in(mu, NormBall(2, p, 1)) == brute_pair_prob(mu.atoms, 1, p, +1) == Q(1, 2)


class TestInvariants:
    @given(distributions(), positive)
    def test_diff_at_least_diagonal_mass(self, mu, radius):
        assert prob_diff_in(mu, NormBall.interval(radius)) >= sum(w * w for w in mu.weights) > 0

    @given(distributions(), st.randoms(), positive)
    def test_permutation_invariance(self, mu, rnd, radius):
        atoms = list(mu.atoms)
        rnd.shuffle(atoms)
        shuffled = DiscreteDistribution(1, atoms)
        F = NormBall.interval(radius)
        assert prob_sum_in(shuffled, F) == prob_sum_in(mu, F)
        assert prob_diff_in(shuffled, F) == prob_diff_in(mu, F)

    @given(distributions(dimension=2, max_atoms=5), st.tuples(coords, coords), positive)
    def test_translation(self, mu, shift, radius):
        moved = mu.translate(shift)
        K = NormBall(2, math.inf, radius)
        assert prob_diff_in(moved, K) == prob_diff_in(mu, K)
        lo = [-radius + 2 * t for t in shift]
        hi = [radius + 2 * t for t in shift]
        assert brute_box_prob(moved.atoms, lo, hi, +1) == prob_sum_in(mu, K)

    @given(distributions(), positive, positive, st.fractions(min_value=Q(1, 5), max_value=5, max_denominator=7))
    def test_scaling(self, mu, b, a, lam):
        scaled = mu.scale(lam)
        assert prob_sum_in(scaled, NormBall.interval(lam * b)) == prob_sum_in(mu, NormBall.interval(b))
        assert prob_diff_in(scaled, NormBall.interval(lam * a)) == prob_diff_in(mu, NormBall.interval(a))

    @given(distributions(dimension=2, max_atoms=5), positive, positive, st.sampled_from(P_VALUES))
    def test_monotone_in_radius(self, mu, r1, r2, p):
        small, large = sorted((r1, r2))
        for fn in (prob_sum_in, prob_diff_in):
            assert fn(mu, NormBall(2, p, small)) <= fn(mu, NormBall(2, p, large))
