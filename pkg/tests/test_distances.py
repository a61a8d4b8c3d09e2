import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import (
    close, literal_bartlett, literal_rw, quad_bhattacharyya, quad_hellinger, quad_kl, quad_renyi,
    quad_renyi_integrals,
)
from polwishart import hermitian as hm
from polwishart.distances import (
    Case, Kind, Measure, bartlett_distance, bhattacharyya_distance, check_beta, distance,
    equal_looks_matrix, hellinger_distance, inequality_suite, kl_distance, renyi_distance,
    renyi_symmetrized, renyi_terms, resolve_case, revised_wishart_distance,
)
from polwishart.errors import DimensionMismatch, DomainError
from polwishart.sampler import seeded_rng
from polwishart.scenes import forest_covariance
from polwishart.wishart import WishartParams

FOREST = forest_covariance()
FOUR = ("kl", "renyi:0.9", "bhattacharyya", "hellinger")
ALL = FOUR + ("renyi:0.25", "bartlett", "rw")


def W(s, n):
    return WishartParams(np.atleast_2d(s), n)


def pair(seed, p, same_n=False, same_sigma=False):
    rng = seeded_rng(seed)
    s1 = hm.random_hpd(p, rng)
    s2 = s1.copy() if same_sigma else hm.random_hpd(p, rng)
    n1 = rng.uniform(p, 16.0)
    n2 = n1 if same_n else rng.uniform(p, 16.0)
    return W(s1, n1), W(s2, n2)


class TestMeasure:
    def test_parse(self):
        assert Measure.parse("renyi:0.9") == Measure(Kind.RENYI, 0.9)
        assert Measure.parse("renyi", 0.3).label == "renyi:0.3"
        assert Measure.parse("bhattacharyya").beta is None

    @pytest.mark.parametrize("beta", [0.0, 1.0, -0.2, 1.5, None])
    def test_beta_domain(self, beta):
        with pytest.raises(DomainError):
            check_beta(beta)

    def test_renyi_needs_beta(self):
        with pytest.raises(DomainError):
            Measure.parse("renyi")


class TestKnownValues:
    @pytest.mark.parametrize("m", ALL)
    def test_identical_is_zero(self, m):
        t = W(FOREST, 5.0)
        assert distance(m, t, t) == 0.0

    def test_kl_scalar_multiple(self):
        assert kl_distance(W(FOREST, 4.0), W(1.2 * FOREST, 4.0)) == pytest.approx(0.2, abs=1e-12)

    def test_rw_scalar_multiple(self):
        assert revised_wishart_distance(FOREST, 2 * FOREST) == pytest.approx(0.75, abs=1e-12)

    def test_bhattacharyya_equal_looks_scalar(self):
        ref = 4.0 * math.log(3.0 / (2.0 * math.sqrt(2.0)))
        assert bhattacharyya_distance(W(1.0, 4.0), W(2.0, 4.0)) == pytest.approx(ref, abs=1e-14)

    def test_pinned_one_channel_values(self):
        t1, t2 = W(1.0, 4.0), W(2.0, 6.0)
        assert kl_distance(t1, t2) == pytest.approx(1.2376820724517805, rel=1e-12)
        assert renyi_distance(t1, t2, 0.9) == pytest.approx(1.1106745116639147, rel=1e-10)
        assert bhattacharyya_distance(t1, t2) == pytest.approx(0.3069610298898343, rel=1e-10)
        assert hellinger_distance(t1, t2) == pytest.approx(0.26432073014917357, rel=1e-10)


class TestQuadrature:
    @pytest.mark.parametrize("n1,s1,n2,s2", [(4, 1, 6, 2), (8, 3, 8, 3.75), (16, 1, 4, 5), (4.5, 2, 4.5, 2)])
    def test_one_channel(self, n1, s1, n2, s2):
        t1, t2 = W(s1, n1), W(s2, n2)
        assert close(kl_distance(t1, t2), quad_kl(n1, s1, n2, s2))
        assert close(bhattacharyya_distance(t1, t2), quad_bhattacharyya(n1, s1, n2, s2))
        assert close(hellinger_distance(t1, t2), quad_hellinger(n1, s1, n2, s2))
        for beta in (0.1, 0.5, 0.9):
            assert close(renyi_distance(t1, t2, beta), quad_renyi(n1, s1, n2, s2, beta))

    def test_renyi_terms(self):
        lt12, lt21 = renyi_terms(W(1.0, 4.0), W(2.0, 6.0), 0.9)
        q12, q21 = quad_renyi_integrals(4, 1, 6, 2, 0.9)
        assert lt12 == pytest.approx(math.log(q12), abs=1e-8)
        assert lt21 == pytest.approx(math.log(q21), abs=1e-8)


class TestCases:
    def test_auto_selection(self):
        assert resolve_case(W(FOREST, 4.0), W(2 * FOREST, 4.0)) is Case.EQUAL_LOOKS
        assert resolve_case(W(FOREST, 4.0), W(FOREST, 6.0)) is Case.EQUAL_SIGMA
        assert resolve_case(W(FOREST, 4.0), W(2 * FOREST, 6.0)) is Case.GENERAL

    def test_forced_case_mismatch(self):
        with pytest.raises(DomainError):
            kl_distance(W(FOREST, 4.0), W(FOREST, 6.0), Case.EQUAL_LOOKS)
        with pytest.raises(DomainError):
            kl_distance(W(FOREST, 4.0), W(2 * FOREST, 4.0), Case.EQUAL_SIGMA)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            kl_distance(W(np.eye(2), 4.0), W(np.eye(3), 4.0))

    @pytest.mark.parametrize("p", [1, 2, 3])
    def test_general_equals_special(self, p):
        for seed in range(50):
            for same in ("n", "sigma"):
                t1, t2 = pair(seed, p, same_n=same == "n", same_sigma=same == "sigma")
                special = Case.EQUAL_LOOKS if same == "n" else Case.EQUAL_SIGMA
                for m in FOUR:
                    g = distance(m, t1, t2, Case.GENERAL)
                    s = distance(m, t1, t2, special)
                    assert abs(g - s) <= 1e-10 * max(1.0, abs(g))


class TestRelations:
    def test_renyi_half_is_twice_bhattacharyya(self):
        for seed in range(50):
            t1, t2 = pair(seed, 3)
            assert renyi_distance(t1, t2, 0.5) == pytest.approx(2 * bhattacharyya_distance(t1, t2), rel=1e-10, abs=1e-12)

    def test_hellinger_from_bhattacharyya(self):
        for seed in range(50):
            t1, t2 = pair(seed, 3)
            assert hellinger_distance(t1, t2) == pytest.approx(-math.expm1(-bhattacharyya_distance(t1, t2)), abs=1e-12)

    def test_bartlett_and_rw_reductions(self):
        for seed in range(50):
            t1, t2 = pair(seed, 3, same_n=True)
            n = t1.n
            assert bartlett_distance(t1.sigma, t2.sigma) == pytest.approx(2 / n * bhattacharyya_distance(t1, t2), rel=1e-10)
            assert revised_wishart_distance(t1.sigma, t2.sigma) == pytest.approx(kl_distance(t1, t2) / n, rel=1e-10)

    def test_literal_forms(self):
        for seed in range(20):
            t1, t2 = pair(seed, 3)
            assert bartlett_distance(t1.sigma, t2.sigma) == pytest.approx(literal_bartlett(t1.sigma, t2.sigma), rel=1e-8, abs=1e-12)
            assert revised_wishart_distance(t1.sigma, t2.sigma) == pytest.approx(literal_rw(t1.sigma, t2.sigma), rel=1e-8, abs=1e-12)

    def test_renyi_terms_properties(self):
        t = W(FOREST, 5.0)
        assert renyi_terms(t, t, 0.3) == pytest.approx((0.0, 0.0), abs=1e-9)
        for seed in range(50):
            t1, t2 = pair(seed, 2)
            a, b = renyi_terms(t1, t2, 0.5)
            assert a == pytest.approx(b, abs=1e-10)
            for beta in (0.1, 0.6, 0.9):
                assert renyi_symmetrized(t1, t2, beta) >= renyi_distance(t1, t2, beta) - 1e-12


class TestInvariance:
    @pytest.mark.parametrize("scale", [1e-6, 1e6])
    def test_scale(self, scale):
        for seed in range(20):
            t1, t2 = pair(seed, 3)
            for m in ALL:
                ref = distance(m, t1, t2)
                got = distance(m, t1.scaled(scale), t2.scaled(scale))
                assert abs(got - ref) <= 1e-10 * max(1.0, ref)

    def test_unitary(self):
        rng = seeded_rng(77)
        t1, t2 = pair(3, 3)
        for _ in range(20):
            u = hm.random_unitary(3, rng)
            r1 = W(u @ t1.sigma @ np.conj(u.T), t1.n)
            r2 = W(u @ t2.sigma @ np.conj(u.T), t2.n)
            for m in ALL:
                ref = distance(m, t1, t2)
                assert abs(distance(m, r1, r2) - ref) <= 1e-10 * max(1.0, ref)


class TestEqualLooksMatrix:
    @pytest.mark.parametrize("m", ALL)
    def test_matches_pairwise(self, m):
        rng = seeded_rng(5)
        z = hm.random_hpd(3, rng, size=6)
        c = hm.random_hpd(3, rng, size=3)
        d = equal_looks_matrix(m, z, c, 7.0)
        for i in range(6):
            for j in range(3):
                ref = distance(m, W(z[i], 7.0), W(c[j], 7.0))
                assert d[i, j] == pytest.approx(ref, rel=1e-10, abs=1e-12)


class TestInequalities:
    @pytest.mark.parametrize("p", [2, 3])
    def test_hold(self, p):
        rng = seeded_rng(p)
        for _ in range(100):
            s1, s2 = hm.random_hpd(p, rng), hm.random_hpd(p, rng)
            rep = inequality_suite(s1, s2, 4.0, 0.25)
            assert rep.all_hold
            assert not any(c.tight for c in rep.checks)

    def test_tight_when_equal(self):
        s = hm.random_hpd(3, seeded_rng(1))
        rep = inequality_suite(s, s, 8.0, 0.75)
        assert rep.all_hold and all(c.tight for c in rep.checks)

    def test_half_reduces_to_determinant_form(self):
        rng = seeded_rng(2)
        n = 8.0
        for _ in range(20):
            s1, s2 = hm.random_hpd(3, rng), hm.random_hpd(3, rng)
            rep = inequality_suite(s1, s2, n, 0.5)
            gap12 = rep.renyi.lhs - rep.renyi.rhs
            gap14 = rep.log_det.rhs - rep.log_det.lhs
            assert gap12 == pytest.approx(n * gap14, abs=1e-10 * max(1.0, abs(gap12)))


hpd_seeds = st.integers(0, 2**32 - 1)


@settings(max_examples=50, deadline=None)
@given(seed=hpd_seeds, p=st.integers(1, 3), m=st.sampled_from(ALL))
def test_symmetric_and_nonnegative(seed, p, m):
    t1, t2 = pair(seed, p)
    d12, d21 = distance(m, t1, t2), distance(m, t2, t1)
    assert d12 >= 0
    assert abs(d12 - d21) <= 1e-12 * max(1.0, d12)


@settings(max_examples=50, deadline=None)
@given(seed=hpd_seeds, p=st.integers(1, 3))
def test_hellinger_below_bhattacharyya(seed, p):
    t1, t2 = pair(seed, p)
    assert hellinger_distance(t1, t2) <= bhattacharyya_distance(t1, t2)
