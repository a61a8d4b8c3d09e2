import math

import mpmath
import numpy as np
import pytest
from scipy import special as sp
from scipy import stats

from polwishart.errors import DomainError
from polwishart.special import (
    EULER_GAMMA, chi2_sf, digamma, gamma_q, ln_gamma, ln_multivariate_gamma,
)


class TestLnGamma:
    def test_known_values(self):
        assert ln_gamma(1.0) == 0.0
        assert ln_gamma(5.0) == pytest.approx(math.log(24.0), abs=1e-14)
        assert ln_gamma(0.5) == pytest.approx(0.5 * math.log(math.pi), abs=1e-14)

    @pytest.mark.parametrize("x", [1e-3, 0.1, 0.7, 3.3, 17.5, 250.0, 1e4, 1e6])
    def test_against_mpmath(self, x):
        ref = float(mpmath.loggamma(mpmath.mpf(x)))
        # float64 spacing at |ref| ~ 1e7 is ~1e-9: absolute where small, relative beyond
        assert abs(ln_gamma(x) - ref) <= max(1e-12, 4e-16 * abs(ref))

    @pytest.mark.parametrize("x", [0.0, -1.0, -0.5])
    def test_domain(self, x):
        with pytest.raises(DomainError):
            ln_gamma(x)


class TestDigamma:
    def test_euler_constant(self):
        # shift-to-6 with a 7-term tail truncates at ~2e-13
        assert digamma(1.0) == pytest.approx(-EULER_GAMMA, abs=1e-12)
        assert digamma(2.0) == pytest.approx(1.0 - EULER_GAMMA, abs=1e-12)
        assert digamma(0.5) == pytest.approx(-EULER_GAMMA - 2 * math.log(2), abs=1e-12)

    def test_recurrence(self):
        for x in np.linspace(0.1, 100.0, 2001):
            assert abs(digamma(x + 1) - digamma(x) - 1.0 / x) <= 1e-12

    @pytest.mark.parametrize("x", [1e-3, 0.05, 0.9, 2.5, 5.999, 6.0, 42.0, 1e5])
    def test_against_mpmath(self, x):
        ref = float(mpmath.digamma(mpmath.mpf(x)))
        assert digamma(x) == pytest.approx(ref, abs=1e-12, rel=1e-12)

    def test_matches_scipy_on_grid(self):
        xs = np.linspace(0.05, 60.0, 997)
        ours = np.array([digamma(x) for x in xs])
        np.testing.assert_allclose(ours, sp.digamma(xs), rtol=1e-12, atol=1e-12)

    def test_finite_difference_of_ln_gamma(self):
        h = 1e-5
        for x in np.linspace(0.5, 50.0, 100):
            fd = (ln_gamma(x + h) - ln_gamma(x - h)) / (2 * h)
            assert abs(fd - digamma(x)) <= 1e-6

    def test_domain(self):
        with pytest.raises(DomainError):
            digamma(0.0)


class TestMultivariateGamma:
    def test_reductions(self):
        assert ln_multivariate_gamma(1.0, 1) == 0.0
        assert ln_multivariate_gamma(2.0, 2) == pytest.approx(math.log(math.pi), abs=1e-14)
        for L in range(1, 21):
            assert math.exp(ln_multivariate_gamma(float(L), 1)) == pytest.approx(math.gamma(L), rel=1e-12)

    @pytest.mark.parametrize("L,p", [(2.5, 3), (3.7, 3), (10.0, 4), (2.000001, 3)])
    def test_against_product_form(self, L, p):
        ref = mpmath.pi ** (p * (p - 1) / 2.0)
        for i in range(p):
            ref *= mpmath.gamma(mpmath.mpf(L) - i)
        assert ln_multivariate_gamma(L, p) == pytest.approx(float(mpmath.log(ref)), abs=1e-11)

    def test_domain(self):
        with pytest.raises(DomainError):
            ln_multivariate_gamma(2.0, 3)
        with pytest.raises(DomainError):
            ln_multivariate_gamma(3.0, 0)


class TestChi2Sf:
    def test_closed_form_k2(self):
        assert chi2_sf(0.0, 2) == 1.0
        assert chi2_sf(2.0, 2) == pytest.approx(math.exp(-1.0), abs=1e-15)

    def test_known_quantile(self):
        assert chi2_sf(18.307, 10) == pytest.approx(0.05, abs=2e-5)

    @pytest.mark.parametrize("k", [1, 3, 9, 10, 25, 30])
    def test_against_scipy(self, k):
        xs = np.concatenate([np.linspace(0.0, 4 * k + 40, 200), [1e-8, 0.5 * k + 1]])
        ours = np.array([chi2_sf(x, k) for x in xs])
        np.testing.assert_allclose(ours, stats.chi2.sf(xs, k), atol=1e-10, rtol=1e-9)

    def test_tail_against_mpmath(self):
        # deep tail: relative accuracy matters, not the 1e-10 absolute bound
        for k, x in [(10, 200.0), (3, 150.0), (30, 400.0)]:
            ref = float(mpmath.gammainc(k / 2.0, x / 2.0, mpmath.inf, regularized=True))
            assert chi2_sf(x, k) == pytest.approx(ref, rel=1e-10)

    def test_monotone(self):
        xs = np.linspace(0.0, 80.0, 10_000)
        for k in (1, 10, 30):
            vals = np.array([chi2_sf(x, k) for x in xs])
            assert np.all(np.diff(vals) <= 0.0)
            assert vals.min() >= 0.0 and vals.max() <= 1.0

    def test_gamma_q_branches_meet(self):
        for a in (0.5, 2.0, 7.5, 15.0):
            x = a + 1.0
            lo = gamma_q(a, x * (1 - 1e-12))
            assert gamma_q(a, x) == pytest.approx(lo, abs=1e-11)

    def test_domain(self):
        with pytest.raises(DomainError):
            chi2_sf(-1.0, 3)
        with pytest.raises(DomainError):
            chi2_sf(1.0, 0)
