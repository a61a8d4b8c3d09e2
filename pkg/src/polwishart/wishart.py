"""The relaxed scaled complex Wishart model W_R(Sigma, n).

Density, maximum-likelihood fitting and the closed-form expectations of
``log|Z|`` and ``tr(Sigma_j^-1 Z)``.
"""

from dataclasses import dataclass, field
import math

import numpy as np
from scipy import optimize

from . import hermitian as hm
from .errors import DimensionMismatch, DomainError, NoRootInBracket
from .special import digamma, ln_gamma, ln_multivariate_gamma

N_UPPER = 1e4
N_XTOL = 1e-8


def _check_looks(n, p):
    if not np.isfinite(n) or not n > p - 1:
        raise DomainError(f"number of looks must exceed p - 1 = {p - 1}, got {n}")


@dataclass(frozen=True, eq=False)
class WishartParams:
    """theta = (Sigma, n): mean covariance and equivalent number of looks."""

    sigma: np.ndarray
    n: float

    def __post_init__(self):
        object.__setattr__(self, "sigma", hm.validate(self.sigma))
        object.__setattr__(self, "n", float(self.n))
        _check_looks(self.n, self.p)

    @property
    def p(self):
        return self.sigma.shape[-1]

    def scaled(self, a):
        return WishartParams(a * self.sigma, self.n)


@dataclass(frozen=True, eq=False)
class SampleSet:
    """N observed covariance matrices from one region, stored as ``(N, p, p)``."""

    matrices: np.ndarray
    validated: bool = field(default=False, repr=False)

    def __post_init__(self):
        m = np.asarray(self.matrices, dtype=np.complex128)
        if m.ndim == 2:
            m = m[None]
        if m.ndim != 3 or m.shape[0] < 1:
            raise DimensionMismatch(f"sample must have shape (N, p, p), got {m.shape}")
        if not self.validated:
            m = hm.validate(m)
        object.__setattr__(self, "matrices", m)

    @property
    def p(self):
        return self.matrices.shape[-1]

    @property
    def N(self):
        return self.matrices.shape[0]

    def __len__(self):
        return self.N

    def subset(self, index):
        return SampleSet(self.matrices[index], validated=True)


def log_density(z, theta):
    """log f(Z; Sigma, n); ``z`` may be a single matrix or a stack."""
    z = np.asarray(z)
    hm.check_same_dim(z, theta.sigma)
    p, n = theta.p, theta.n
    return (
        p * n * math.log(n)
        + (n - p) * hm.logdet(z)
        - n * hm.logdet(theta.sigma)
        - ln_multivariate_gamma(n, p)
        - n * np.real(hm.trace_product(hm.inverse(theta.sigma), z))
    )


def gamma_log_density(z, sigma2, n):
    """Log of the one-channel reduction: Gamma(shape n, scale sigma2 / n)."""
    z = np.asarray(z, dtype=float)
    return n * math.log(n) + (n - 1) * np.log(z) - n * math.log(sigma2) - ln_gamma(n) - n * z / sigma2


def estimate_sigma(sample):
    return hm.validate(sample.matrices.mean(axis=0))


@dataclass(frozen=True)
class _ScoreStats:
    p: int
    mean_logdet_z: float
    logdet_sigma: float
    mean_trace: float

    def __call__(self, n):
        _check_looks(n, self.p)
        psi = sum(digamma(n - i) for i in range(self.p))
        return (
            self.p * (math.log(n) + 1.0)
            + self.mean_logdet_z
            - self.logdet_sigma
            - self.mean_trace
            - psi
        )


def _score_stats(sample, sigma_hat):
    hm.check_same_dim(sample.matrices, sigma_hat)
    # mean of tr(S^-1 Z_i) equals tr(S^-1 mean(Z)) by linearity
    zbar = sample.matrices.mean(axis=0)
    return _ScoreStats(
        p=sample.p,
        mean_logdet_z=float(np.mean(hm.logdet(sample.matrices))),
        logdet_sigma=float(hm.logdet(sigma_hat)),
        mean_trace=float(np.real(hm.trace_product(hm.inverse(sigma_hat), zbar))),
    )


def score_n(sample, sigma_hat, n):
    """Sample-averaged derivative of the profile log-likelihood in n."""
    return _score_stats(sample, sigma_hat)(n)


def estimate_n(sample, sigma_hat, upper=N_UPPER, xtol=N_XTOL):
    """Root of :func:`score_n` by bisection on ``(p - 1 + 1e-6, upper)``.

    Raises:
        NoRootInBracket: the score has the same sign at both ends, e.g. a
            single observation, for which the score is log n - psi(n) > 0.
    """
    score = _score_stats(sample, sigma_hat)
    lo, hi = sample.p - 1 + 1e-6, float(upper)
    f_lo, f_hi = score(lo), score(hi)
    if f_lo == 0:
        return lo
    if f_hi == 0:
        return hi
    if (f_lo > 0) == (f_hi > 0):
        raise NoRootInBracket(
            f"score does not change sign on [{lo:g}, {hi:g}] "
            f"(score={f_lo:.3g} and {f_hi:.3g}); the sample (N={sample.N}) carries "
            "no information on the number of looks"
        )
    return optimize.bisect(score, lo, hi, xtol=xtol)


def fit(sample):
    """ML estimate of (Sigma, n) from a sample."""
    sigma_hat = estimate_sigma(sample)
    return WishartParams(sigma_hat, estimate_n(sample, sigma_hat))


def expected_logdet(theta):
    """E log|Z| = log|Sigma| + sum_k psi(n - k) - p log n."""
    p, n = theta.p, theta.n
    return float(hm.logdet(theta.sigma)) + sum(digamma(n - k) for k in range(p)) - p * math.log(n)


def expected_logdet_rational(theta):
    """Same expectation written with one digamma and a rational sum."""
    p, n = theta.p, theta.n
    rational = sum(k / (n - k) for k in range(1, p))
    return float(hm.logdet(theta.sigma)) + p * digamma(n - p + 1) + rational - p * math.log(n)


def expected_trace(theta_i, sigma_j):
    """E tr(Sigma_j^-1 Z) for Z ~ W_R(theta_i); equals p when Sigma_j = Sigma_i."""
    hm.check_same_dim(theta_i.sigma, sigma_j)
    return float(np.real(hm.trace_product(hm.inverse(sigma_j), theta_i.sigma)))
