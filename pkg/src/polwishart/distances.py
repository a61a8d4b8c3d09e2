"""Closed-form stochastic distances between relaxed complex Wishart laws.

Each (h, phi) distance has three closed forms: the general one (different
covariances and looks), equal looks, and equal covariance.  All products of
gammas, powers and determinants are accumulated as sums of logarithms, so
realistic PolSAR determinants (1e-10 .. 1e15) and large look numbers neither
underflow nor overflow.

The Bartlett and revised Wishart distances depend on the covariances only.
"""

from dataclasses import dataclass
import enum
import math

import numpy as np

from . import hermitian as hm
from .errors import DimensionMismatch, DomainError
from .special import digamma, ln_multivariate_gamma

AUTO_TOL = 1e-12
FORCED_CASE_RTOL = 1e-9
LOG2 = math.log(2.0)


class Kind(enum.Enum):
    KL = "kl"
    RENYI = "renyi"
    BHATTACHARYYA = "bhattacharyya"
    HELLINGER = "hellinger"
    BARTLETT = "bartlett"
    REVISED_WISHART = "rw"

    @classmethod
    def parse(cls, text):
        aliases = {"revised-wishart": "rw", "revised_wishart": "rw", "b": "bhattacharyya", "h": "hellinger"}
        key = str(text).strip().lower()
        try:
            return cls(aliases.get(key, key))
        except ValueError:
            names = ", ".join(k.value for k in cls)
            raise ValueError(f"unknown measure {text!r}; expected one of {names}") from None

    @property
    def needs_looks(self):
        return self not in (Kind.BARTLETT, Kind.REVISED_WISHART)


class Case(enum.Enum):
    GENERAL = "general"
    EQUAL_LOOKS = "equal-looks"
    EQUAL_SIGMA = "equal-sigma"
    AUTO = "auto"

    @classmethod
    def parse(cls, text):
        return cls(str(text).strip().lower().replace("_", "-"))


def check_beta(beta):
    if beta is None or not 0.0 < beta < 1.0:
        raise DomainError(f"Renyi order must lie strictly inside (0, 1), got {beta}")
    return float(beta)


@dataclass(frozen=True)
class Measure:
    """A distance kind together with its Renyi order when it has one."""

    kind: Kind
    beta: float = None

    def __post_init__(self):
        kind = self.kind if isinstance(self.kind, Kind) else Kind.parse(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is Kind.RENYI:
            object.__setattr__(self, "beta", check_beta(self.beta))
        else:
            object.__setattr__(self, "beta", None)

    @classmethod
    def parse(cls, text, beta=None):
        """``"kl"``, ``"renyi"`` (with ``beta``) or ``"renyi:0.9"``."""
        name, _, arg = str(text).partition(":")
        if arg:
            beta = float(arg)
        return cls(Kind.parse(name), beta)

    @property
    def label(self):
        if self.kind is Kind.RENYI:
            return f"renyi:{self.beta:g}"
        return self.kind.value

    def __str__(self):
        return self.label


# -- shared pieces ------------------------------------------------------------

@dataclass(frozen=True)
class _Prep:
    """A covariance (stack) with its log-determinant and inverse."""

    sigma: np.ndarray
    logdet: np.ndarray
    inv: np.ndarray

    @classmethod
    def of(cls, sigma):
        sigma = np.asarray(sigma, dtype=np.complex128)
        return cls(sigma, hm.logdet(sigma), hm.inverse(sigma))

    def expand(self, axis):
        return _Prep(
            np.expand_dims(self.sigma, axis),
            np.expand_dims(self.logdet, axis),
            np.expand_dims(self.inv, axis),
        )


def _tr(a, b):
    return np.real(hm.trace_product(a, b))


def _psi_sum(n, p):
    return sum(digamma(n - k) for k in range(p))


def _ln_gamma_sum(n, p):
    # sum_{k<p} log Gamma(n - k); the pi factor of Gamma_p always cancels
    return sum(math.lgamma(n - k) for k in range(p))


# -- Kullback-Leibler -----------------------------------------------------------

def _kl_general(a, n1, b, n2):
    p = a.sigma.shape[-1]
    looks_part = 0.5 * (n1 - n2) * (
        a.logdet - b.logdet - p * math.log(n1 / n2) + _psi_sum(n1, p) - _psi_sum(n2, p)
    )
    trace_part = 0.5 * (n2 * _tr(b.inv, a.sigma) + n1 * _tr(a.inv, b.sigma)) - 0.5 * p * (n1 + n2)
    return looks_part + trace_part


def _kl_equal_looks(a, b, n):
    p = a.sigma.shape[-1]
    return n * (0.5 * (_tr(a.inv, b.sigma) + _tr(b.inv, a.sigma)) - p)


def _kl_equal_sigma(n1, n2, p):
    rational = sum(i / ((n1 - i) * (n2 - i)) for i in range(1, p))
    return 0.5 * (n1 - n2) * (
        -p * math.log(n1 / n2)
        + p * (digamma(n1 - p + 1) - digamma(n2 - p + 1))
        + (n2 - n1) * rational
    )


# -- Renyi ----------------------------------------------------------------------

def _log_norm(prep, n):
    # log of the density constant: pn log n - n log|S| - log Gamma_p(n)
    p = prep.sigma.shape[-1]
    return p * n * math.log(n) - n * prep.logdet - ln_multivariate_gamma(n, p)


def _renyi_terms_general(a, n1, b, n2, beta):
    p = a.sigma.shape[-1]
    c1, c2 = _log_norm(a, n1), _log_norm(b, n2)
    e12 = beta * n1 + (1 - beta) * n2
    e21 = beta * n2 + (1 - beta) * n1
    m12 = beta * n1 * a.inv + (1 - beta) * n2 * b.inv
    m21 = beta * n2 * b.inv + (1 - beta) * n1 * a.inv
    t12 = beta * c1 + (1 - beta) * c2 + ln_multivariate_gamma(e12, p) - e12 * hm.logdet(m12)
    t21 = beta * c2 + (1 - beta) * c1 + ln_multivariate_gamma(e21, p) - e21 * hm.logdet(m21)
    return t12, t21


def _renyi_terms_equal_looks(a, b, n, beta):
    m12 = beta * a.inv + (1 - beta) * b.inv
    m21 = beta * b.inv + (1 - beta) * a.inv
    t12 = n * (-hm.logdet(m12) - beta * a.logdet - (1 - beta) * b.logdet)
    t21 = n * (-hm.logdet(m21) - (1 - beta) * a.logdet - beta * b.logdet)
    return t12, t21


def _looks_factor(n, p):
    # log[Gamma(n - p + 1)^p n^(-pn) prod_{i=1}^{p-1} (n - i)^i]
    return (
        p * math.lgamma(n - p + 1)
        - p * n * math.log(n)
        + sum(i * math.log(n - i) for i in range(1, p))
    )


def _renyi_terms_equal_sigma(n1, n2, p, beta):
    g1, g2 = _looks_factor(n1, p), _looks_factor(n2, p)
    e12 = beta * n1 + (1 - beta) * n2
    e21 = beta * n2 + (1 - beta) * n1
    t12 = -beta * g1 - (1 - beta) * g2 + _looks_factor(e12, p)
    t21 = -(1 - beta) * g1 - beta * g2 + _looks_factor(e21, p)
    return t12, t21


def _renyi_from_terms(t12, t21, beta):
    return (np.logaddexp(t12, t21) - LOG2) / (beta - 1.0)


# -- Bhattacharyya ------------------------------------------------------------

def _gamma_ratio(n1, n2, p):
    # sum_k log[sqrt(Gamma(n1 - k) Gamma(n2 - k)) / Gamma((n1 + n2)/2 - k)]
    nbar = 0.5 * (n1 + n2)
    return 0.5 * (_ln_gamma_sum(n1, p) + _ln_gamma_sum(n2, p)) - _ln_gamma_sum(nbar, p)


def _bhattacharyya_general(a, n1, b, n2):
    p = a.sigma.shape[-1]
    nbar = 0.5 * (n1 + n2)
    mean_precision = 0.5 * (n1 * a.inv + n2 * b.inv)
    return (
        0.5 * n1 * a.logdet
        + 0.5 * n2 * b.logdet
        + nbar * hm.logdet(mean_precision)
        + _gamma_ratio(n1, n2, p)
        - 0.5 * p * (n1 * math.log(n1) + n2 * math.log(n2))
    )


def _bhattacharyya_equal_looks(a, b, n):
    return n * (0.5 * (a.logdet + b.logdet) + hm.logdet(0.5 * (a.inv + b.inv)))


def _bhattacharyya_equal_sigma(n1, n2, p):
    nbar = 0.5 * (n1 + n2)
    return (
        p * nbar * math.log(nbar)
        + _gamma_ratio(n1, n2, p)
        - 0.5 * p * (n1 * math.log(n1) + n2 * math.log(n2))
    )


# -- case handling ------------------------------------------------------------

def _check_pair(t1, t2):
    if t1.p != t2.p:
        raise DimensionMismatch(f"dimension {t1.p} != {t2.p}")


def resolve_case(t1, t2, case=Case.AUTO):
    """Case actually used for the pair; explicit special cases are checked.

    ``AUTO`` picks equal looks when ``|n1 - n2| <= 1e-12``, else equal
    covariance when ``||S1 - S2||_F <= 1e-12 ||S1||_F``, else the general form.
    """
    _check_pair(t1, t2)
    case = case if isinstance(case, Case) else Case.parse(case)
    same_n = abs(t1.n - t2.n)
    same_sigma = np.linalg.norm(t1.sigma - t2.sigma) / np.linalg.norm(t1.sigma)
    if case is Case.AUTO:
        if same_n <= AUTO_TOL:
            return Case.EQUAL_LOOKS
        if same_sigma <= AUTO_TOL:
            return Case.EQUAL_SIGMA
        return Case.GENERAL
    if case is Case.EQUAL_LOOKS and same_n > FORCED_CASE_RTOL * max(t1.n, t2.n):
        raise DomainError(f"equal-looks case requested but n1={t1.n} and n2={t2.n}")
    if case is Case.EQUAL_SIGMA and same_sigma > FORCED_CASE_RTOL:
        raise DomainError("equal-sigma case requested but the covariances differ")
    return case


def _nonneg(x):
    return max(float(x), 0.0)


def kl_distance(t1, t2, case=Case.AUTO):
    """Symmetrized Kullback-Leibler distance."""
    case = resolve_case(t1, t2, case)
    if case is Case.EQUAL_SIGMA:
        return _nonneg(_kl_equal_sigma(t1.n, t2.n, t1.p))
    a, b = _Prep.of(t1.sigma), _Prep.of(t2.sigma)
    if case is Case.EQUAL_LOOKS:
        return _nonneg(_kl_equal_looks(a, b, t1.n))
    return _nonneg(_kl_general(a, t1.n, b, t2.n))


def renyi_terms(t1, t2, beta, case=Case.AUTO):
    """``(log int f1^b f2^(1-b), log int f1^(1-b) f2^b)``."""
    beta = check_beta(beta)
    case = resolve_case(t1, t2, case)
    if case is Case.EQUAL_SIGMA:
        t12, t21 = _renyi_terms_equal_sigma(t1.n, t2.n, t1.p, beta)
    else:
        a, b = _Prep.of(t1.sigma), _Prep.of(t2.sigma)
        if case is Case.EQUAL_LOOKS:
            t12, t21 = _renyi_terms_equal_looks(a, b, t1.n, beta)
        else:
            t12, t21 = _renyi_terms_general(a, t1.n, b, t2.n, beta)
    return float(t12), float(t21)


def renyi_distance(t1, t2, beta, case=Case.AUTO):
    """Renyi distance of order beta: log of the averaged integrals over (beta - 1)."""
    t12, t21 = renyi_terms(t1, t2, beta, case)
    return _nonneg(_renyi_from_terms(t12, t21, beta))


def renyi_symmetrized(t1, t2, beta, case=Case.AUTO):
    """Average of the two one-sided Renyi divergences; never below :func:`renyi_distance`."""
    t12, t21 = renyi_terms(t1, t2, beta, case)
    return _nonneg((t12 + t21) / (2.0 * (beta - 1.0)))


def bhattacharyya_distance(t1, t2, case=Case.AUTO):
    case = resolve_case(t1, t2, case)
    if case is Case.EQUAL_SIGMA:
        return _nonneg(_bhattacharyya_equal_sigma(t1.n, t2.n, t1.p))
    a, b = _Prep.of(t1.sigma), _Prep.of(t2.sigma)
    if case is Case.EQUAL_LOOKS:
        return _nonneg(_bhattacharyya_equal_looks(a, b, t1.n))
    return _nonneg(_bhattacharyya_general(a, t1.n, b, t2.n))


def hellinger_distance(t1, t2, case=Case.AUTO):
    """``1 - int sqrt(f1 f2)``, evaluated as ``-expm1(-d_B)``."""
    return _nonneg(-math.expm1(-bhattacharyya_distance(t1, t2, case)))


def bartlett_distance(s1, s2):
    """``log(|S1 + S2|^2 / (|S1||S2|)) - 2p log 2``."""
    hm.check_same_dim(s1, s2)
    p = np.shape(s1)[-1]
    value = 2.0 * hm.logdet(np.asarray(s1) + np.asarray(s2)) - hm.logdet(s1) - hm.logdet(s2) - 2 * p * LOG2
    return _nonneg(value)


def revised_wishart_distance(s1, s2):
    """``tr(S1 S2^-1 + S2 S1^-1) / 2 - p``."""
    hm.check_same_dim(s1, s2)
    p = np.shape(s1)[-1]
    value = 0.5 * (_tr(s1, hm.inverse(s2)) + _tr(s2, hm.inverse(s1))) - p
    return _nonneg(value)


def distance(measure, t1, t2, case=Case.AUTO):
    """Dispatch on a :class:`Measure` (or anything :meth:`Measure.parse` accepts)."""
    if not isinstance(measure, Measure):
        measure = Measure.parse(measure)
    kind = measure.kind
    if kind is Kind.KL:
        return kl_distance(t1, t2, case)
    if kind is Kind.RENYI:
        return renyi_distance(t1, t2, measure.beta, case)
    if kind is Kind.BHATTACHARYYA:
        return bhattacharyya_distance(t1, t2, case)
    if kind is Kind.HELLINGER:
        return hellinger_distance(t1, t2, case)
    _check_pair(t1, t2)
    if kind is Kind.BARTLETT:
        return bartlett_distance(t1.sigma, t2.sigma)
    return revised_wishart_distance(t1.sigma, t2.sigma)


def equal_looks_matrix(measure, z, centroids, n):
    """Distances between every matrix of ``z`` (N, p, p) and every centroid (k, p, p).

    Both sides share ``n`` looks.  Returns an ``(N, k)`` array.  ``z`` may
    also be a :class:`_Prep` so repeated calls reuse its inverses.
    """
    if not isinstance(measure, Measure):
        measure = Measure.parse(measure)
    a = z if isinstance(z, _Prep) else _Prep.of(z)
    b = _Prep.of(centroids)
    hm.check_same_dim(a.sigma, b.sigma)
    a, b = a.expand(1), b.expand(0)
    p = a.sigma.shape[-1]
    kind = measure.kind
    if kind is Kind.KL:
        d = _kl_equal_looks(a, b, n)
    elif kind is Kind.RENYI:
        d = _renyi_from_terms(*_renyi_terms_equal_looks(a, b, n, measure.beta), measure.beta)
    elif kind in (Kind.BHATTACHARYYA, Kind.HELLINGER):
        d = _bhattacharyya_equal_looks(a, b, n)
        if kind is Kind.HELLINGER:
            d = -np.expm1(-np.maximum(d, 0.0))
    elif kind is Kind.BARTLETT:
        d = 2.0 * hm.logdet(a.sigma + b.sigma) - a.logdet - b.logdet - 2 * p * LOG2
    else:
        d = 0.5 * (_tr(a.sigma, b.inv) + _tr(b.sigma, a.inv)) - p
    return np.maximum(d, 0.0)


def prepare(z):
    """Precompute log-determinants and inverses of a stack for :func:`equal_looks_matrix`."""
    return _Prep.of(z)


# -- inequalities -----------------------------------------------------------

@dataclass(frozen=True)
class InequalityCheck:
    name: str
    lhs: float
    rhs: float
    holds: bool
    tight: bool


@dataclass(frozen=True)
class InequalityReport:
    """The four covariance inequalities implied by non-negativity of the distances."""

    trace: InequalityCheck
    renyi: InequalityCheck
    log_det: InequalityCheck
    det: InequalityCheck

    @property
    def checks(self):
        return (self.trace, self.renyi, self.log_det, self.det)

    @property
    def all_hold(self):
        return all(c.holds for c in self.checks)


def _check(name, lhs, rhs, greater, rtol):
    lhs, rhs = float(lhs), float(rhs)
    slack = rtol * max(1.0, abs(lhs), abs(rhs))
    holds = lhs >= rhs - slack if greater else lhs <= rhs + slack
    return InequalityCheck(name, lhs, rhs, bool(holds), abs(lhs - rhs) <= slack)


def inequality_suite(s1, s2, n, beta, rtol=1e-10):
    """Evaluate both sides of each inequality and whether it holds.

    * trace: ``tr(S2^-1 S1 + S1^-1 S2) >= 2p``.
    * renyi: the two equal-looks Renyi integrals sum to at most 2; both sides
      are reported as logarithms (``log 2`` on the right).
    * log_det: ``(log|S1| + log|S2|)/2 >= log|((S1^-1 + S2^-1)/2)^-1|``.
    * det: ``sqrt(|S1||S2|) >= |((S1^-1 + S2^-1)/2)^-1|`` from raw determinants.

    ``tight`` flags equality within ``rtol``, which happens when S1 == S2.
    """
    hm.check_same_dim(s1, s2)
    beta = check_beta(beta)
    s1 = np.asarray(s1, dtype=np.complex128)
    s2 = np.asarray(s2, dtype=np.complex128)
    p = s1.shape[-1]
    a, b = _Prep.of(s1), _Prep.of(s2)
    l1, l2 = float(a.logdet), float(b.logdet)

    trace = _check("trace", _tr(b.inv, s1) + _tr(a.inv, s2), 2 * p, True, rtol)

    log_m1 = -float(hm.logdet(beta * a.inv + (1 - beta) * b.inv))
    log_m2 = -float(hm.logdet(beta * b.inv + (1 - beta) * a.inv))
    term1 = n * beta * (l2 - l1) - n * l2 + n * log_m1
    term2 = n * beta * (l1 - l2) - n * l1 + n * log_m2
    renyi = _check("renyi", np.logaddexp(term1, term2), LOG2, False, rtol)

    harmonic = -float(hm.logdet(0.5 * (a.inv + b.inv)))
    log_det = _check("log_det", 0.5 * (l1 + l2), harmonic, True, rtol)

    det1 = float(np.real(np.linalg.det(s1)))
    det2 = float(np.real(np.linalg.det(s2)))
    det_h = float(np.real(np.linalg.det(np.linalg.inv(0.5 * (a.inv + b.inv)))))
    lhs = math.sqrt(det1 * det2)
    det = _check("det", lhs / det_h, 1.0, True, rtol)
    det = InequalityCheck("det", lhs, det_h, det.holds, det.tight)
    return InequalityReport(trace, renyi, log_det, det)
