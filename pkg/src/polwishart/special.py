"""Scalar special functions, all evaluated in the log domain where it matters."""

import math

from .errors import DomainError

EULER_GAMMA = 0.57721566490153286061

# B_2k / (2k) for k = 1..7
_DIGAMMA_TAIL = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
)
_DIGAMMA_SHIFT = 6.0

_ITMAX = 10_000
_EPS = 1e-16
_TINY = 1e-300


def ln_gamma(x):
    if not x > 0:
        raise DomainError(f"ln_gamma needs x > 0, got {x}")
    return math.lgamma(x)


def digamma(x):
    """psi(x) = d/dx log Gamma(x) for real x > 0.

    Shifts x upward with psi(x) = psi(x + 1) - 1/x until x >= 6, then sums the
    asymptotic series to order x**-14.
    """
    if not x > 0:
        raise DomainError(f"digamma needs x > 0, got {x}")
    x = float(x)
    acc = 0.0
    while x < _DIGAMMA_SHIFT:
        acc -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    tail = 0.0
    for c in reversed(_DIGAMMA_TAIL):
        tail = (tail + c) * inv2
    return acc + math.log(x) - 0.5 / x - tail


def ln_multivariate_gamma(L, p):
    """log Gamma_p(L) = p(p-1)/2 log(pi) + sum_{i<p} log Gamma(L - i)."""
    if p < 1 or int(p) != p:
        raise DomainError(f"dimension must be a positive integer, got {p}")
    if not L > p - 1:
        raise DomainError(f"multivariate gamma needs L > p - 1 = {p - 1}, got {L}")
    return 0.5 * p * (p - 1) * math.log(math.pi) + sum(math.lgamma(L - i) for i in range(p))


def _lower_series(a, x):
    # P(a, x) by its power series; converges fast for x < a + 1.
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(_ITMAX):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _upper_fraction(a, x):
    # Q(a, x) by the modified Lentz evaluation of its continued fraction.
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _ITMAX):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return math.exp(-x + a * math.log(x) - math.lgamma(a)) * h


def gamma_q(a, x):
    """Regularized upper incomplete gamma Q(a, x)."""
    if not a > 0:
        raise DomainError(f"gamma_q needs a > 0, got {a}")
    if x < 0:
        raise DomainError(f"gamma_q needs x >= 0, got {x}")
    if x == 0:
        return 1.0
    if x < a + 1.0:
        return 1.0 - _lower_series(a, x)
    return _upper_fraction(a, x)


def chi2_sf(x, k):
    """Pr(chi2_k > x)."""
    if x < 0:
        raise DomainError(f"chi2_sf needs x >= 0, got {x}")
    if not k > 0:
        raise DomainError(f"degrees of freedom must be positive, got {k}")
    return min(1.0, max(0.0, gamma_q(0.5 * k, 0.5 * x)))
