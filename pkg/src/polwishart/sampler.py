"""Seeded draws from the complex circular Gaussian and the (relaxed) Wishart law.

Randomness always comes from a ``numpy.random.Generator`` built by
:func:`seeded_rng`, so a ``(seed, stream...)`` key pins the draw sequence
exactly.  Monte Carlo replicas receive distinct stream keys instead of sharing
one generator.
"""

import numpy as np

from . import hermitian as hm
from .errors import DomainError, NotPositiveDefinite


def seeded_rng(seed, *stream):
    """Generator for substream ``stream`` of ``seed``.

    Distinct stream keys give statistically independent generators
    (``SeedSequence`` spawn keys), independent of how work is scheduled.
    """
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(s) for s in stream))
    return np.random.Generator(np.random.PCG64(ss))


def _shape(size):
    if size is None:
        return ()
    return (size,) if isinstance(size, (int, np.integer)) else tuple(size)


def _standard_complex(rng, shape):
    # real and imaginary parts N(0, 1/2): unit total variance
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) * np.sqrt(0.5)


def sample_gaussian_vector(sigma, rng, size=None):
    """Zero-mean circular complex Gaussian vectors with E[y y^H] = sigma."""
    t = hm.cholesky(sigma)
    u = _standard_complex(rng, _shape(size) + (t.shape[-1],))
    return u @ t.T


def sample_wishart_multilook(sigma, looks, rng, size=None):
    """Average of ``looks`` outer products y y^H, i.e. W(sigma, looks)."""
    t = hm.cholesky(sigma)
    p = t.shape[-1]
    if int(looks) != looks or looks < p:
        raise DomainError(f"multilook averaging needs an integer L >= p = {p}, got {looks}")
    looks = int(looks)
    shape = _shape(size)

    def draw(shape):
        y = _standard_complex(rng, shape + (looks, p)) @ t.T
        return hm.hermitize(np.einsum("...li,...lj->...ij", y, np.conj(y)) / looks)

    z = draw(shape)
    bad = ~_is_pd(z)
    if np.any(bad):
        z[bad] = draw((int(np.count_nonzero(bad)),))
        if not np.all(_is_pd(z)):
            raise NotPositiveDefinite("degenerate multilook draw after one re-draw")
    return z


def _is_pd(z):
    z = np.asarray(z)
    try:
        hm.cholesky(z)
        return np.ones(z.shape[:-2], dtype=bool)
    except NotPositiveDefinite:
        pass
    flat = z.reshape((-1,) + z.shape[-2:])
    ok = np.empty(flat.shape[0], dtype=bool)
    for i, m in enumerate(flat):
        try:
            hm.cholesky(m)
            ok[i] = True
        except NotPositiveDefinite:
            ok[i] = False
    return ok.reshape(z.shape[:-2])


def bartlett_factor(n, p, rng, size=None):
    """Lower-triangular T with T T^H ~ complex Wishart(n, I) (unscaled).

    ``|T_ii|^2 ~ Gamma(n - i, 1)``; entries below the diagonal are standard
    complex Gaussians.
    """
    if not n > p - 1:
        raise DomainError(f"Bartlett construction needs n > p - 1 = {p - 1}, got {n}")
    shape = _shape(size)
    t = np.zeros(shape + (p, p), dtype=np.complex128)
    shapes = n - np.arange(p)
    t[..., np.arange(p), np.arange(p)] = np.sqrt(rng.gamma(shapes, 1.0, size=shape + (p,)))
    rows, cols = np.tril_indices(p, -1)
    if rows.size:
        t[..., rows, cols] = _standard_complex(rng, shape + (rows.size,))
    return t


def sample_wishart_relaxed(theta, rng, size=None):
    """Draws from W_R(Sigma, n) for real n > p - 1, with mean Sigma.

    Close to the boundary (n - p + 1 below about 0.3) the last Bartlett
    diagonal square is often smaller than double precision can resolve next
    to the other terms of Z, so some draws are numerically singular even
    though the law is supported on positive-definite matrices.
    """
    a = hm.cholesky(theta.sigma)
    w = a @ bartlett_factor(theta.n, theta.p, rng, size)
    return hm.hermitize(w @ np.conj(np.swapaxes(w, -1, -2)) / theta.n)
