"""Hermitian positive-definite matrices and the linear algebra kernels on them.

Matrices are plain ``complex128`` numpy arrays.  Every kernel accepts either a
single ``(p, p)`` matrix or a stack ``(..., p, p)`` and works over the
leading axes, which is what the Monte Carlo and clustering code rely on.
"""

import numpy as np

from .errors import DimensionMismatch, NonFiniteEntry, NotHermitian, NotPositiveDefinite

HERMITIAN_RTOL = 1e-9


def _square(a, name="matrix"):
    a = np.asarray(a)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise DimensionMismatch(f"{name} must be square, got shape {a.shape}")
    return a


def hermitize(a):
    """Rebuild ``a`` from its upper triangle; the diagonal is made real."""
    a = np.asarray(a, dtype=np.complex128)
    upper = np.triu(a, 1)
    diag = np.real(np.diagonal(a, axis1=-2, axis2=-1))
    out = upper + np.conj(np.swapaxes(upper, -1, -2))
    idx = np.arange(a.shape[-1])
    out[..., idx, idx] = diag
    return out


def validate(raw, rtol=HERMITIAN_RTOL):
    """Check that ``raw`` is Hermitian positive definite and return a clean copy.

    The upper triangle is taken as authoritative: the lower triangle of the
    result is the conjugate of the upper one and the diagonal is real.

    Raises:
        DimensionMismatch: ``raw`` is not square.
        NonFiniteEntry: NaN or infinite entries.
        NotHermitian: conjugate symmetry violated beyond ``rtol`` (relative to
            the larger of the two mirrored magnitudes).
        NotPositiveDefinite: Cholesky factorization fails.
    """
    a = _square(np.asarray(raw, dtype=np.complex128))
    if not np.all(np.isfinite(a)):
        raise NonFiniteEntry("matrix has NaN or infinite entries")
    mirrored = np.conj(np.swapaxes(a, -1, -2))
    scale = np.maximum(np.abs(a), np.abs(mirrored))
    if np.any(np.abs(a - mirrored) > rtol * scale):
        raise NotHermitian("matrix is not conjugate symmetric")
    out = hermitize(a)
    cholesky(out)
    return out


def cholesky(a):
    """Lower-triangular ``T`` with ``T @ T^H == a`` and a real positive diagonal."""
    a = _square(a)
    try:
        t = np.linalg.cholesky(a)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(str(exc)) from None
    d = np.real(np.diagonal(t, axis1=-2, axis2=-1))
    if not np.all(np.isfinite(d)) or np.any(d <= 0):
        raise NotPositiveDefinite("Cholesky pivot is not strictly positive")
    return t


def logdet(a):
    """Natural log of the determinant, from the Cholesky diagonal."""
    t = cholesky(a)
    d = np.real(np.diagonal(t, axis1=-2, axis2=-1))
    return 2.0 * np.sum(np.log(d), axis=-1)


def inverse(a):
    t = cholesky(a)
    p = t.shape[-1]
    eye = np.broadcast_to(np.eye(p, dtype=np.complex128), t.shape)
    t_inv = np.linalg.solve(t, eye)
    inv = np.conj(np.swapaxes(t_inv, -1, -2)) @ t_inv
    return 0.5 * (inv + np.conj(np.swapaxes(inv, -1, -2)))


def trace_product(a, b):
    """``tr(a @ b)`` without forming the product."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim < 2 or b.ndim < 2 or a.shape[-1] != b.shape[-2] or a.shape[-2] != b.shape[-1]:
        raise DimensionMismatch(f"cannot form tr(AB) for shapes {a.shape} and {b.shape}")
    return np.einsum("...ij,...ji->...", a, b)


def check_same_dim(a, b):
    if np.shape(a)[-1] != np.shape(b)[-1]:
        raise DimensionMismatch(f"dimension {np.shape(a)[-1]} != {np.shape(b)[-1]}")


def relative_frobenius(a, ref):
    """``||a - ref||_F / ||ref||_F`` over the last two axes."""
    num = np.linalg.norm(np.asarray(a) - np.asarray(ref), axis=(-2, -1))
    return num / np.linalg.norm(ref, axis=(-2, -1))


def random_hpd(p, rng, size=()):
    """Random HPD matrix ``G G^H + 1e-6 p I`` with complex Gaussian ``G``."""
    size = (size,) if isinstance(size, int) else tuple(size)
    g = rng.standard_normal(size + (p, p)) + 1j * rng.standard_normal(size + (p, p))
    a = g @ np.conj(np.swapaxes(g, -1, -2)) + 1e-6 * p * np.eye(p)
    return hermitize(a)


def random_unitary(p, rng):
    """Haar-distributed unitary matrix (QR of a Ginibre matrix, phases fixed)."""
    g = (rng.standard_normal((p, p)) + 1j * rng.standard_normal((p, p))) / np.sqrt(2)
    q, r = np.linalg.qr(g)
    phases = np.diagonal(r) / np.abs(np.diagonal(r))
    return q * phases


# -- text document form -----------------------------------------------------

def to_document(a):
    """JSON-ready ``{"p", "re", "im"}`` mapping holding the full matrix."""
    a = np.asarray(a, dtype=np.complex128)
    return {
        "p": int(a.shape[-1]),
        "re": np.real(a).tolist(),
        "im": np.imag(a).tolist(),
    }


def from_document(doc):
    """Parse a matrix document, full or upper-triangle-plus-diagonal.

    In the triangular form row ``i`` holds ``p - i`` numbers, starting at the
    diagonal.
    """
    try:
        p = int(doc["p"])
        re_rows = doc["re"]
        im_rows = doc["im"]
    except (KeyError, TypeError, ValueError) as exc:
        raise DimensionMismatch(f"matrix document needs p, re, im: {exc}") from None
    if p < 1 or len(re_rows) != p or len(im_rows) != p:
        raise DimensionMismatch(f"matrix document must have {p} rows")
    lengths = [len(r) for r in re_rows]
    if lengths != [len(r) for r in im_rows]:
        raise DimensionMismatch("re and im rows differ in length")
    if all(n == p for n in lengths):
        a = np.array(re_rows, dtype=float) + 1j * np.array(im_rows, dtype=float)
    elif lengths == [p - i for i in range(p)]:
        a = np.zeros((p, p), dtype=np.complex128)
        for i in range(p):
            a[i, i:] = np.array(re_rows[i], dtype=float) + 1j * np.array(im_rows[i], dtype=float)
        a = hermitize(a)
    else:
        raise DimensionMismatch(f"row lengths {lengths} fit neither full nor triangular form")
    return validate(a)
