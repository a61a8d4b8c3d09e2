"""k-means over covariance images with stochastic distances as dissimilarity.

Pixels and centroids are compared as W_R laws sharing the image's number of
looks, so every distance uses its equal-looks closed form.
"""

from dataclasses import dataclass, replace
import math

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import hermitian as hm
from .distances import Kind, Measure, equal_looks_matrix, prepare
from .errors import DimensionMismatch, DomainError, NotPositiveDefinite
from .sampler import sample_wishart_relaxed, seeded_rng
from .scenes import PASTURE, URBAN, forest_covariance
from .wishart import WishartParams

SYNTH_SHAPE = (75, 80)
SYNTH_LOOKS = 12.0
SYNTH_GRID = (2, 5)
SYNTH_BLOCK = (15, 16)


@dataclass(frozen=True, eq=False)
class CovarianceImage:
    """``pixels`` has shape ``(height, width, p, p)``; all pixels share ``looks``."""

    pixels: np.ndarray
    looks: float

    def __post_init__(self):
        px = np.asarray(self.pixels, dtype=np.complex128)
        if px.ndim != 4 or px.shape[-1] != px.shape[-2]:
            raise DimensionMismatch(f"pixels must have shape (H, W, p, p), got {px.shape}")
        try:
            px = hm.validate(px)
        except (NotPositiveDefinite, ValueError):
            _raise_bad_pixel(px)
        object.__setattr__(self, "pixels", px)
        object.__setattr__(self, "looks", float(self.looks))

    @property
    def height(self):
        return self.pixels.shape[0]

    @property
    def width(self):
        return self.pixels.shape[1]

    @property
    def p(self):
        return self.pixels.shape[-1]

    def flat(self):
        return self.pixels.reshape((-1, self.p, self.p))


def _raise_bad_pixel(px):
    for r in range(px.shape[0]):
        for c in range(px.shape[1]):
            try:
                hm.validate(px[r, c])
            except (NotPositiveDefinite, ValueError) as exc:
                raise type(exc)(f"pixel (row {r}, col {c}): {exc}") from None
    raise NotPositiveDefinite("image pixels are not Hermitian positive definite")


@dataclass
class ClusterState:
    k: int
    centroids: np.ndarray
    labels: np.ndarray
    iteration: int
    converged: bool
    empty: np.ndarray
    history: list
    objective: float = math.nan
    restart: int = 0


def _measure(measure, beta):
    return measure if isinstance(measure, Measure) else Measure.parse(measure, beta)


def _ranking_measure(measure):
    # Hellinger is 1 - exp(-d_B): same argmin, but it saturates at 1 for
    # distant centroids, which would turn strict orderings into ties.
    if measure.kind is Kind.HELLINGER:
        return Measure(Kind.BHATTACHARYYA)
    return measure


def assign(img, centroids, measure, beta=None, _prepared=None):
    """Label of the nearest centroid for every pixel; ties go to the lowest index."""
    centroids = np.asarray(centroids, dtype=np.complex128)
    hm.check_same_dim(img.pixels, centroids)
    prepared = _prepared if _prepared is not None else prepare(img.flat())
    measure = _ranking_measure(_measure(measure, beta))
    d = equal_looks_matrix(measure, prepared, centroids, img.looks)
    return np.argmin(d, axis=1).reshape(img.height, img.width)


def objective(img, state_or_centroids, labels=None, measure="bhattacharyya", beta=None, _prepared=None):
    """Sum of pixel-to-assigned-centroid distances."""
    if isinstance(state_or_centroids, ClusterState):
        centroids, labels = state_or_centroids.centroids, state_or_centroids.labels
    else:
        centroids = state_or_centroids
    prepared = _prepared if _prepared is not None else prepare(img.flat())
    d = equal_looks_matrix(_measure(measure, beta), prepared, centroids, img.looks)
    return float(d[np.arange(d.shape[0]), np.asarray(labels).ravel()].sum())


def update_centroids(img, labels, k, previous=None):
    """Per-cluster mean matrices and a flag array for empty clusters.

    An empty cluster keeps its centroid from ``previous``.
    """
    labels = np.asarray(labels)
    if labels.shape != (img.height, img.width):
        raise DimensionMismatch(f"labels shape {labels.shape} != image shape {(img.height, img.width)}")
    flat = img.flat()
    lab = labels.ravel()
    counts = np.bincount(lab, minlength=k)[:k]
    sums = np.zeros((k, img.p, img.p), dtype=np.complex128)
    np.add.at(sums, lab, flat)
    empty = counts == 0
    if np.any(empty) and previous is None:
        raise ValueError(f"clusters {np.flatnonzero(empty).tolist()} are empty and have no previous centroid")
    centroids = np.empty_like(sums)
    centroids[~empty] = sums[~empty] / counts[~empty, None, None]
    if np.any(empty):
        centroids[empty] = np.asarray(previous)[empty]
    return hm.hermitize(centroids), empty


def convergence_measure(labels, previous):
    """Sum over pixels and clusters of indicator changes: twice the changed pixels."""
    labels = np.asarray(labels)
    previous = np.asarray(previous)
    if labels.shape != previous.shape:
        raise DimensionMismatch(f"label maps differ in shape: {labels.shape} vs {previous.shape}")
    return 2 * int(np.count_nonzero(labels != previous))


def initial_centroids(img, k, seed, restart=0):
    """``k`` distinct pixels drawn uniformly with ``seeded_rng(seed, restart)``."""
    rng = seeded_rng(seed, restart)
    idx = rng.choice(img.height * img.width, size=k, replace=False)
    return img.flat()[idx].copy()


def lloyd(img, centroids, measure, max_iter=100, _prepared=None):
    """Alternate assignment and mean updates from ``centroids`` until no label changes."""
    if max_iter < 1:
        raise DomainError(f"max_iter must be at least 1, got {max_iter}")
    measure = _measure(measure, None)
    centroids = hm.validate(centroids)
    k = centroids.shape[0]
    prepared = _prepared if _prepared is not None else prepare(img.flat())
    labels = assign(img, centroids, measure, _prepared=prepared)
    empty = np.zeros(k, dtype=bool)
    history = []
    converged = False
    v = 0
    while v < max_iter:
        v += 1
        centroids, empty = update_centroids(img, labels, k, previous=centroids)
        new = assign(img, centroids, measure, _prepared=prepared)
        h = convergence_measure(new, labels)
        history.append(h)
        labels = new
        if h == 0:
            converged = True
            break
    state = ClusterState(k, centroids, labels, v, converged, empty, history)
    state.objective = objective(img, state, measure=measure, _prepared=prepared)
    return state


def kmeans(img, k, measure, beta=None, seed=0, max_iter=100, init=None, restarts=10):
    """k-means with a stochastic distance as dissimilarity.

    Each restart ``r`` starts from ``k`` uniformly drawn pixels of
    ``seeded_rng(seed, r)`` and runs to convergence (at most ``max_iter``
    iterations); the run with the smallest total distance wins, ties going to
    the earliest restart.  ``init`` replaces the random starts by one given
    set of centroids.
    """
    if k < 1:
        raise DomainError(f"k must be at least 1, got {k}")
    if max_iter < 1:
        raise DomainError(f"max_iter must be at least 1, got {max_iter}")
    if restarts < 1:
        raise DomainError(f"restarts must be at least 1, got {restarts}")
    if k > img.height * img.width:
        raise DomainError(f"k={k} exceeds the number of pixels")
    measure = _measure(measure, beta)
    prepared = prepare(img.flat())
    if init is not None:
        init = hm.validate(init)
        if init.ndim != 3 or init.shape[0] != k:
            raise DimensionMismatch(f"expected {k} initial centroids, got shape {init.shape}")
        return lloyd(img, init, measure, max_iter, prepared)
    best = None
    for r in range(restarts):
        state = lloyd(img, initial_centroids(img, k, seed, r), measure, max_iter, prepared)
        if best is None or state.objective < best.objective:
            best = replace(state, restart=r)
    return best


def aligned_accuracy(labels, truth, k=None):
    """Fraction of pixels correct under the best one-to-one relabelling."""
    labels = np.asarray(labels).ravel()
    truth = np.asarray(truth).ravel()
    if labels.shape != truth.shape:
        raise DimensionMismatch("label maps differ in size")
    k = k or int(max(labels.max(), truth.max()) + 1)
    confusion = np.zeros((k, k), dtype=np.int64)
    np.add.at(confusion, (labels, truth), 1)
    rows, cols = linear_sum_assignment(-confusion)
    return confusion[rows, cols].sum() / labels.size


def synth_regions(shape=SYNTH_SHAPE, grid=SYNTH_GRID, block=SYNTH_BLOCK):
    """Region index map on a rows x cols grid of ``block``-sized cells.

    The last row and column absorb whatever the blocks leave uncovered.
    """
    h, w = shape
    gr, gc = grid
    bh, bw = block
    row_edges = [i * bh for i in range(gr)] + [h]
    col_edges = [j * bw for j in range(gc)] + [w]
    regions = np.empty(shape, dtype=np.int64)
    for i in range(gr):
        for j in range(gc):
            regions[row_edges[i]:row_edges[i + 1], col_edges[j]:col_edges[j + 1]] = i * gc + j
    return regions


def synth_classes():
    """Class covariances, darkest first: pasture, forest, urban."""
    return np.stack([PASTURE, forest_covariance(), URBAN])


def synth_image(seed, looks=SYNTH_LOOKS):
    """Synthetic 75 x 80 scene of ten regions cycling three brightness classes.

    Returns the image and its ground-truth class map.
    """
    regions = synth_regions()
    truth = regions % 3
    classes = synth_classes()
    rng = seeded_rng(seed)
    pixels = np.empty(SYNTH_SHAPE + (3, 3), dtype=np.complex128)
    for r in range(int(regions.max()) + 1):
        mask = regions == r
        theta = WishartParams(classes[r % 3], looks)
        pixels[mask] = sample_wishart_relaxed(theta, rng, size=int(mask.sum()))
    return CovarianceImage(pixels, looks), truth
