"""Stochastic distances, hypothesis tests and clustering for relaxed complex Wishart laws."""

from .clustering import CovarianceImage, ClusterState, aligned_accuracy, assign, kmeans, synth_image, update_centroids
from .distances import (
    Case, Kind, Measure, bartlett_distance, bhattacharyya_distance, distance, hellinger_distance,
    inequality_suite, kl_distance, renyi_distance, revised_wishart_distance,
)
from .errors import (
    DimensionMismatch, DomainError, FormatError, InsufficientSample, NoRootInBracket, NonFiniteEntry,
    NotHermitian, NotPositiveDefinite, PolWishartError, UnsupportedKind,
)
from .hypothesis import DfMode, TestResult, test_statistic, two_sample_test
from .montecarlo import ExperimentConfig, empirical_power, empirical_size, sensitivity_curve
from .sampler import sample_gaussian_vector, sample_wishart_multilook, sample_wishart_relaxed, seeded_rng
from .scenes import forest_covariance
from .wishart import SampleSet, WishartParams, estimate_n, estimate_sigma, fit, log_density

__version__ = "0.1.0"
