"""Monte Carlo studies: empirical size and power of the distance tests,
sensitivity curves, and the block-splitting procedure for observed samples.

Replica ``r`` of cell ``c`` draws from ``seeded_rng(seed, tag, c, r)``, so
every cell is reproducible on its own and the results do not depend on the
number of worker processes.
"""

from concurrent.futures import ProcessPoolExecutor
import csv
from dataclasses import dataclass, field, fields
import math

import numpy as np

from . import hermitian as hm
from .distances import Kind, Measure, distance
from .errors import DomainError, InsufficientSample, NotPositiveDefinite
from .hypothesis import DfMode, normalizer, test_from_params, test_statistic
from .sampler import sample_wishart_relaxed, seeded_rng
from .scenes import forest_covariance
from .special import chi2_sf
from .wishart import SampleSet, WishartParams, fit

POWER_SIZES = (9, 16, 25, 36, 49, 64, 81, 100, 121, 144)
DEFAULT_MEASURES = ("kl", "renyi:0.9", "bhattacharyya", "hellinger")

_SIZE_TAG = 0
_POWER_TAG = 1


def _measures(items):
    out = []
    for m in items:
        if isinstance(m, Measure):
            out.append(m)
        elif isinstance(m, dict):
            out.append(Measure(Kind.parse(m["kind"]), m.get("beta")))
        else:
            out.append(Measure.parse(m))
    return tuple(out)


@dataclass
class ExperimentConfig:
    sigma: np.ndarray = field(default_factory=forest_covariance)
    n_values: tuple = (8.0,)
    sample_sizes: tuple = ((400, 400),)
    replicas: int = 1000
    nominal_levels: tuple = (0.01, 0.05)
    measures: tuple = DEFAULT_MEASURES
    seed: int = 0
    scale_factor: float = 1.2
    power_sizes: tuple = POWER_SIZES
    df_mode: DfMode = DfMode.FULL

    def __post_init__(self):
        self.sigma = hm.validate(self.sigma)
        self.n_values = tuple(float(n) for n in self.n_values)
        self.sample_sizes = tuple((int(a), int(b)) for a, b in self.sample_sizes)
        self.nominal_levels = tuple(float(a) for a in self.nominal_levels)
        self.measures = _measures(self.measures)
        self.power_sizes = tuple(int(n) for n in self.power_sizes)
        self.df_mode = DfMode.parse(self.df_mode)
        p = self.sigma.shape[-1]
        if self.replicas < 1:
            raise DomainError(f"need at least one replica, got {self.replicas}")
        if any(not 0 < a < 1 for a in self.nominal_levels):
            raise DomainError(f"levels must lie in (0, 1), got {self.nominal_levels}")
        if not self.scale_factor > 0:
            raise DomainError(f"scale factor must be positive, got {self.scale_factor}")
        if any(n <= p - 1 for n in self.n_values):
            raise DomainError(f"every n must exceed p - 1 = {p - 1}")
        if any(min(s) < 1 for s in self.sample_sizes) or any(s < 1 for s in self.power_sizes):
            raise DomainError("sample sizes must be positive")
        for m in self.measures:
            normalizer(m)

    @classmethod
    def from_document(cls, doc, **defaults):
        """Build from a JSON mapping; ``sigma`` is a matrix document."""
        kw = dict(defaults)
        kw.update(doc)
        if "sigma" in kw and isinstance(kw["sigma"], dict):
            kw["sigma"] = hm.from_document(kw["sigma"])
        known = {f.name for f in fields(cls)}
        unknown = set(kw) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**kw)

    def to_document(self):
        return {
            "sigma": hm.to_document(self.sigma),
            "n_values": list(self.n_values),
            "sample_sizes": [list(s) for s in self.sample_sizes],
            "replicas": self.replicas,
            "nominal_levels": list(self.nominal_levels),
            "measures": [m.label for m in self.measures],
            "seed": self.seed,
            "scale_factor": self.scale_factor,
            "power_sizes": list(self.power_sizes),
            "df_mode": self.df_mode.value,
        }


def power_config(**kw):
    """Defaults of the power study: n = 4, 5% level, 1.2 scaling."""
    base = {"n_values": (4.0,), "nominal_levels": (0.05,)}
    base.update(kw)
    return ExperimentConfig(**base)


@dataclass(frozen=True)
class SizeRow:
    measure: str
    n: float
    N1: int
    N2: int
    level: float
    size: float
    mean_S: float
    cv_S: float


@dataclass(frozen=True)
class PowerRow:
    measure: str
    n: float
    N: int
    level: float
    power: float


@dataclass(frozen=True)
class SensitivityRow:
    value: float
    measure: str
    statistic: float
    error: str = ""


def write_csv(rows, path_or_file, row_type=None):
    """Write dataclass rows as CSV with a header in field order."""
    row_type = row_type or type(rows[0])
    names = [f.name for f in fields(row_type)]

    def emit(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(names)
        for r in rows:
            w.writerow([getattr(r, k) for k in names])

    if hasattr(path_or_file, "write"):
        emit(path_or_file)
    else:
        with open(path_or_file, "w", newline="", encoding="utf-8") as fh:
            emit(fh)


# -- replica kernels (module level so worker processes can pickle them) -----

def _pair_statistics(task):
    sigma1, sigma2, n, N1, N2, measures, df_mode, key = task
    rng = seeded_rng(*key)
    z1 = sample_wishart_relaxed(WishartParams(sigma1, n), rng, size=N1)
    z2 = sample_wishart_relaxed(WishartParams(sigma2, n), rng, size=N2)
    t1 = fit(SampleSet(z1, validated=True))
    t2 = fit(SampleSet(z2, validated=True))
    return [test_from_params(t1, t2, N1, N2, m, 0.5, df_mode).statistic for m in measures]


def _run(tasks, workers):
    if workers is None or workers <= 1 or len(tasks) < 2:
        return [_pair_statistics(t) for t in tasks]
    chunk = max(1, len(tasks) // (8 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_pair_statistics, tasks, chunksize=chunk))


def _summarize(stats):
    mean = float(np.mean(stats))
    sd = float(np.std(stats, ddof=1)) if len(stats) > 1 else 0.0
    return mean, (100.0 * sd / mean if mean > 0 else math.nan)


def replica_statistics(cfg, sigma2, n, N1, N2, tag, cell, workers=1):
    """``(T, len(measures))`` array of statistics for one experiment cell."""
    tasks = [
        (cfg.sigma, sigma2, n, N1, N2, cfg.measures, cfg.df_mode, (cfg.seed, tag, cell, r))
        for r in range(cfg.replicas)
    ]
    return np.array(_run(tasks, workers), dtype=float)


def _reject_fraction(stats, df, level):
    return float(np.mean([chi2_sf(s, df) <= level for s in stats]))


def empirical_size(cfg, workers=1):
    """Rejection rates when both samples come from W_R(Sigma, n)."""
    df = cfg.df_mode.df(cfg.sigma.shape[-1])
    rows = []
    cell = 0
    for n in cfg.n_values:
        for N1, N2 in cfg.sample_sizes:
            stats = replica_statistics(cfg, cfg.sigma, n, N1, N2, _SIZE_TAG, cell, workers)
            cell += 1
            for j, m in enumerate(cfg.measures):
                mean, cv = _summarize(stats[:, j])
                for level in cfg.nominal_levels:
                    rows.append(SizeRow(m.label, n, N1, N2, level, _reject_fraction(stats[:, j], df, level), mean, cv))
    return rows


def empirical_power(cfg, workers=1):
    """Rejection rates for W_R(Sigma, n) against W_R(scale * Sigma, n), N1 = N2 = N."""
    df = cfg.df_mode.df(cfg.sigma.shape[-1])
    sigma2 = cfg.scale_factor * cfg.sigma
    rows = []
    cell = 0
    for n in cfg.n_values:
        for N in cfg.power_sizes:
            stats = replica_statistics(cfg, sigma2, n, N, N, _POWER_TAG, cell, workers)
            cell += 1
            for j, m in enumerate(cfg.measures):
                for level in cfg.nominal_levels:
                    rows.append(PowerRow(m.label, n, N, level, _reject_fraction(stats[:, j], df, level)))
    return rows


# -- sensitivity ------------------------------------------------------------

@dataclass(frozen=True)
class SigmaEntry:
    """Vary diagonal entry ``index`` of the covariance over ``grid``."""

    grid: tuple
    index: int = 0


@dataclass(frozen=True)
class Looks:
    """Vary the number of looks of the second law over ``grid``."""

    grid: tuple


def sensitivity_curve(fixed, vary, N=100, measures=DEFAULT_MEASURES):
    """Statistics between ``fixed`` and perturbed exact parameters (no sampling).

    Points where the perturbed covariance is not positive definite are
    reported with a NaN statistic and the error message.
    """
    measures = _measures(measures)
    rows = []
    for value in vary.grid:
        try:
            if isinstance(vary, SigmaEntry):
                sigma = fixed.sigma.copy()
                sigma[vary.index, vary.index] = value
                other = WishartParams(sigma, fixed.n)
            else:
                other = WishartParams(fixed.sigma, value)
        except (NotPositiveDefinite, DomainError) as exc:
            rows.extend(SensitivityRow(float(value), m.label, math.nan, str(exc)) for m in measures)
            continue
        for m in measures:
            d = distance(m, fixed, other)
            rows.append(SensitivityRow(float(value), m.label, test_statistic(d, N, N, m.kind, m.beta)))
    return rows


# -- block splitting --------------------------------------------------------

def split_block_indices(N, N1, N2):
    """Index pairs of the block procedure.

    The sample is cut into consecutive disjoint blocks of size N1; for each
    such block, the remaining observations (in order) are cut into disjoint
    blocks of size N2, and every (first block, second block) pair is kept.
    Incomplete trailing blocks are dropped.
    """
    if N1 < 1 or N2 < 1:
        raise DomainError(f"block sizes must be positive, got {N1}, {N2}")
    if N1 + N2 > N:
        raise InsufficientSample(f"need N1 + N2 <= N, got {N1} + {N2} > {N}")
    idx = np.arange(N)
    pairs = []
    for b in range(N // N1):
        first = idx[b * N1:(b + 1) * N1]
        rest = np.concatenate([idx[:b * N1], idx[(b + 1) * N1:]])
        for c in range(len(rest) // N2):
            pairs.append((first, rest[c * N2:(c + 1) * N2]))
    return pairs


def split_blocks(sample, N1, N2):
    return [(sample.subset(a), sample.subset(b)) for a, b in split_block_indices(sample.N, N1, N2)]


def block_sizes(sample, N1, N2, measures=DEFAULT_MEASURES, levels=(0.01, 0.05), df_mode=DfMode.FULL):
    """Empirical sizes over all block pairs of one observed sample."""
    measures = _measures(measures)
    fits = {}

    def fitted(ix):
        key = tuple(ix.tolist())
        if key not in fits:
            fits[key] = fit(sample.subset(ix))
        return fits[key]

    pairs = split_block_indices(sample.N, N1, N2)
    stats = np.empty((len(pairs), len(measures)))
    for i, (ia, ib) in enumerate(pairs):
        ta, tb = fitted(ia), fitted(ib)
        for j, m in enumerate(measures):
            stats[i, j] = test_from_params(ta, tb, N1, N2, m, 0.5, df_mode).statistic
    df = DfMode.parse(df_mode).df(sample.p)
    rows = []
    for j, m in enumerate(measures):
        mean, cv = _summarize(stats[:, j])
        for level in levels:
            rows.append(SizeRow(m.label, math.nan, N1, N2, level, _reject_fraction(stats[:, j], df, level), mean, cv))
    return rows
