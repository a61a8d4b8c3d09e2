import io
import math

import pytest

from polwishart.errors import DomainError, InsufficientSample, UnsupportedKind
from polwishart.montecarlo import (
    ExperimentConfig, Looks, PowerRow, SigmaEntry, SizeRow, block_sizes, empirical_power, empirical_size,
    power_config, sensitivity_curve, split_block_indices, write_csv,
)
from polwishart.sampler import sample_wishart_relaxed, seeded_rng
from polwishart.scenes import forest_covariance
from polwishart.wishart import SampleSet, WishartParams

FOREST = forest_covariance()


def small(**kw):
    base = dict(replicas=12, sample_sizes=((60, 80),), n_values=(5.0,), seed=3)
    base.update(kw)
    return ExperimentConfig(**base)


class TestConfig:
    @pytest.mark.parametrize("kw", [
        {"replicas": 0}, {"nominal_levels": (1.5,)}, {"n_values": (2.0,)},
        {"scale_factor": 0.0}, {"sample_sizes": ((0, 5),)},
    ])
    def test_rejects(self, kw):
        with pytest.raises(DomainError):
            small(**kw)

    def test_measure_without_normalizer(self):
        with pytest.raises(UnsupportedKind):
            small(measures=("bartlett",))

    def test_document_round_trip(self):
        cfg = small(measures=("kl", "renyi:0.3"))
        again = ExperimentConfig.from_document(cfg.to_document())
        assert again.to_document() == cfg.to_document()

    def test_unknown_keys(self):
        with pytest.raises(ValueError, match="unknown"):
            ExperimentConfig.from_document({"replica": 10})

    def test_power_defaults(self):
        cfg = power_config()
        assert cfg.n_values == (4.0,) and cfg.nominal_levels == (0.05,) and cfg.scale_factor == 1.2
        assert cfg.power_sizes[0] == 9 and cfg.power_sizes[-1] == 144


class TestExperiments:
    def test_size_rows(self):
        rows = empirical_size(small())
        assert len(rows) == 4 * 2
        assert all(isinstance(r, SizeRow) and 0.0 <= r.size <= 1.0 and r.mean_S > 0 for r in rows)

    def test_reproducible_and_parallel_invariant(self):
        a = empirical_size(small())
        b = empirical_size(small())
        c = empirical_size(small(), workers=2)
        assert a == b == c
        assert a != empirical_size(small(seed=4))

    def test_power_rows(self):
        cfg = power_config(replicas=10, power_sizes=(9, 36), seed=1)
        rows = empirical_power(cfg)
        assert len(rows) == 4 * 2 and all(isinstance(r, PowerRow) for r in rows)
        assert empirical_power(cfg, workers=2) == rows

    def test_csv(self):
        rows = [PowerRow("kl", 4.0, 9, 0.05, 0.25)]
        buf = io.StringIO()
        write_csv(rows, buf)
        assert buf.getvalue() == "measure,n,N,level,power\nkl,4.0,9,0.05,0.25\n"


class TestSensitivity:
    def test_looks(self):
        rows = sensitivity_curve(WishartParams(FOREST, 8.0), Looks((4.0, 8.0, 12.0)), N=50)
        at_true = [r.statistic for r in rows if r.value == 8.0]
        assert at_true == [0.0] * 4
        assert all(r.statistic > 0 for r in rows if r.value != 8.0)

    def test_sigma_entry_with_invalid_point(self):
        grid = (1.0, 360932.0, 5e5)
        rows = sensitivity_curve(WishartParams(FOREST, 8.0), SigmaEntry(grid, 0), N=100, measures=("kl",))
        by_value = {r.value: r for r in rows}
        assert math.isnan(by_value[1.0].statistic) and by_value[1.0].error
        assert by_value[360932.0].statistic == pytest.approx(0.0, abs=1e-9)
        assert by_value[5e5].statistic > 0


class TestBlocks:
    def test_indices(self):
        pairs = split_block_indices(20, 5, 4)
        assert len(pairs) == (20 // 5) * (15 // 4)
        for a, b in pairs:
            assert len(a) == 5 and len(b) == 4 and not set(a) & set(b)

    def test_errors(self):
        with pytest.raises(InsufficientSample):
            split_block_indices(10, 6, 6)
        with pytest.raises(DomainError):
            split_block_indices(10, 0, 3)

    def test_block_sizes(self):
        z = sample_wishart_relaxed(WishartParams(FOREST, 6.0), seeded_rng(2), size=400)
        rows = block_sizes(SampleSet(z), 100, 100, measures=("kl", "hellinger"))
        assert len(rows) == 4
        assert all(0.0 <= r.size <= 1.0 for r in rows)
