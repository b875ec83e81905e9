"""Desk-scale experiments on real MNIST.

Enabled by pointing ``DLADMM_MNIST_DIR`` at a directory holding the four MNIST IDX files
(plain or gzipped) and selecting the ``slow`` marker.
"""

from pathlib import Path

import numpy as np
import pytest

from dladmm.admm.model import Architecture, Hyperparams, RhoSchedule, RiskSpec
from dladmm.admm.trainer import IterationRecord, ck_sequence, train
from dladmm.baselines.base import OptimizerSpec
from dladmm.baselines.runner import train_baseline
from dladmm.cli.bench import run_scaling, time_ratios
from dladmm.config import BenchConfig
from dladmm.data.dataset import Dataset, load_split

pytestmark = pytest.mark.slow

SMALL = Architecture(layer_dims=(784, 100, 100, 10))
DESK = Architecture(layer_dims=(784, 500, 500, 10))


@pytest.fixture(scope="module")
def subset_1k(mnist_dir: Path) -> Dataset:
    return load_split(mnist_dir, "mnist", "train", subsample_n=1000, seed=0)


@pytest.fixture(scope="module")
def subset_10k(mnist_dir: Path) -> Dataset:
    return load_split(mnist_dir, "mnist", "train", subsample_n=10_000, seed=0)


@pytest.fixture(scope="module")
def convergent_run(subset_1k: Dataset) -> list[IterationRecord]:
    _, history = train(SMALL, Hyperparams(nu=1e-6, rho0=1.0, max_iters=50), subset_1k)
    return history


@pytest.fixture(scope="module")
def desk_dladmm(subset_10k: Dataset) -> list[IterationRecord]:
    schedule = RhoSchedule(kind="geometric", factor=10.0, every=100, rho_max=1.0)
    _, history = train(DESK, Hyperparams(nu=1e-6, rho0=1e-6, rho_schedule=schedule, max_iters=100), subset_10k)
    return history


class TestShapes:
    """Real files load to the documented counts."""

    def test_split_sizes(self, mnist_dir: Path) -> None:
        """55,000 training and 10,000 test samples of 784 features."""
        train_set = load_split(mnist_dir, "mnist", "train")
        test_set = load_split(mnist_dir, "mnist", "test")
        assert train_set.x.shape == (784, 55_000)
        assert test_set.x.shape == (784, 10_000)
        assert train_set.y.shape == (10, 55_000)


class TestConvergence:
    """Fixed rho = 1 converges; fixed rho = 1e-6 does not."""

    def test_lagrangian_descends(self, convergent_run: list[IterationRecord]) -> None:
        """L_rho is non-increasing on at least 48 of 50 iterations."""
        assert sum(bool(r.descent_ok) for r in convergent_run) >= 48

    def test_residual_drops_from_peak(self, convergent_run: list[IterationRecord]) -> None:
        """The residual ends at least ten times below its peak."""
        residuals = [r.residual_norm for r in convergent_run if r.residual_norm is not None]
        assert residuals[-1] <= max(residuals) / 10.0

    def test_lemma2_every_iteration(self, convergent_run: list[IterationRecord]) -> None:
        """grad R(z_L) + u stays below 1e-4 after every iteration."""
        assert all(r.lemma2 is not None and r.lemma2 <= 1e-4 for r in convergent_run)

    def test_ck_trend(self, convergent_run: list[IterationRecord]) -> None:
        """c_k never increases and falls by ten times between iterations 5 and 50."""
        ck = ck_sequence(convergent_run)
        assert all(later <= earlier for earlier, later in zip(ck, ck[1:], strict=False))
        assert ck[49] <= ck[4] / 10.0

    def test_small_rho_diverges(self, subset_1k: Dataset) -> None:
        """With rho = 1e-6 the Lagrangian rises at least once, without crashing."""
        _, history = train(SMALL, Hyperparams(nu=1e-6, rho0=1e-6, max_iters=50), subset_1k)
        assert len(history) == 50
        assert any(r.descent_ok is False for r in history)
        assert all(np.isfinite(r.objective_F) for r in history)


class TestAccuracy:
    """Desk-scale accuracy against the Adam baseline."""

    def test_dladmm_accuracy(self, desk_dladmm: list[IterationRecord]) -> None:
        """dlADMM reaches 0.8 train accuracy within 100 iterations."""
        assert desk_dladmm[-1].train_accuracy >= 0.8

    def test_adam_accuracy(self, subset_10k: Dataset, desk_dladmm: list[IterationRecord]) -> None:
        """Adam reaches 0.85 in 50 epochs and is no worse than dlADMM by more than 0.05."""
        _, history = train_baseline(DESK, OptimizerSpec(kind="adam", lr=1e-3, epochs=50), subset_10k)
        assert history[-1].train_accuracy >= 0.85
        assert history[-1].train_accuracy >= desk_dladmm[-1].train_accuracy - 0.05


class TestScaling:
    """Per-iteration time grows roughly quadratically in width and linearly in samples."""

    def test_time_ratios(self, mnist_dir: Path) -> None:
        """Doubling width costs at most 5x; doubling samples at most 2.6x."""
        bench = BenchConfig(hidden_sizes=(100, 200), sample_counts=(1000, 2000), rhos=(1.0,))
        data = load_split(mnist_dir, "mnist", "train", subsample_n=2000, seed=0)
        neurons, samples = run_scaling(bench, Hyperparams(nu=1e-6, rho0=1.0), RiskSpec(), data)
        assert all(ratio <= 5.0 for _, _, ratio in time_ratios(neurons, "hidden"))
        assert all(ratio <= 2.6 for _, _, ratio in time_ratios(samples, "samples"))
