"""Tests for architecture, hyperparameters, state initialization and inference."""

import numpy as np
import pytest
from pydantic import ValidationError

from dladmm.admm.energy import lagrangian_value, phi_value
from dladmm.admm.model import (
    Activation,
    Architecture,
    Hyperparams,
    RhoSchedule,
    RiskSpec,
    accuracy,
    forward_inference,
    init_state,
)
from dladmm.data.dataset import Dataset
from dladmm.errors import NumericFailureError, ShapeError


class TestArchitecture:
    """Validation and activation helpers."""

    def test_rejects_too_few_layers(self) -> None:
        """Two widths describe a single layer, which is not enough."""
        with pytest.raises(ValidationError):
            Architecture(layer_dims=(784, 10))

    def test_rejects_zero_width(self) -> None:
        """Every width must be positive."""
        with pytest.raises(ValidationError):
            Architecture(layer_dims=(4, 0, 2))

    def test_leaky_slope_range(self) -> None:
        """The leaky slope lives strictly inside (0, 1)."""
        with pytest.raises(ValidationError):
            Architecture(layer_dims=(4, 3, 2), activation=Activation.LEAKY_RELU, leaky_slope=1.5)

    def test_relu_and_leaky_activation(self) -> None:
        """ReLU clips negatives; leaky ReLU scales them."""
        z = np.array([[-2.0, 0.0, 3.0]])
        relu = Architecture(layer_dims=(1, 1, 1))
        leaky = Architecture(layer_dims=(1, 1, 1), activation="leaky_relu", leaky_slope=0.1)
        np.testing.assert_array_equal(relu.activate(z), [[0.0, 0.0, 3.0]])
        np.testing.assert_allclose(leaky.activate(z), [[-0.2, 0.0, 3.0]])
        assert relu.slope == 0.0
        assert leaky.slope == 0.1
        assert relu.num_layers == 2


class TestRhoSchedule:
    """Penalty schedule arithmetic."""

    def test_geometric_schedule_at_150(self) -> None:
        """x10 every 100 iterations from 1e-6 gives 1e-5 at iteration 150."""
        schedule = RhoSchedule(kind="geometric", factor=10.0, every=100)
        assert schedule.rho_at(1e-6, 1) == pytest.approx(1e-6)
        assert schedule.rho_at(1e-6, 100) == pytest.approx(1e-6)
        assert schedule.rho_at(1e-6, 150) == pytest.approx(1e-5)
        assert schedule.rho_at(1e-6, 201) == pytest.approx(1e-4)

    def test_fixed_schedule(self) -> None:
        """A fixed schedule never changes rho."""
        assert RhoSchedule().rho_at(0.5, 1000) == 0.5

    def test_rho_max_caps_growth(self) -> None:
        """rho_max bounds the geometric growth."""
        schedule = RhoSchedule(kind="geometric", factor=10.0, every=1, rho_max=1.0)
        assert schedule.rho_at(1e-2, 10) == 1.0


class TestHyperparams:
    """Defaults and derived values."""

    def test_defaults(self) -> None:
        """Defaults match the reference experiment settings."""
        hyper = Hyperparams()
        assert hyper.nu == 1e-6
        assert hyper.rho0 == 1e-6
        assert hyper.max_iters == 200
        assert hyper.initial_step() == hyper.nu

    def test_explicit_t0(self) -> None:
        """An explicit t0 overrides the first backtracking coefficient."""
        assert Hyperparams(t0=0.25).initial_step() == 0.25

    def test_fista_tolerance_scales_with_size(self) -> None:
        """The default tolerance is 1e-8 * sqrt(K * N)."""
        assert Hyperparams().fista_tolerance(10, 10) == pytest.approx(1e-7)
        assert Hyperparams(fista_tol=1e-3).fista_tolerance(10, 10) == 1e-3

    def test_growth_factor_must_exceed_one(self) -> None:
        """Backtracking needs a growth factor above one."""
        with pytest.raises(ValidationError):
            Hyperparams(eta=1.0)


class TestInitState:
    """Seeded initialization."""

    def test_penalties_vanish(self, toy_data: Dataset) -> None:
        """A forward-consistent start has zero phi and a zero residual."""
        arch = Architecture(layer_dims=(6, 5, 4, 3))
        state = init_state(arch, toy_data, Hyperparams(nu=1.0, rho0=1.0))
        assert phi_value(state, 1.0, 1.0) == pytest.approx(0.0, abs=1e-20)
        assert np.all(state.u == 0.0)
        assert [w.shape for w in state.W] == [(5, 6), (4, 5), (3, 4)]
        assert [a.shape for a in state.a] == [(5, 24), (4, 24)]
        assert lagrangian_value(state, RiskSpec(), Hyperparams()).phi == pytest.approx(0.0, abs=1e-20)

    def test_same_seed_same_weights(self, toy_data: Dataset) -> None:
        """The seed fully determines the initial weights."""
        arch = Architecture(layer_dims=(6, 5, 3))
        first = init_state(arch, toy_data, Hyperparams(seed=3))
        second = init_state(arch, toy_data, Hyperparams(seed=3))
        other = init_state(arch, toy_data, Hyperparams(seed=4))
        np.testing.assert_array_equal(first.W[0], second.W[0])
        assert not np.array_equal(first.W[0], other.W[0])

    def test_shape_mismatch(self, toy_data: Dataset) -> None:
        """Data that does not fit the architecture is rejected."""
        with pytest.raises(ShapeError):
            init_state(Architecture(layer_dims=(7, 5, 3)), toy_data, Hyperparams())
        with pytest.raises(ShapeError):
            init_state(Architecture(layer_dims=(6, 5, 4)), toy_data, Hyperparams())

    def test_copy_is_independent(self, toy_data: Dataset) -> None:
        """Mutating a copy leaves the original alone."""
        state = init_state(Architecture(layer_dims=(6, 5, 3)), toy_data, Hyperparams())
        clone = state.copy()
        clone.W[0][0, 0] += 1.0
        clone.u[0, 0] = 5.0
        assert state.W[0][0, 0] != clone.W[0][0, 0]
        assert state.u[0, 0] == 0.0

    def test_check_finite_names_block(self, toy_data: Dataset) -> None:
        """A NaN anywhere is reported with its block and layer."""
        state = init_state(Architecture(layer_dims=(6, 5, 3)), toy_data, Hyperparams())
        state.z[1][0, 0] = np.nan
        with pytest.raises(NumericFailureError) as excinfo:
            state.check_finite()
        assert excinfo.value.block == "z"
        assert excinfo.value.layer == 2


class TestInference:
    """Forward pass and accuracy."""

    def test_zero_network_predicts_class_zero(self) -> None:
        """All-zero weights tie every class, and ties go to the lowest index."""
        arch = Architecture(layer_dims=(4, 3, 10))
        W = [np.zeros((3, 4)), np.zeros((10, 3))]
        b = [np.zeros(3), np.zeros(10)]
        x = np.random.default_rng(0).uniform(size=(4, 50))
        assert np.all(forward_inference(W, b, arch, x) == 0)

        labels = np.arange(50) % 10
        y = np.zeros((10, 50))
        y[labels, np.arange(50)] = 1.0
        assert accuracy(W, b, arch, x, y) == pytest.approx(0.1)

    def test_inference_uses_raw_weights(self) -> None:
        """A hand-built network routes each input to its argmax class."""
        arch = Architecture(layer_dims=(2, 2, 2))
        W = [np.eye(2), np.eye(2)]
        b = [np.zeros(2), np.zeros(2)]
        x = np.array([[1.0, 0.0], [0.0, 1.0]])
        np.testing.assert_array_equal(forward_inference(W, b, arch, x), [0, 1])

    def test_wrong_layer_count(self) -> None:
        """A weight list of the wrong length is a shape error."""
        arch = Architecture(layer_dims=(2, 2, 2))
        with pytest.raises(ShapeError):
            forward_inference([np.eye(2)], [np.zeros(2)], arch, np.ones((2, 1)))

    def test_accuracy_on_dataset(self) -> None:
        """Accuracy compares predictions with one-hot labels column by column."""
        arch = Architecture(layer_dims=(2, 2, 2))
        data = Dataset(x=np.array([[1.0, 0.0], [0.0, 1.0]]), y=np.array([[1.0, 1.0], [0.0, 0.0]]))
        assert accuracy([np.eye(2), np.eye(2)], [np.zeros(2), np.zeros(2)], arch, data.x, data.y) == 0.5
