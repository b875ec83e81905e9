"""Network topology, hyperparameters, optimizer state and inference.

Samples are matrix columns throughout: ``x`` is ``n_0 x N``, every ``z_l`` and ``a_l``
is ``n_l x N`` and biases broadcast across columns. Layers are numbered ``1..L`` in
the public API and stored 0-based in the state lists.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING, Literal

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field, field_validator

from dladmm.errors import NumericFailureError, ShapeError

if TYPE_CHECKING:
    from dladmm.data.dataset import Dataset

Matrix = NDArray[np.float64]


class Activation(str, Enum):
    RELU = "relu"
    LEAKY_RELU = "leaky_relu"


class Architecture(BaseModel):
    """Layer widths ``n_0..n_L`` and the hidden activation."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    layer_dims: tuple[int, ...] = Field(min_length=3)
    activation: Activation = Activation.RELU
    leaky_slope: float = Field(default=0.01, gt=0.0, lt=1.0)

    @field_validator("layer_dims")
    @classmethod
    def _positive_widths(cls, dims: tuple[int, ...]) -> tuple[int, ...]:
        if any(n < 1 for n in dims):
            raise ValueError(f"every layer width must be >= 1, got {list(dims)}")
        return dims

    @property
    def num_layers(self) -> int:
        return len(self.layer_dims) - 1

    @property
    def slope(self) -> float:
        """Negative-side slope of the activation (0 for ReLU)."""
        return self.leaky_slope if self.activation is Activation.LEAKY_RELU else 0.0

    def activate(self, z: Matrix) -> Matrix:
        if self.activation is Activation.RELU:
            return np.maximum(z, 0.0)
        return np.where(z > 0.0, z, self.leaky_slope * z)

    def activate_derivative(self, z: Matrix) -> Matrix:
        return np.where(z > 0.0, 1.0, self.slope)


class RegularizerSpec(BaseModel):
    """Weight regularizer: ``none``, ``l1`` (λ‖W‖₁) or ``l2`` (λ‖W‖²)."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["none", "l1", "l2"] = "none"
    lam: float = Field(default=0.0, ge=0.0)


class RhoSchedule(BaseModel):
    """Penalty schedule; ``geometric`` multiplies ρ by ``factor`` every ``every`` iterations."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["fixed", "geometric"] = "fixed"
    factor: float = Field(default=10.0, gt=0.0)
    every: int = Field(default=100, ge=1)
    rho_max: float | None = Field(default=None, gt=0.0)

    def rho_at(self, rho0: float, iteration: int) -> float:
        """ρ used by 1-based ``iteration``."""
        if self.kind == "fixed":
            return rho0
        rho = rho0 * self.factor ** ((iteration - 1) // self.every)
        if self.rho_max is not None:
            rho = min(rho, self.rho_max)
        return float(rho)


class Hyperparams(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    nu: float = Field(default=1e-6, gt=0.0)
    rho0: float = Field(default=1e-6, gt=0.0)
    rho_schedule: RhoSchedule = RhoSchedule()
    eta_bar: float = Field(default=2.0, gt=1.0)
    eta: float = Field(default=2.0, gt=1.0)
    gamma_bar: float = Field(default=2.0, gt=1.0)
    gamma: float = Field(default=2.0, gt=1.0)
    t0: float | None = Field(default=None, gt=0.0)
    regularizer: RegularizerSpec = RegularizerSpec()
    fista_max_iters: int = Field(default=100, ge=1)
    fista_tol: float | None = Field(default=None, gt=0.0)
    max_iters: int = Field(default=200, ge=1)
    seed: int = 0
    max_backtracks: int = Field(default=60, ge=1)
    warm_start_floor: float = Field(default=1e-3, gt=0.0)

    def initial_step(self) -> float:
        """First-iteration backtracking coefficient (ν unless ``t0`` is set)."""
        return self.t0 if self.t0 is not None else self.nu

    def fista_tolerance(self, num_classes: int, num_samples: int) -> float:
        if self.fista_tol is not None:
            return self.fista_tol
        return 1e-8 * float(np.sqrt(num_classes * num_samples))


class RiskSpec(BaseModel):
    """Output risk; summed softmax cross-entropy has a gradient Lipschitz bound of 1."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["softmax_cross_entropy"] = "softmax_cross_entropy"
    lipschitz_H: float = Field(default=1.0, gt=0.0)  # noqa: N815


@dataclass
class NetState:
    """All dlADMM variables plus the bound training input ``x`` (a₀) and labels ``y``."""

    arch: Architecture
    W: list[Matrix]
    b: list[NDArray[np.float64]]
    z: list[Matrix]
    a: list[Matrix]
    u: Matrix
    x: Matrix = field(repr=False)
    y: Matrix = field(repr=False)

    @property
    def num_layers(self) -> int:
        return self.arch.num_layers

    @property
    def num_samples(self) -> int:
        return int(self.x.shape[1])

    def a_in(self, layer: int) -> Matrix:
        """Input ``a_{l-1}`` to ``layer`` (``x`` for the first layer)."""
        return self.x if layer == 1 else self.a[layer - 2]

    def copy(self) -> NetState:
        """Deep copy of the variables; ``x`` and ``y`` are shared."""
        return NetState(
            arch=self.arch,
            W=[w.copy() for w in self.W],
            b=[v.copy() for v in self.b],
            z=[m.copy() for m in self.z],
            a=[m.copy() for m in self.a],
            u=self.u.copy(),
            x=self.x,
            y=self.y,
        )

    def check_finite(self) -> None:
        groups = {"W": self.W, "b": self.b, "z": self.z, "a": self.a, "u": [self.u]}
        for name, arrays in groups.items():
            for index, array in enumerate(arrays, start=1):
                if not np.all(np.isfinite(array)):
                    raise NumericFailureError("non-finite entries in state", block=name, layer=index)


def linear(W: Matrix, a_prev: Matrix, b: NDArray[np.float64]) -> Matrix:
    """``W a + b ⊗ 1``; the one place the affine map is evaluated."""
    return W @ a_prev + b[:, None]


def init_weights(arch: Architecture, rng: np.random.Generator) -> tuple[list[Matrix], list[NDArray[np.float64]]]:
    """``W_l ~ N(0, 1/n_{l-1})`` and ``b_l = 0``."""
    weights: list[Matrix] = []
    biases: list[NDArray[np.float64]] = []
    dims = arch.layer_dims
    for fan_in, fan_out in zip(dims[:-1], dims[1:], strict=True):
        weights.append(rng.normal(0.0, np.sqrt(1.0 / fan_in), size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return weights, biases


def init_state(arch: Architecture, data: Dataset, hyper: Hyperparams) -> NetState:
    """Seeded weights, forward-consistent ``z``/``a`` and ``u = 0``.

    Every ν-penalty term and the output residual are exactly zero afterwards.
    """
    x = np.asarray(data.x, dtype=np.float64)
    y = np.asarray(data.y, dtype=np.float64)
    if x.shape[0] != arch.layer_dims[0]:
        raise ShapeError(f"input has {x.shape[0]} features, architecture expects {arch.layer_dims[0]}")
    if y.shape[0] != arch.layer_dims[-1]:
        raise ShapeError(f"labels have {y.shape[0]} classes, architecture expects {arch.layer_dims[-1]}")
    if x.shape[1] != y.shape[1]:
        raise ShapeError(f"{x.shape[1]} input columns but {y.shape[1]} label columns")

    weights, biases = init_weights(arch, np.random.default_rng(hyper.seed))
    zs: list[Matrix] = []
    activations: list[Matrix] = []
    current = x
    for layer in range(arch.num_layers):
        z = linear(weights[layer], current, biases[layer])
        zs.append(z)
        if layer < arch.num_layers - 1:
            current = arch.activate(z)
            activations.append(current)

    return NetState(
        arch=arch,
        W=weights,
        b=biases,
        z=zs,
        a=activations,
        u=np.zeros_like(zs[-1]),
        x=x,
        y=y,
    )


def forward_inference(W: list[Matrix], b: list[NDArray[np.float64]], arch: Architecture, x: Matrix) -> NDArray[np.int64]:
    """Class index per column: argmax of the last linear output, ties to the lowest index."""
    if len(W) != arch.num_layers or len(b) != arch.num_layers:
        raise ShapeError(f"expected {arch.num_layers} layers, got {len(W)} weights and {len(b)} biases")
    current = np.asarray(x, dtype=np.float64)
    for layer, (weight, bias) in enumerate(zip(W, b, strict=True), start=1):
        if weight.shape[1] != current.shape[0] or weight.shape[0] != bias.shape[0]:
            raise ShapeError(f"layer {layer}: W {weight.shape}, b {bias.shape}, input {current.shape}")
        out = linear(weight, current, bias)
        current = arch.activate(out) if layer < arch.num_layers else out
    return np.argmax(current, axis=0)


def accuracy(W: list[Matrix], b: list[NDArray[np.float64]], arch: Architecture, x: Matrix, y: Matrix) -> float:
    """Fraction of columns whose prediction matches the one-hot label."""
    predictions = forward_inference(W, b, arch, x)
    return float(np.mean(predictions == np.argmax(y, axis=0)))
