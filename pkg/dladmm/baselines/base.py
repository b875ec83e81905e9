"""Base classes for the first-order comparison optimizers."""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field

Array = NDArray[np.float64]


class OptimizerKind(str, Enum):
    SGD = "sgd"
    ADAGRAD = "adagrad"
    ADADELTA = "adadelta"
    ADAM = "adam"


DEFAULT_LEARNING_RATES: dict[OptimizerKind, float] = {
    OptimizerKind.SGD: 1e-6,
    OptimizerKind.ADAGRAD: 1e-3,
    OptimizerKind.ADADELTA: 0.1,
    OptimizerKind.ADAM: 1e-3,
}

DEFAULT_EPSILONS: dict[OptimizerKind, float] = {
    OptimizerKind.SGD: 1e-8,
    OptimizerKind.ADAGRAD: 1e-8,
    OptimizerKind.ADADELTA: 1e-6,
    OptimizerKind.ADAM: 1e-8,
}


class OptimizerSpec(BaseModel):
    """Optimizer choice and its constants; unset ``lr``/``eps`` take the per-kind default.

    ``lr = 0`` is accepted and freezes the weights.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: OptimizerKind = OptimizerKind.ADAM
    lr: float | None = Field(default=None, ge=0.0)
    eps: float | None = Field(default=None, gt=0.0)
    decay: float = Field(default=0.95, gt=0.0, lt=1.0)
    beta1: float = Field(default=0.9, gt=0.0, lt=1.0)
    beta2: float = Field(default=0.999, gt=0.0, lt=1.0)
    epochs: int = Field(default=200, ge=1)

    @property
    def learning_rate(self) -> float:
        return DEFAULT_LEARNING_RATES[self.kind] if self.lr is None else self.lr

    @property
    def epsilon(self) -> float:
        return DEFAULT_EPSILONS[self.kind] if self.eps is None else self.eps


@dataclass
class OptimizerState:
    """Parameters ``W_1..W_L, b_1..b_L`` as one flat list, the step count and moment buffers.

    Each entry of ``slots`` is aligned with ``params``.
    """

    params: list[Array]
    num_layers: int
    step: int = 0
    slots: dict[str, list[Array]] = field(default_factory=dict)

    @property
    def weights(self) -> list[Array]:
        return self.params[: self.num_layers]

    @property
    def biases(self) -> list[Array]:
        return self.params[self.num_layers :]

    @classmethod
    def from_layers(cls, weights: list[Array], biases: list[Array]) -> OptimizerState:
        if len(weights) != len(biases):
            raise ValueError(f"{len(weights)} weight matrices but {len(biases)} bias vectors")
        return cls(params=[*weights, *biases], num_layers=len(weights))


class BaseOptimizer(ABC):
    """One update rule. ``step`` is functional: it returns a new state and leaves the old one intact."""

    slot_names: tuple[str, ...] = ()

    def __init__(self, spec: OptimizerSpec) -> None:
        self.spec = spec

    def init_state(self, weights: list[Array], biases: list[Array]) -> OptimizerState:
        """Wrap initial parameters with zeroed moment buffers."""
        state = OptimizerState.from_layers([w.copy() for w in weights], [v.copy() for v in biases])
        state.slots = {name: [np.zeros_like(p) for p in state.params] for name in self.slot_names}
        return state

    def step(self, state: OptimizerState, grads: list[Array]) -> OptimizerState:
        """Apply one update for gradients aligned with ``state.params``."""
        if len(grads) != len(state.params):
            raise ValueError(f"expected {len(state.params)} gradients, got {len(grads)}")
        t = state.step + 1
        params: list[Array] = []
        slots: dict[str, list[Array]] = {name: [] for name in self.slot_names}
        for index, (param, grad) in enumerate(zip(state.params, grads, strict=True)):
            current = {name: state.slots[name][index] for name in self.slot_names}
            new_param, new_slots = self._update(param, grad, current, t)
            params.append(new_param)
            for name in self.slot_names:
                slots[name].append(new_slots[name])
        return OptimizerState(params=params, num_layers=state.num_layers, step=t, slots=slots)

    @abstractmethod
    def _update(self, param: Array, grad: Array, slots: dict[str, Array], t: int) -> tuple[Array, dict[str, Array]]:
        """Return the updated parameter and its updated buffers for step ``t`` (1-based)."""
