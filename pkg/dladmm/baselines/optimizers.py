"""SGD, Adagrad, Adadelta and Adam on full-batch gradients."""

from __future__ import annotations

import numpy as np

from dladmm.baselines.base import Array, BaseOptimizer, OptimizerKind, OptimizerSpec, OptimizerState
from dladmm.errors import ConfigurationError


class Sgd(BaseOptimizer):
    def _update(self, param: Array, grad: Array, slots: dict[str, Array], t: int) -> tuple[Array, dict[str, Array]]:
        return param - self.spec.learning_rate * grad, {}


class Adagrad(BaseOptimizer):
    slot_names = ("sum_sq",)

    def _update(self, param: Array, grad: Array, slots: dict[str, Array], t: int) -> tuple[Array, dict[str, Array]]:
        sum_sq = slots["sum_sq"] + grad * grad
        new_param = param - self.spec.learning_rate * grad / (np.sqrt(sum_sq) + self.spec.epsilon)
        return new_param, {"sum_sq": sum_sq}


class Adadelta(BaseOptimizer):
    """Running averages of squared gradients and squared updates; ``lr`` scales the update."""

    slot_names = ("avg_sq_grad", "avg_sq_update")

    def _update(self, param: Array, grad: Array, slots: dict[str, Array], t: int) -> tuple[Array, dict[str, Array]]:
        decay, eps = self.spec.decay, self.spec.epsilon
        avg_sq_grad = decay * slots["avg_sq_grad"] + (1.0 - decay) * grad * grad
        delta = -np.sqrt(slots["avg_sq_update"] + eps) / np.sqrt(avg_sq_grad + eps) * grad
        avg_sq_update = decay * slots["avg_sq_update"] + (1.0 - decay) * delta * delta
        return param + self.spec.learning_rate * delta, {"avg_sq_grad": avg_sq_grad, "avg_sq_update": avg_sq_update}


class Adam(BaseOptimizer):
    """Bias-corrected first and second moments."""

    slot_names = ("m", "v")

    def _update(self, param: Array, grad: Array, slots: dict[str, Array], t: int) -> tuple[Array, dict[str, Array]]:
        beta1, beta2 = self.spec.beta1, self.spec.beta2
        m = beta1 * slots["m"] + (1.0 - beta1) * grad
        v = beta2 * slots["v"] + (1.0 - beta2) * grad * grad
        m_hat = m / (1.0 - beta1**t)
        v_hat = v / (1.0 - beta2**t)
        return param - self.spec.learning_rate * m_hat / (np.sqrt(v_hat) + self.spec.epsilon), {"m": m, "v": v}


OPTIMIZERS: dict[OptimizerKind, type[BaseOptimizer]] = {
    OptimizerKind.SGD: Sgd,
    OptimizerKind.ADAGRAD: Adagrad,
    OptimizerKind.ADADELTA: Adadelta,
    OptimizerKind.ADAM: Adam,
}


def make_optimizer(spec: OptimizerSpec) -> BaseOptimizer:
    try:
        return OPTIMIZERS[OptimizerKind(spec.kind)](spec)
    except (KeyError, ValueError) as e:
        raise ConfigurationError(f"unknown optimizer kind: {spec.kind}") from e


def step(opt_state: OptimizerState, grads: list[Array], spec: OptimizerSpec) -> OptimizerState:
    """One update of ``opt_state`` under ``spec``; the input state is not modified."""
    return make_optimizer(spec).step(opt_state, grads)
