"""Loss and exact gradients of the plain feed-forward network (no auxiliary variables)."""

from __future__ import annotations

import numpy as np

from dladmm.admm.energy import risk_grad, risk_value
from dladmm.admm.model import Architecture, Matrix, linear
from dladmm.baselines.base import Array
from dladmm.errors import ShapeError


def _forward(W: list[Matrix], b: list[Array], arch: Architecture, x: Matrix) -> tuple[list[Matrix], list[Matrix]]:
    """Pre-activations ``z_1..z_L`` and layer inputs ``a_0..a_{L-1}``."""
    if len(W) != arch.num_layers or len(b) != arch.num_layers:
        raise ShapeError(f"expected {arch.num_layers} layers, got {len(W)} weights and {len(b)} biases")
    inputs: list[Matrix] = [np.asarray(x, dtype=np.float64)]
    zs: list[Matrix] = []
    for layer, (weight, bias) in enumerate(zip(W, b, strict=True), start=1):
        current = inputs[-1]
        if weight.shape != (arch.layer_dims[layer], arch.layer_dims[layer - 1]) or bias.shape != (arch.layer_dims[layer],):
            raise ShapeError(f"layer {layer}: W {weight.shape}, b {bias.shape} do not match {arch.layer_dims}")
        if current.shape[0] != weight.shape[1]:
            raise ShapeError(f"layer {layer}: input has {current.shape[0]} rows, W expects {weight.shape[1]}")
        z = linear(weight, current, bias)
        zs.append(z)
        if layer < arch.num_layers:
            inputs.append(arch.activate(z))
    return zs, inputs


def network_loss(W: list[Matrix], b: list[Array], arch: Architecture, x: Matrix, y: Matrix) -> float:
    """Summed softmax cross-entropy of the network output."""
    zs, _ = _forward(W, b, arch, x)
    return risk_value(zs[-1], y)


def backprop_grads(W: list[Matrix], b: list[Array], arch: Architecture, x: Matrix, y: Matrix) -> tuple[list[Matrix], list[Array]]:
    """Gradients of :func:`network_loss` with respect to every ``W_l`` and ``b_l``."""
    zs, inputs = _forward(W, b, arch, x)
    if y.shape != zs[-1].shape:
        raise ShapeError(f"labels {y.shape} do not match output {zs[-1].shape}")

    grads_W: list[Matrix] = [np.empty(0)] * arch.num_layers
    grads_b: list[Array] = [np.empty(0)] * arch.num_layers
    delta = risk_grad(zs[-1], y)
    for index in range(arch.num_layers - 1, -1, -1):
        grads_W[index] = delta @ inputs[index].T
        grads_b[index] = np.sum(delta, axis=1)
        if index > 0:
            delta = (W[index].T @ delta) * arch.activate_derivative(zs[index - 1])
    return grads_W, grads_b
