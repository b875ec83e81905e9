"""Block updates of one dlADMM sweep.

Every update reads the freshest value of all other blocks from the state, writes its
block back in place and returns what it produced. Backward and forward variants share
code; the direction only selects the growth factor and the warm-start slot, since the
expansion point is always the value currently stored (``a^k`` going backward, ``ā``
going forward).

a and W use isotropic quadratic majorization with backtracking on the curvature
coefficient; b has an exact closed form; hidden z has an elementwise closed form for
(leaky) ReLU; output z is solved with FISTA.
"""

from __future__ import annotations

import logging
from collections.abc import Callable
from dataclasses import dataclass
from enum import Enum

import numpy as np
from numpy.typing import NDArray

from dladmm.admm.energy import (
    activation_term,
    grad_phi_a,
    grad_phi_b,
    grad_phi_W,
    link_term,
    output_term,
    prox_regularizer,
    risk_grad,
    risk_value,
)
from dladmm.admm.model import Hyperparams, Matrix, NetState, RiskSpec, linear
from dladmm.errors import NumericFailureError

logger = logging.getLogger(__name__)


class SweepDirection(str, Enum):
    BACKWARD = "backward"
    FORWARD = "forward"


@dataclass
class BacktrackResult:
    """Outcome of one majorization step.

    ``accepted_coeff`` is τ̄/τ (a-blocks) or θ̄/θ (W-blocks) and equals
    ``t0 * growth**trials``. ``block_before``/``block_after`` are the parts of φ that
    depend on the block, at the expansion point and at ``new_value``; ``model_value``
    is the quadratic model at ``new_value``.
    """

    new_value: Matrix
    accepted_coeff: float
    trials: int
    block_before: float
    block_after: float
    model_value: float


@dataclass
class FistaResult:
    value: Matrix
    iterations: int
    converged: bool
    grad_norm: float


def _sq(array: Matrix) -> float:
    return float(np.vdot(array, array))


def quadratic_model(phi_at_p: float, grad: Matrix, p: Matrix, candidate: Matrix, coeff: float) -> float:
    """φ(p) + ⟨∇φ(p), c − p⟩ + (coeff/2)‖c − p‖²."""
    diff = candidate - p
    return phi_at_p + float(np.vdot(grad, diff)) + 0.5 * coeff * _sq(diff)


def _backtrack(
    objective: Callable[[Matrix], float],
    p: Matrix,
    grad: Matrix,
    *,
    t0: float,
    growth: float,
    max_trials: int,
    block: str,
    layer: int,
    direction: SweepDirection,
    prox: Callable[[Matrix, float], Matrix] | None = None,
) -> BacktrackResult:
    phi_at_p = objective(p)
    if not np.isfinite(phi_at_p) or not np.all(np.isfinite(grad)):
        raise NumericFailureError("non-finite objective or gradient at expansion point", block=block, layer=layer, direction=direction.value)

    coeff = t0
    trials = 0
    while True:
        step = p - grad / coeff
        candidate = prox(step, coeff) if prox is not None else step
        model = quadratic_model(phi_at_p, grad, p, candidate, coeff)
        value = objective(candidate)
        if value <= model:
            logger.debug("%s[%d] %s accepted coeff=%.3e after %d trials", block, layer, direction.value, coeff, trials)
            return BacktrackResult(candidate, coeff, trials, phi_at_p, value, model)
        if trials >= max_trials:
            raise NumericFailureError(f"backtracking exceeded {max_trials} trials (coeff={coeff:.3e})", block=block, layer=layer, direction=direction.value)
        coeff *= growth
        trials += 1


def a_block_objective(state: NetState, layer: int, nu: float, rho: float) -> Callable[[Matrix], float]:
    """Part of φ that depends on ``a_l``, as a function of a candidate ``a_l``."""
    last = state.num_layers
    z_own = state.z[layer - 1]

    def objective(a: Matrix) -> float:
        value = activation_term(a, z_own, state.arch, nu)
        if layer < last - 1:
            return value + link_term(state.z[layer], state.W[layer], a, state.b[layer], nu)
        return value + output_term(state.z[-1], state.W[-1], a, state.b[-1], state.u, rho)

    return objective


def w_block_objective(state: NetState, layer: int, nu: float, rho: float) -> Callable[[Matrix], float]:
    """Part of φ that depends on ``W_l``."""
    a_prev = state.a_in(layer)
    bias = state.b[layer - 1]
    z_own = state.z[layer - 1]
    if layer < state.num_layers:
        return lambda W: link_term(z_own, W, a_prev, bias, nu)
    return lambda W: output_term(z_own, W, a_prev, bias, state.u, rho)


def update_a_backtrack(
    state: NetState,
    layer: int,
    direction: SweepDirection,
    hyper: Hyperparams,
    *,
    rho: float | None = None,
    t0: float | None = None,
) -> BacktrackResult:
    """ā_l (backward) or a_l (forward) by majorize-and-backtrack on τ."""
    rho = hyper.rho0 if rho is None else rho
    growth = hyper.eta_bar if direction is SweepDirection.BACKWARD else hyper.eta
    p = state.a[layer - 1]
    grad = grad_phi_a(state, layer, hyper.nu, rho)
    result = _backtrack(
        a_block_objective(state, layer, hyper.nu, rho),
        p,
        grad,
        t0=hyper.initial_step() if t0 is None else t0,
        growth=growth,
        max_trials=hyper.max_backtracks,
        block="a",
        layer=layer,
        direction=direction,
    )
    state.a[layer - 1] = result.new_value
    return result


def update_W_backtrack(  # noqa: N802
    state: NetState,
    layer: int,
    direction: SweepDirection,
    hyper: Hyperparams,
    *,
    rho: float | None = None,
    t0: float | None = None,
) -> BacktrackResult:
    """W̄_l (backward) or W_l (forward): proximal majorization step on θ, then Ω's prox."""
    rho = hyper.rho0 if rho is None else rho
    growth = hyper.gamma_bar if direction is SweepDirection.BACKWARD else hyper.gamma
    regularizer = hyper.regularizer
    result = _backtrack(
        w_block_objective(state, layer, hyper.nu, rho),
        state.W[layer - 1],
        grad_phi_W(state, layer, hyper.nu, rho),
        t0=hyper.initial_step() if t0 is None else t0,
        growth=growth,
        max_trials=hyper.max_backtracks,
        block="W",
        layer=layer,
        direction=direction,
        prox=lambda V, theta: prox_regularizer(V, theta, regularizer),
    )
    state.W[layer - 1] = result.new_value
    return result


def update_b_closed(
    state: NetState,
    layer: int,
    direction: SweepDirection,
    hyper: Hyperparams,
    *,
    rho: float | None = None,
) -> NDArray[np.float64]:
    """b − ∇_b φ/(ν·N) for hidden layers, b − ∇_b φ/(ρ·N) for the output layer.

    The bias is shared by all N columns, so νN (ρN) is the exact curvature of φ in b
    and the step lands on the block minimizer.
    """
    rho = hyper.rho0 if rho is None else rho
    curvature = (hyper.nu if layer < state.num_layers else rho) * state.num_samples
    new_b = state.b[layer - 1] - grad_phi_b(state, layer, hyper.nu, rho) / curvature
    if not np.all(np.isfinite(new_b)):
        raise NumericFailureError("non-finite bias update", block="b", layer=layer, direction=direction.value)
    state.b[layer - 1] = new_b
    return new_b


def relu_z_minimizer(c: Matrix, a: Matrix, slope: float = 0.0) -> Matrix:
    """Elementwise argmin_z (z − c)² + (a − f(z))² for f(z) = max(z, slope·z).

    Compares the minimizer on z ≤ 0 with the one on z ≥ 0; ties go to the z ≥ 0 branch.
    """
    negative = np.minimum((c + slope * a) / (1.0 + slope * slope), 0.0)
    negative_cost = (negative - c) ** 2 + (a - slope * negative) ** 2
    positive = np.maximum((c + a) / 2.0, 0.0)
    positive_cost = (positive - c) ** 2 + (a - positive) ** 2
    return np.where(positive_cost <= negative_cost, positive, negative)


def update_z_hidden(state: NetState, layer: int, direction: SweepDirection, hyper: Hyperparams) -> Matrix:  # noqa: ARG001
    """z̄_l / z_l: exact minimizer of (ν/2)‖z − c‖² + (ν/2)‖a_l − f(z)‖², c = W_l a_{l−1} + b_l."""
    c = linear(state.W[layer - 1], state.a_in(layer), state.b[layer - 1])
    new_z = relu_z_minimizer(c, state.a[layer - 1], state.arch.slope)
    if not np.all(np.isfinite(new_z)):
        raise NumericFailureError("non-finite hidden z", block="z", layer=layer, direction=direction.value)
    state.z[layer - 1] = new_z
    return new_z


def update_z_output_fista(
    state: NetState,
    risk_spec: RiskSpec,
    rho: float,
    direction: SweepDirection,
    fista_max_iters: int,
    fista_tol: float,
) -> FistaResult:
    """z̄_L / z_L: accelerated gradient on R(z; y) + uᵀ(z − c) + (ρ/2)‖z − c‖².

    Fixed step 1/(H + ρ), warm-started from the stored z_L, stopping once
    ‖∇‖_∞ ≤ ``fista_tol``. The returned point never has a higher objective than the
    warm start.
    """
    last = state.num_layers
    c = linear(state.W[-1], state.a_in(last), state.b[-1])
    u = state.u
    y = state.y
    step = 1.0 / (risk_spec.lipschitz_H + rho)

    def gradient(z: Matrix) -> Matrix:
        return risk_grad(z, y) + u + rho * (z - c)

    def objective(z: Matrix) -> float:
        gap = z - c
        return risk_value(z, y) + float(np.vdot(u, gap)) + 0.5 * rho * _sq(gap)

    start = state.z[-1]
    x = start
    extrapolated = start
    momentum = 1.0
    converged = False
    iterations = 0
    for iterations in range(1, fista_max_iters + 1):  # noqa: B007
        g = gradient(extrapolated)
        if float(np.max(np.abs(g))) <= fista_tol:
            x = extrapolated
            converged = True
            break
        x_next = extrapolated - step * g
        momentum_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * momentum * momentum))
        extrapolated = x_next + ((momentum - 1.0) / momentum_next) * (x_next - x)
        x, momentum = x_next, momentum_next

    if objective(x) > objective(start):
        x = start
    grad_norm = float(np.max(np.abs(gradient(x))))
    converged = grad_norm <= fista_tol
    if not np.isfinite(grad_norm):
        raise NumericFailureError("non-finite output z", block="z", layer=last, direction=direction.value)
    if not converged:
        logger.debug("FISTA (%s) stopped at cap %d with ‖∇‖∞=%.3e", direction.value, fista_max_iters, grad_norm)
    state.z[-1] = x
    return FistaResult(value=x, iterations=iterations, converged=converged, grad_norm=grad_norm)


def dual_update(u: Matrix, r: Matrix, rho: float) -> Matrix:
    """u + ρ r."""
    return u + rho * r
