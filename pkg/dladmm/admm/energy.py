"""Penalty φ, risk R, regularizer Ω, augmented Lagrangian L_ρ and block gradients of φ.

φ = (ν/2) Σ_{l<L} (‖z_l − W_l a_{l−1} − b_l‖² + ‖a_l − f(z_l)‖²) + Σ uᵀr + (ρ/2)‖r‖²
with r = z_L − W_L a_{L−1} − b_L. Every function here is pure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy.special import logsumexp, softmax

from dladmm.admm.model import Architecture, Hyperparams, Matrix, NetState, RegularizerSpec, RiskSpec, linear
from dladmm.errors import NumericFailureError

Vector = NDArray[np.float64]


@dataclass(frozen=True)
class EnergyBreakdown:
    risk: float
    regularizer_total: float
    nu_penalty: float
    dual_term: float
    rho_penalty: float
    total: float

    @property
    def phi(self) -> float:
        return self.nu_penalty + self.dual_term + self.rho_penalty

    @property
    def objective(self) -> float:
        """Training objective F: everything except the dual and ρ terms."""
        return self.risk + self.regularizer_total + self.nu_penalty


def _sq(array: NDArray[np.float64]) -> float:
    return float(np.vdot(array, array))


def _require_finite(*arrays: NDArray[np.float64], block: str) -> None:
    for array in arrays:
        if not np.all(np.isfinite(array)):
            raise NumericFailureError("non-finite input", block=block)


def _check_layer(state: NetState, layer: int, *, hidden_only: bool = False) -> None:
    top = state.num_layers - 1 if hidden_only else state.num_layers
    if not 1 <= layer <= top:
        raise IndexError(f"layer {layer} out of range 1..{top}")


# --- risk -----------------------------------------------------------------


def risk_value(zL: Matrix, y: Matrix) -> float:
    """Σ_samples −log softmax(z_L)[true class]."""
    _require_finite(zL, block="risk")
    return float(np.sum(logsumexp(zL, axis=0)) - np.vdot(y, zL))


def risk_grad(zL: Matrix, y: Matrix) -> Matrix:
    """softmax(z_L) − y, column by column."""
    _require_finite(zL, block="risk")
    return softmax(zL, axis=0) - y


# --- regularizer ----------------------------------------------------------


def regularizer_value(W: Matrix, spec: RegularizerSpec) -> float:
    if spec.lam < 0:
        raise ValueError(f"regularizer weight must be >= 0, got {spec.lam}")
    if spec.kind == "l1":
        return spec.lam * float(np.sum(np.abs(W)))
    if spec.kind == "l2":
        return spec.lam * _sq(W)
    return 0.0


def prox_regularizer(V: Matrix, inv_weight: float | Matrix, spec: RegularizerSpec) -> Matrix:
    """argmin_W (θ/2)‖W − V‖² + Ω(W), elementwise, for curvature θ = ``inv_weight``."""
    if spec.lam < 0:
        raise ValueError(f"regularizer weight must be >= 0, got {spec.lam}")
    theta = np.asarray(inv_weight, dtype=np.float64)
    if np.any(theta <= 0):
        raise ValueError("proximal curvature must be positive")
    if spec.kind == "l1":
        threshold = spec.lam / theta
        return np.sign(V) * np.maximum(np.abs(V) - threshold, 0.0)
    if spec.kind == "l2":
        return V * (theta / (theta + 2.0 * spec.lam))
    return V


# --- φ building blocks ----------------------------------------------------


def link_term(z: Matrix, W: Matrix, a_prev: Matrix, b: Vector, nu: float) -> float:
    """(ν/2)‖z − W a − b‖² for a hidden layer."""
    return 0.5 * nu * _sq(z - linear(W, a_prev, b))


def activation_term(a: Matrix, z: Matrix, arch: Architecture, nu: float) -> float:
    """(ν/2)‖a − f(z)‖²."""
    return 0.5 * nu * _sq(a - arch.activate(z))


def output_term(zL: Matrix, W: Matrix, a_prev: Matrix, b: Vector, u: Matrix, rho: float) -> float:
    """Σ uᵀr + (ρ/2)‖r‖² for the output layer."""
    r = zL - linear(W, a_prev, b)
    return float(np.vdot(u, r)) + 0.5 * rho * _sq(r)


def output_residual(state: NetState) -> Matrix:
    """r = z_L − W_L a_{L−1} − b_L."""
    last = state.num_layers
    return state.z[-1] - linear(state.W[-1], state.a_in(last), state.b[-1])


def _penalties(state: NetState, nu: float, rho: float) -> tuple[float, float, float]:
    nu_penalty = 0.0
    for layer in range(1, state.num_layers):
        nu_penalty += link_term(state.z[layer - 1], state.W[layer - 1], state.a_in(layer), state.b[layer - 1], nu)
        nu_penalty += activation_term(state.a[layer - 1], state.z[layer - 1], state.arch, nu)
    r = output_residual(state)
    return nu_penalty, float(np.vdot(state.u, r)), 0.5 * rho * _sq(r)


def phi_value(state: NetState, nu: float, rho: float) -> float:
    for group in (state.W, state.b, state.z, state.a, [state.u]):
        _require_finite(*group, block="phi")
    nu_penalty, dual_term, rho_penalty = _penalties(state, nu, rho)
    return nu_penalty + dual_term + rho_penalty


def lagrangian_value(state: NetState, risk_spec: RiskSpec, hyper: Hyperparams, rho: float | None = None) -> EnergyBreakdown:
    """L_ρ = R + Σ Ω_l(W_l) + φ, term by term; ``rho`` defaults to ``hyper.rho0``."""
    rho = hyper.rho0 if rho is None else rho
    for group in (state.W, state.b, state.z, state.a, [state.u]):
        _require_finite(*group, block="lagrangian")
    risk = risk_value(state.z[-1], state.y)
    regularizer_total = sum(regularizer_value(w, hyper.regularizer) for w in state.W)
    nu_penalty, dual_term, rho_penalty = _penalties(state, hyper.nu, rho)
    total = risk + regularizer_total + nu_penalty + dual_term + rho_penalty
    return EnergyBreakdown(
        risk=risk,
        regularizer_total=regularizer_total,
        nu_penalty=nu_penalty,
        dual_term=dual_term,
        rho_penalty=rho_penalty,
        total=total,
    )


# --- gradients of φ -------------------------------------------------------


def _scaled_gap(state: NetState, layer: int, nu: float, rho: float) -> Matrix:
    """ν(W_l a + b_l − z_l) for hidden layers, ρ(W_L a + b_L − z_L − u/ρ) for the output."""
    gap = linear(state.W[layer - 1], state.a_in(layer), state.b[layer - 1]) - state.z[layer - 1]
    if layer < state.num_layers:
        return nu * gap
    return rho * gap - state.u


def grad_phi_a(state: NetState, layer: int, nu: float, rho: float) -> Matrix:
    """∇_{a_l} φ for 1 ≤ l ≤ L−1."""
    _check_layer(state, layer, hidden_only=True)
    above = state.W[layer].T @ _scaled_gap(state, layer + 1, nu, rho)
    return above + nu * (state.a[layer - 1] - state.arch.activate(state.z[layer - 1]))


def grad_phi_b(state: NetState, layer: int, nu: float, rho: float) -> Vector:
    _check_layer(state, layer)
    return np.sum(_scaled_gap(state, layer, nu, rho), axis=1)


def grad_phi_W(state: NetState, layer: int, nu: float, rho: float) -> Matrix:  # noqa: N802
    _check_layer(state, layer)
    return _scaled_gap(state, layer, nu, rho) @ state.a_in(layer).T


def grad_output_z(state: NetState, risk_spec: RiskSpec, rho: float) -> Matrix:  # noqa: ARG001
    """∇_{z_L}(R + φ) = ∇R + u + ρ r."""
    return risk_grad(state.z[-1], state.y) + state.u + rho * output_residual(state)


def objective_value(state: NetState, hyper: Hyperparams) -> float:
    """Training objective F (no dual or ρ terms)."""
    return lagrangian_value(state, RiskSpec(), hyper).objective
