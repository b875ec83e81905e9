"""The dlADMM iteration, the training loop and its convergence diagnostics.

One iteration is a backward sweep (layer L down to 1, blocks a → z → b → W) followed by
a forward sweep (layer 1 up to L, blocks W → b → z → a), then the residual and the
dual update. The "bar" values left by the backward sweep are kept so the per-iteration
movement term (the summand of c_k) comes from logged values.
"""

from __future__ import annotations

import logging
import math
import time
from collections.abc import Callable, Iterable
from dataclasses import asdict, dataclass, field
from typing import TYPE_CHECKING, Any

import numpy as np

from dladmm.admm.energy import lagrangian_value, output_residual, risk_grad
from dladmm.admm.model import Architecture, Hyperparams, Matrix, NetState, RiskSpec, accuracy, init_state
from dladmm.admm.subproblems import (
    SweepDirection,
    dual_update,
    update_a_backtrack,
    update_b_closed,
    update_W_backtrack,
    update_z_hidden,
    update_z_output_fista,
)

if TYPE_CHECKING:
    from dladmm.data.dataset import Dataset

logger = logging.getLogger(__name__)

DESCENT_RTOL = 1e-9
DESCENT_SLACK = 1e-6

BACKWARD = SweepDirection.BACKWARD
FORWARD = SweepDirection.FORWARD


@dataclass
class IterationRecord:
    """Per-iteration snapshot. dlADMM-only fields are ``None`` for baseline runs."""

    iteration: int
    rho_used: float | None
    objective_F: float  # noqa: N815
    lagrangian: float | None
    residual_norm: float | None
    train_accuracy: float
    test_accuracy: float | None
    descent_ok: bool | None
    descent_gap: float | None
    ck_term: float | None
    lemma2: float | None
    fista_iters: int | None
    fista_converged: bool | None
    tau_bar: list[float] = field(default_factory=list)
    tau: list[float] = field(default_factory=list)
    theta_bar: list[float] = field(default_factory=list)
    theta: list[float] = field(default_factory=list)
    wall_ms: float = 0.0

    def as_row(self) -> dict[str, Any]:
        """Flat mapping with per-layer coefficients as ``tau_bar_1``, ``theta_2``, ..."""
        row = asdict(self)
        wall_ms = row.pop("wall_ms")
        for name in ("tau_bar", "tau", "theta_bar", "theta"):
            for layer, value in enumerate(row.pop(name), start=1):
                row[f"{name}_{layer}"] = value
        row["wall_ms"] = wall_ms
        return row


@dataclass(frozen=True)
class DescentDiagnostics:
    C1: float  # noqa: N815
    rho_threshold_ok: bool
    C2_empirical: float  # noqa: N815
    descent_gap: float
    inequality_ok: bool


@dataclass
class BacktrackMemory:
    """Last accepted coefficient per (block, layer, direction), used to warm-start backtracking."""

    floor: float
    accepted: dict[tuple[str, int, SweepDirection], float] = field(default_factory=dict)

    def start(self, block: str, layer: int, direction: SweepDirection, default: float) -> float:
        previous = self.accepted.get((block, layer, direction))
        return default if previous is None else max(previous, self.floor)

    def remember(self, block: str, layer: int, direction: SweepDirection, coeff: float) -> None:
        self.accepted[(block, layer, direction)] = coeff


@dataclass
class _Snapshot:
    W: list[Matrix]
    b: list[np.ndarray]
    a: list[Matrix]
    zL: Matrix  # noqa: N815

    @classmethod
    def of(cls, state: NetState) -> _Snapshot:
        return cls(
            W=[w.copy() for w in state.W],
            b=[v.copy() for v in state.b],
            a=[m.copy() for m in state.a],
            zL=state.z[-1].copy(),
        )


def _movement(start: _Snapshot, end: _Snapshot) -> float:
    total = 0.0
    for left, right in ((start.W, end.W), (start.b, end.b), (start.a, end.a), ([start.zL], [end.zL])):
        total += sum(float(np.vdot(p - q, p - q)) for p, q in zip(left, right, strict=True))
    return total


def lemma2_check(state: NetState, risk_spec: RiskSpec) -> float:  # noqa: ARG001
    """‖∇R(z_L) + u‖_∞; zero when the output-z solve is exact and u has just been updated."""
    return float(np.max(np.abs(risk_grad(state.z[-1], state.y) + state.u)))


def iterate(
    state: NetState,
    hyper: Hyperparams,
    risk_spec: RiskSpec,
    data: Dataset,
    *,
    rho: float | None = None,
    iteration: int = 1,
    memory: BacktrackMemory | None = None,
    test_data: Dataset | None = None,
) -> IterationRecord:
    """Run one backward/forward sweep plus the dual update on ``state`` in place."""
    started = time.perf_counter()
    rho = hyper.rho0 if rho is None else rho
    memory = memory if memory is not None else BacktrackMemory(floor=hyper.warm_start_floor)
    last = state.num_layers
    t_default = hyper.initial_step()
    fista_tol = hyper.fista_tolerance(state.arch.layer_dims[-1], state.num_samples)

    before = lagrangian_value(state, risk_spec, hyper, rho=rho).total
    previous = _Snapshot.of(state)
    coeffs: dict[tuple[str, SweepDirection], list[float]] = {
        ("a", BACKWARD): [math.nan] * (last - 1),
        ("a", FORWARD): [math.nan] * (last - 1),
        ("W", BACKWARD): [math.nan] * last,
        ("W", FORWARD): [math.nan] * last,
    }

    def step_a(layer: int, direction: SweepDirection) -> None:
        result = update_a_backtrack(state, layer, direction, hyper, rho=rho, t0=memory.start("a", layer, direction, t_default))
        memory.remember("a", layer, direction, result.accepted_coeff)
        coeffs[("a", direction)][layer - 1] = result.accepted_coeff

    def step_w(layer: int, direction: SweepDirection) -> None:
        result = update_W_backtrack(state, layer, direction, hyper, rho=rho, t0=memory.start("W", layer, direction, t_default))
        memory.remember("W", layer, direction, result.accepted_coeff)
        coeffs[("W", direction)][layer - 1] = result.accepted_coeff

    for layer in range(last, 0, -1):
        if layer < last:
            step_a(layer, BACKWARD)
            update_z_hidden(state, layer, BACKWARD, hyper)
            update_b_closed(state, layer, BACKWARD, hyper, rho=rho)
        else:
            update_z_output_fista(state, risk_spec, rho, BACKWARD, hyper.fista_max_iters, fista_tol)
            update_b_closed(state, layer, BACKWARD, hyper, rho=rho)
        step_w(layer, BACKWARD)
    bar = _Snapshot.of(state)

    fista = None
    residual = output_residual(state)
    for layer in range(1, last + 1):
        step_w(layer, FORWARD)
        update_b_closed(state, layer, FORWARD, hyper, rho=rho)
        if layer < last:
            update_z_hidden(state, layer, FORWARD, hyper)
            step_a(layer, FORWARD)
        else:
            fista = update_z_output_fista(state, risk_spec, rho, FORWARD, hyper.fista_max_iters, fista_tol)
            residual = output_residual(state)
            state.u = dual_update(state.u, residual, rho)
    state.check_finite()

    final = _Snapshot.of(state)
    energy = lagrangian_value(state, risk_spec, hyper, rho=rho)
    descent_ok = energy.total <= before + DESCENT_RTOL * abs(before)
    record = IterationRecord(
        iteration=iteration,
        rho_used=rho,
        objective_F=energy.objective,
        lagrangian=energy.total,
        residual_norm=float(np.linalg.norm(residual)),
        train_accuracy=accuracy(state.W, state.b, state.arch, data.x, data.y),
        test_accuracy=accuracy(state.W, state.b, state.arch, test_data.x, test_data.y) if test_data is not None else None,
        descent_ok=descent_ok,
        descent_gap=before - energy.total,
        ck_term=_movement(previous, bar) + _movement(bar, final),
        lemma2=lemma2_check(state, risk_spec),
        fista_iters=fista.iterations if fista is not None else None,
        fista_converged=fista.converged if fista is not None else None,
        tau_bar=coeffs[("a", BACKWARD)],
        tau=coeffs[("a", FORWARD)],
        theta_bar=coeffs[("W", BACKWARD)],
        theta=coeffs[("W", FORWARD)],
        wall_ms=(time.perf_counter() - started) * 1000.0,
    )
    if not descent_ok:
        logger.warning("iteration %d: L_rho increased by %.3e (rho=%.1e)", iteration, -record.descent_gap, rho)  # type: ignore[operator]
    if fista is not None and not fista.converged:
        logger.warning("iteration %d: output-z FISTA hit %d iterations (‖∇‖∞=%.2e)", iteration, fista.iterations, fista.grad_norm)
    logger.debug("iteration %d: tau_bar=%s tau=%s theta_bar=%s theta=%s", iteration, record.tau_bar, record.tau, record.theta_bar, record.theta)
    return record


def train(
    arch: Architecture,
    hyper: Hyperparams,
    data: Dataset,
    *,
    risk_spec: RiskSpec | None = None,
    test_data: Dataset | None = None,
    on_record: Callable[[IterationRecord], None] | None = None,
) -> tuple[NetState, list[IterationRecord]]:
    """Initialize and run ``hyper.max_iters`` iterations, applying the ρ schedule before each.

    Returns the final state and the full history; deterministic for a fixed seed.
    """
    risk_spec = risk_spec or RiskSpec()
    state = init_state(arch, data, hyper)
    memory = BacktrackMemory(floor=hyper.warm_start_floor)
    history: list[IterationRecord] = []
    for iteration in range(1, hyper.max_iters + 1):
        rho = hyper.rho_schedule.rho_at(hyper.rho0, iteration)
        record = iterate(state, hyper, risk_spec, data, rho=rho, iteration=iteration, memory=memory, test_data=test_data)
        history.append(record)
        logger.info(
            "iter %d rho=%.1e L=%.6e |r|=%.3e train=%.4f test=%s",
            iteration,
            rho,
            record.lagrangian,
            record.residual_norm,
            record.train_accuracy,
            "-" if record.test_accuracy is None else f"{record.test_accuracy:.4f}",
        )
        if on_record is not None:
            on_record(record)
    return state, history


def ck_sequence(history: Iterable[IterationRecord]) -> list[float]:
    """Running minimum of the movement term: c_k = min_{i ≤ k} ck_term_i."""
    terms = [record.ck_term for record in history if record.ck_term is not None]
    if not terms:
        raise ValueError("ck_sequence needs at least one dlADMM record")
    return [float(value) for value in np.minimum.accumulate(terms)]


def descent_diagnostics(
    prev_record: IterationRecord | None,
    cur_record: IterationRecord,
    hyper: Hyperparams,
    risk_spec: RiskSpec,
) -> DescentDiagnostics:
    """Evaluate the sufficient-descent inequality for ``cur_record``.

    C1 = ρ/2 − H/2 − H²/ρ and C2 = min(ν/2, C1, accepted τ̄, τ, θ̄, θ); the inequality is
    ``descent_gap ≥ C2 · ck_term − 1e-6``. The gap is measured at constant ρ within the
    iteration; ``prev_record`` supplies it only when the current record lacks one.
    """
    rho = cur_record.rho_used if cur_record.rho_used is not None else hyper.rho0
    H = risk_spec.lipschitz_H
    c1 = rho / 2.0 - H / 2.0 - H * H / rho
    accepted = [c for c in (*cur_record.tau_bar, *cur_record.tau, *cur_record.theta_bar, *cur_record.theta) if not math.isnan(c)]
    c2 = min([hyper.nu / 2.0, c1, *accepted])
    if cur_record.descent_gap is not None:
        gap = cur_record.descent_gap
    elif prev_record is not None and prev_record.lagrangian is not None and cur_record.lagrangian is not None:
        gap = prev_record.lagrangian - cur_record.lagrangian
    else:
        gap = math.nan
    ck_term = cur_record.ck_term if cur_record.ck_term is not None else 0.0
    return DescentDiagnostics(
        C1=c1,
        rho_threshold_ok=rho > 2.0 * H,
        C2_empirical=c2,
        descent_gap=gap,
        inequality_ok=gap >= c2 * ck_term - DESCENT_SLACK,
    )
