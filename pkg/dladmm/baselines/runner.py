"""Full-batch training loop for the comparison optimizers."""

from __future__ import annotations

import logging
import time
from collections.abc import Callable
from typing import TYPE_CHECKING

import numpy as np

from dladmm.admm.model import Architecture, accuracy, init_weights
from dladmm.admm.trainer import IterationRecord
from dladmm.baselines.backprop import backprop_grads, network_loss
from dladmm.baselines.base import OptimizerSpec, OptimizerState
from dladmm.baselines.optimizers import make_optimizer
from dladmm.errors import NumericFailureError, ShapeError

if TYPE_CHECKING:
    from dladmm.data.dataset import Dataset

logger = logging.getLogger(__name__)


def train_baseline(
    arch: Architecture,
    spec: OptimizerSpec,
    data: Dataset,
    *,
    seed: int = 0,
    test_data: Dataset | None = None,
    on_record: Callable[[IterationRecord], None] | None = None,
) -> tuple[OptimizerState, list[IterationRecord]]:
    """Run ``spec.epochs`` full-batch steps from the same seeded init dlADMM uses.

    Records share the dlADMM schema; ``objective_F`` is the plain network loss and the
    dlADMM-only fields are ``None``.
    """
    if data.x.shape[0] != arch.layer_dims[0] or data.y.shape[0] != arch.layer_dims[-1]:
        raise ShapeError(f"data is {data.x.shape[0]} -> {data.y.shape[0]}, architecture is {arch.layer_dims[0]} -> {arch.layer_dims[-1]}")

    optimizer = make_optimizer(spec)
    weights, biases = init_weights(arch, np.random.default_rng(seed))
    state = optimizer.init_state(weights, biases)
    history: list[IterationRecord] = []

    for epoch in range(1, spec.epochs + 1):
        started = time.perf_counter()
        grads_W, grads_b = backprop_grads(state.weights, state.biases, arch, data.x, data.y)
        state = optimizer.step(state, [*grads_W, *grads_b])
        loss = network_loss(state.weights, state.biases, arch, data.x, data.y)
        if not np.isfinite(loss):
            raise NumericFailureError(f"non-finite loss after epoch {epoch}", block=spec.kind.value)

        record = IterationRecord(
            iteration=epoch,
            rho_used=None,
            objective_F=loss,
            lagrangian=None,
            residual_norm=None,
            train_accuracy=accuracy(state.weights, state.biases, arch, data.x, data.y),
            test_accuracy=accuracy(state.weights, state.biases, arch, test_data.x, test_data.y) if test_data is not None else None,
            descent_ok=None,
            descent_gap=None,
            ck_term=None,
            lemma2=None,
            fista_iters=None,
            fista_converged=None,
            wall_ms=(time.perf_counter() - started) * 1000.0,
        )
        history.append(record)
        logger.info("%s epoch %d loss=%.6e train=%.4f", spec.kind.value, epoch, loss, record.train_accuracy)
        if on_record is not None:
            on_record(record)
    return state, history
