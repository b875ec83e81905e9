"""Per-iteration wall time as hidden width and sample count grow."""

from __future__ import annotations

import csv
import logging
import time
from pathlib import Path
from typing import Any

from dladmm.admm.model import Architecture, Hyperparams, RhoSchedule, RiskSpec, init_state
from dladmm.admm.trainer import BacktrackMemory, iterate
from dladmm.config import BenchConfig
from dladmm.data.dataset import Dataset
from dladmm.errors import ShapeError

logger = logging.getLogger(__name__)

NEURONS_FILE = "scaling_neurons.csv"
SAMPLES_FILE = "scaling_samples.csv"
COLUMNS = ("rho", "hidden", "samples", "warmup_iters", "timed_iters", "mean_seconds")


def time_iterations(
    arch: Architecture,
    hyper: Hyperparams,
    risk_spec: RiskSpec,
    data: Dataset,
    *,
    warmup: int,
    timed: int,
) -> float:
    """Mean seconds per dlADMM iteration over ``timed`` iterations after ``warmup`` untimed ones."""
    state = init_state(arch, data, hyper)
    memory = BacktrackMemory(floor=hyper.warm_start_floor)
    rho = hyper.rho0
    for iteration in range(1, warmup + 1):
        iterate(state, hyper, risk_spec, data, rho=rho, iteration=iteration, memory=memory)
    started = time.perf_counter()
    for iteration in range(warmup + 1, warmup + timed + 1):
        iterate(state, hyper, risk_spec, data, rho=rho, iteration=iteration, memory=memory)
    return (time.perf_counter() - started) / timed


def _columns(data: Dataset, count: int) -> Dataset:
    if count > data.num_samples:
        raise ShapeError(f"benchmark needs {count} samples, only {data.num_samples} loaded")
    return Dataset(x=data.x[:, :count], y=data.y[:, :count], name=f"{data.name}[:{count}]")


def _cell(
    bench: BenchConfig,
    hyper: Hyperparams,
    risk_spec: RiskSpec,
    data: Dataset,
    *,
    rho: float,
    hidden: int,
    samples: int,
) -> dict[str, Any]:
    arch = Architecture(layer_dims=(data.num_features, *([hidden] * bench.hidden_layers), data.num_classes))
    cell_hyper = hyper.model_copy(update={"rho0": rho, "rho_schedule": RhoSchedule()})
    seconds = time_iterations(arch, cell_hyper, risk_spec, _columns(data, samples), warmup=bench.warmup_iters, timed=bench.timed_iters)
    logger.info("bench rho=%.1e hidden=%d samples=%d: %.4fs/iter", rho, hidden, samples, seconds)
    return {
        "rho": rho,
        "hidden": hidden,
        "samples": samples,
        "warmup_iters": bench.warmup_iters,
        "timed_iters": bench.timed_iters,
        "mean_seconds": seconds,
    }


def run_scaling(
    bench: BenchConfig,
    hyper: Hyperparams,
    risk_spec: RiskSpec,
    data: Dataset,
) -> tuple[list[dict[str, Any]], list[dict[str, Any]]]:
    """Sweep hidden widths at ``fixed_samples`` and sample counts at ``fixed_hidden``, for each ρ.

    Cells run sequentially.
    """
    neurons = [
        _cell(bench, hyper, risk_spec, data, rho=rho, hidden=hidden, samples=bench.fixed_samples)
        for rho in bench.rhos
        for hidden in bench.hidden_sizes
    ]
    samples = [
        _cell(bench, hyper, risk_spec, data, rho=rho, hidden=bench.fixed_hidden, samples=count)
        for rho in bench.rhos
        for count in bench.sample_counts
    ]
    return neurons, samples


def write_table(path: Path, rows: list[dict[str, Any]]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=list(COLUMNS))
        writer.writeheader()
        writer.writerows(rows)


def time_ratios(rows: list[dict[str, Any]], key: str) -> list[tuple[int, int, float]]:
    """``(smaller, larger, time ratio)`` for consecutive ``key`` values at equal ρ."""
    ratios: list[tuple[int, int, float]] = []
    for rho in sorted({row["rho"] for row in rows}):
        cells = sorted((row for row in rows if row["rho"] == rho), key=lambda row: row[key])
        ratios.extend((lo[key], hi[key], hi["mean_seconds"] / lo["mean_seconds"]) for lo, hi in zip(cells, cells[1:], strict=False))
    return ratios
