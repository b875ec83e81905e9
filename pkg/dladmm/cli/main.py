#!/usr/bin/env python3
"""CLI for dladmm: train, compare against baselines, benchmark scaling, evaluate checkpoints.

Exit codes: 0 success, 1 unexpected error, 2 configuration, 3 dataset, 4 numeric
failure, 5 checkpoint.
"""

from __future__ import annotations

import sys
from pathlib import Path
from typing import Any

import click
from rich.console import Console
from rich.table import Table

from dladmm import __version__
from dladmm.admm.model import accuracy
from dladmm.admm.trainer import train
from dladmm.baselines.runner import train_baseline
from dladmm.cli.bench import NEURONS_FILE, SAMPLES_FILE, run_scaling, write_table
from dladmm.cli.checkpoint import load_checkpoint, save_checkpoint
from dladmm.cli.metrics import MetricsWriter, summarize, write_summary
from dladmm.config import RunConfig
from dladmm.data.dataset import Dataset, load_split
from dladmm.errors import DlAdmmError, ShapeError
from dladmm.log import configure_logging

console = Console()


def _load(config_path: Path) -> RunConfig:
    config = RunConfig.load(config_path)
    config.check_paths()
    return config


def _split(config: RunConfig, split: str, subsample: int | None) -> Dataset:
    data = config.data
    return load_split(data.dir, data.name, split, num_classes=data.num_classes, subsample_n=subsample, seed=data.seed)  # type: ignore[arg-type]


def _report(title: str, summary: dict[str, Any]) -> None:
    table = Table(title=title)
    table.add_column("Metric", style="cyan")
    table.add_column("Value", style="green")
    for key, value in summary.items():
        table.add_row(key, "-" if value is None else (f"{value:.6g}" if isinstance(value, float) else str(value)))
    console.print(table)


def _fail(e: Exception) -> int:
    if isinstance(e, DlAdmmError):
        console.print(f"[red]Error ({type(e).__name__}): {e}[/red]")
        return e.exit_code
    console.print(f"[red]Unexpected error: {e}[/red]")
    return 1


def cmd_train(config_path: Path) -> int:
    """Train with dlADMM; write metrics, summary.json, config.json and model.ckpt under ``<output>/dladmm``."""
    try:
        config = _load(config_path)
        train_data = _split(config, "train", config.data.train_subsample)
        test_data = _split(config, "test", config.data.test_subsample)
        out = config.output.resolved_dir() / "dladmm"
        out.mkdir(parents=True, exist_ok=True)
        (out / "config.json").write_text(config.dump() + "\n", encoding="utf-8")

        with MetricsWriter(out / f"metrics.{config.output.metrics_format}", config.output.metrics_format) as writer:
            state, history = train(
                config.model,
                config.hyper,
                train_data,
                risk_spec=config.risk,
                test_data=test_data,
                on_record=writer.write,
            )
        if config.output.checkpoint:
            save_checkpoint(out / "model.ckpt", state.W, state.b, config.model)
        summary = summarize(history)
        write_summary(out / "summary.json", summary)
        _report("dlADMM run", summary)
        console.print(f"[green]Results written to {out}[/green]")
        return 0
    except Exception as e:
        return _fail(e)


def cmd_baseline(config_path: Path) -> int:
    """Train the configured first-order optimizer; outputs go to ``<output>/<kind>``."""
    try:
        config = _load(config_path)
        train_data = _split(config, "train", config.data.train_subsample)
        test_data = _split(config, "test", config.data.test_subsample)
        spec = config.baseline
        out = config.output.resolved_dir() / spec.kind.value
        out.mkdir(parents=True, exist_ok=True)
        (out / "config.json").write_text(config.dump() + "\n", encoding="utf-8")

        with MetricsWriter(out / f"metrics.{config.output.metrics_format}", config.output.metrics_format) as writer:
            state, history = train_baseline(
                config.model,
                spec,
                train_data,
                seed=config.hyper.seed,
                test_data=test_data,
                on_record=writer.write,
            )
        if config.output.checkpoint:
            save_checkpoint(out / "model.ckpt", state.weights, state.biases, config.model)
        summary = summarize(history)
        write_summary(out / "summary.json", summary)
        _report(f"{spec.kind.value} run", summary)
        console.print(f"[green]Results written to {out}[/green]")
        return 0
    except Exception as e:
        return _fail(e)


def cmd_bench_scaling(config_path: Path) -> int:
    """Time dlADMM iterations across hidden widths and sample counts; write two CSV tables."""
    try:
        config = _load(config_path)
        bench = config.bench
        needed = max(bench.fixed_samples, *bench.sample_counts)
        data = _split(config, "train", needed)
        neurons, samples = run_scaling(bench, config.hyper, config.risk, data)
        out = config.output.resolved_dir() / "bench"
        write_table(out / NEURONS_FILE, neurons)
        write_table(out / SAMPLES_FILE, samples)

        for title, rows in (("Seconds per iteration vs hidden width", neurons), ("Seconds per iteration vs samples", samples)):
            table = Table(title=title)
            for column in ("rho", "hidden", "samples", "mean_seconds"):
                table.add_column(column)
            for row in rows:
                table.add_row(f"{row['rho']:.0e}", str(row["hidden"]), str(row["samples"]), f"{row['mean_seconds']:.4f}")
            console.print(table)
        console.print(f"[green]Tables written to {out}[/green]")
        return 0
    except Exception as e:
        return _fail(e)


def cmd_eval(checkpoint_path: Path, config_path: Path) -> int:
    """Print the checkpoint's accuracy on the config's test split."""
    try:
        checkpoint = load_checkpoint(checkpoint_path)
        config = _load(config_path)
        test_data = _split(config, "test", config.data.test_subsample)
        arch = checkpoint.arch
        if arch.layer_dims[0] != test_data.num_features or arch.layer_dims[-1] != test_data.num_classes:
            raise ShapeError(f"checkpoint maps {arch.layer_dims[0]} -> {arch.layer_dims[-1]}, data is {test_data.num_features} -> {test_data.num_classes}")
        value = accuracy(checkpoint.weights, checkpoint.biases, arch, test_data.x, test_data.y)
        console.print(f"test accuracy: {value:.6f} ({test_data.num_samples} samples)")
        return 0
    except Exception as e:
        return _fail(e)


@click.group()
@click.version_option(version=__version__)
@click.option("--log-level", envvar="DLADMM_LOG_LEVEL", default="INFO", show_default=True, help="Logging level")
def main(log_level: str) -> None:
    """dladmm - train fully-connected networks with backward/forward ADMM."""
    configure_logging(log_level)


@main.command("train")
@click.argument("config_path", type=click.Path(dir_okay=False, path_type=Path))
def train_cmd(config_path: Path) -> None:
    """Train with dlADMM from a run config."""
    sys.exit(cmd_train(config_path))


@main.command("baseline")
@click.argument("config_path", type=click.Path(dir_okay=False, path_type=Path))
def baseline_cmd(config_path: Path) -> None:
    """Train the config's baseline optimizer (SGD, Adagrad, Adadelta or Adam)."""
    sys.exit(cmd_baseline(config_path))


@main.command("bench")
@click.argument("config_path", type=click.Path(dir_okay=False, path_type=Path))
def bench_cmd(config_path: Path) -> None:
    """Run the per-iteration scaling benchmark."""
    sys.exit(cmd_bench_scaling(config_path))


@main.command("eval")
@click.argument("checkpoint_path", type=click.Path(dir_okay=False, path_type=Path))
@click.argument("config_path", type=click.Path(dir_okay=False, path_type=Path))
def eval_cmd(checkpoint_path: Path, config_path: Path) -> None:
    """Evaluate a checkpoint on the test split named by a run config."""
    sys.exit(cmd_eval(checkpoint_path, config_path))


if __name__ == "__main__":
    main()
