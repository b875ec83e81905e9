"""Shared fixtures: tiny random networks, IDX writers and throwaway dataset directories."""

from __future__ import annotations

import gzip
import json
import os
import struct
from collections.abc import Callable
from pathlib import Path
from typing import Any

import numpy as np
import pytest

from dladmm.admm.model import Activation, Architecture, NetState
from dladmm.data.dataset import Dataset

MNIST_DIR_ENV = "DLADMM_MNIST_DIR"

TOY_SIDE = 4
TOY_CLASSES = 3
TOY_TRAIN = 30
TOY_TEST = 12


def write_idx(path: Path, array: np.ndarray, *, compress: bool = False) -> Path:
    """Write ``array`` (unsigned bytes) as an IDX file."""
    data = np.ascontiguousarray(array, dtype=np.uint8)
    raw = struct.pack(">HBB", 0, 0x08, data.ndim) + struct.pack(f">{data.ndim}I", *data.shape) + data.tobytes()
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(gzip.compress(raw) if compress else raw)
    return path


def write_split(directory: Path, prefix: str, images: np.ndarray, labels: np.ndarray, *, compress: bool = False) -> None:
    suffix = ".gz" if compress else ""
    write_idx(directory / f"{prefix}-images-idx3-ubyte{suffix}", images, compress=compress)
    write_idx(directory / f"{prefix}-labels-idx1-ubyte{suffix}", labels, compress=compress)


def random_state(
    seed: int,
    dims: tuple[int, ...] = (3, 4, 3, 2),
    num_samples: int = 5,
    activation: Activation = Activation.RELU,
) -> NetState:
    """A state with every variable drawn independently, so no penalty term is zero."""
    rng = np.random.default_rng(seed)
    arch = Architecture(layer_dims=dims, activation=activation, leaky_slope=0.1)
    labels = rng.integers(0, dims[-1], size=num_samples)
    y = np.zeros((dims[-1], num_samples))
    y[labels, np.arange(num_samples)] = 1.0
    return NetState(
        arch=arch,
        W=[rng.normal(size=(dims[i + 1], dims[i])) for i in range(len(dims) - 1)],
        b=[rng.normal(size=dims[i + 1]) for i in range(len(dims) - 1)],
        z=[rng.normal(size=(n, num_samples)) for n in dims[1:]],
        a=[rng.normal(size=(n, num_samples)) for n in dims[1:-1]],
        u=rng.normal(size=(dims[-1], num_samples)),
        x=rng.uniform(size=(dims[0], num_samples)),
        y=y,
    )


def toy_dataset(seed: int = 0, num_samples: int = 24, features: int = 6, classes: int = 3) -> Dataset:
    """Separable-ish random data: each class shifts a different block of features."""
    rng = np.random.default_rng(seed)
    labels = np.arange(num_samples) % classes
    x = rng.uniform(0.0, 0.3, size=(features, num_samples))
    for k in range(classes):
        x[k * features // classes : (k + 1) * features // classes, labels == k] += 0.7
    y = np.zeros((classes, num_samples))
    y[labels, np.arange(num_samples)] = 1.0
    return Dataset(x=x, y=y, name="toy")


@pytest.fixture
def make_state() -> Callable[..., NetState]:
    return random_state


@pytest.fixture
def toy_data() -> Dataset:
    return toy_dataset()


@pytest.fixture
def idx_dir(tmp_path: Path) -> Path:
    """A tiny MNIST-style directory: 4x4 images, 3 classes, 30 train and 12 test samples."""
    rng = np.random.default_rng(7)
    directory = tmp_path / "toy_idx"
    for prefix, count in (("train", TOY_TRAIN), ("t10k", TOY_TEST)):
        labels = (np.arange(count) % TOY_CLASSES).astype(np.uint8)
        images = rng.integers(0, 60, size=(count, TOY_SIDE, TOY_SIDE)).astype(np.uint8)
        for k in range(TOY_CLASSES):
            images[labels == k, k, :] = 255
        write_split(directory, prefix, images, labels)
    return directory


@pytest.fixture
def make_config(tmp_path: Path, idx_dir: Path) -> Callable[..., Path]:
    """Write a toy run config; keyword arguments replace whole sections."""

    def _make(name: str = "run.json", **sections: Any) -> Path:
        config: dict[str, Any] = {
            "data": {"name": "mnist", "dir": str(idx_dir), "num_classes": TOY_CLASSES, "seed": 0},
            "model": {"layer_dims": [TOY_SIDE * TOY_SIDE, 5, TOY_CLASSES]},
            "hyper": {"nu": 1e-3, "rho0": 1.0, "max_iters": 3, "seed": 0},
            "baseline": {"kind": "adam", "epochs": 4},
            "bench": {
                "hidden_sizes": [3, 6],
                "sample_counts": [10, 20],
                "rhos": [1.0],
                "hidden_layers": 1,
                "fixed_samples": 10,
                "fixed_hidden": 3,
                "warmup_iters": 1,
                "timed_iters": 5,
            },
            "output": {"dir": str(tmp_path / "out"), "metrics_format": "csv"},
        }
        config.update(sections)
        path = tmp_path / name
        path.write_text(json.dumps(config), encoding="utf-8")
        return path

    return _make


@pytest.fixture(scope="session")
def mnist_dir() -> Path:
    """Real MNIST directory from ``DLADMM_MNIST_DIR``; skips when unset."""
    value = os.environ.get(MNIST_DIR_ENV)
    if not value or not Path(value).is_dir():
        pytest.skip(f"{MNIST_DIR_ENV} not set")
    return Path(value)


@pytest.fixture
def make_data() -> Callable[..., Dataset]:
    return toy_dataset
