"""Normalized, one-hot datasets built from IDX image/label pairs."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal

import numpy as np
from numpy.typing import NDArray

from dladmm.data.idx import load_idx
from dladmm.errors import DatasetError

logger = logging.getLogger(__name__)

Split = Literal["train", "test"]

SPLIT_FILES: dict[str, tuple[str, str]] = {
    "train": ("train-images-idx3-ubyte", "train-labels-idx1-ubyte"),
    "test": ("t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte"),
}

# MNIST trains on the first 55,000 rows of its 60,000-row file.
MNIST_RAW_TRAIN_ROWS = 60_000
MNIST_TRAIN_ROWS = 55_000


@dataclass
class Dataset:
    """Samples as columns: ``x`` is ``n_0 x N`` in [0, 1], ``y`` is one-hot ``K x N``."""

    x: NDArray[np.float64] = field(repr=False)
    y: NDArray[np.float64] = field(repr=False)
    name: str = "dataset"

    @property
    def num_samples(self) -> int:
        return int(self.x.shape[1])

    @property
    def num_features(self) -> int:
        return int(self.x.shape[0])

    @property
    def num_classes(self) -> int:
        return int(self.y.shape[0])

    @property
    def labels(self) -> NDArray[np.int64]:
        return np.argmax(self.y, axis=0)


def one_hot(labels: NDArray[np.integer], num_classes: int) -> NDArray[np.float64]:
    labels = np.asarray(labels, dtype=np.int64)
    if labels.size and (labels.min() < 0 or labels.max() >= num_classes):
        raise DatasetError(f"labels must lie in [0, {num_classes}), got range [{labels.min()}, {labels.max()}]")
    encoded = np.zeros((num_classes, labels.size))
    encoded[labels, np.arange(labels.size)] = 1.0
    return encoded


def prepare(
    images: NDArray[np.uint8],
    labels: NDArray[np.integer],
    num_classes: int,
    subsample_n: int | None = None,
    seed: int = 0,
    name: str = "dataset",
) -> Dataset:
    """Scale pixels by 1/255, one-hot the labels and optionally subsample columns.

    Args:
        images: ``N x ...`` array of unsigned bytes; trailing axes are flattened.
        labels: ``N`` class indices.
        num_classes: Number of one-hot rows ``K``.
        subsample_n: Keep ``n`` samples picked by a seeded shuffle; ``None`` keeps all
            samples in file order.
        seed: Shuffle seed.
        name: Dataset name carried into the result.

    Raises:
        DatasetError: Counts disagree, a label is out of range or ``subsample_n`` is
            larger than the data.

    """
    images = np.asarray(images)
    labels = np.asarray(labels)
    count = images.shape[0]
    if labels.shape[0] != count:
        raise DatasetError(f"{count} images but {labels.shape[0]} labels")

    y = one_hot(labels, num_classes)
    x = images.reshape(count, -1).T.astype(np.float64) / 255.0

    if subsample_n is not None:
        if not 1 <= subsample_n <= count:
            raise DatasetError(f"cannot subsample {subsample_n} of {count} samples")
        keep = np.random.default_rng(seed).permutation(count)[:subsample_n]
        x, y = x[:, keep], y[:, keep]

    return Dataset(x=np.ascontiguousarray(x), y=np.ascontiguousarray(y), name=name)


def split_paths(directory: str | Path, split: Split) -> tuple[Path, Path]:
    """Image and label files of ``split``, preferring the uncompressed name."""
    directory = Path(directory)
    resolved: list[Path] = []
    for stem in SPLIT_FILES[split]:
        plain = directory / stem
        gzipped = directory / f"{stem}.gz"
        if plain.is_file():
            resolved.append(plain)
        elif gzipped.is_file():
            resolved.append(gzipped)
        else:
            raise DatasetError(f"missing {split} file {plain} (or {gzipped.name})")
    return resolved[0], resolved[1]


def load_split(
    directory: str | Path,
    name: str,
    split: Split,
    *,
    num_classes: int = 10,
    subsample_n: int | None = None,
    seed: int = 0,
) -> Dataset:
    """Load one split of an MNIST-style dataset directory."""
    image_path, label_path = split_paths(directory, split)
    images = load_idx(image_path)
    labels = load_idx(label_path)
    if len(images.dims) != 3 or len(labels.dims) != 1:
        raise DatasetError(f"{split} split needs 3-D images and 1-D labels, got {list(images.dims)} and {list(labels.dims)}")

    image_data, label_data = images.data, labels.data
    if name == "mnist" and split == "train" and image_data.shape[0] == MNIST_RAW_TRAIN_ROWS:
        image_data, label_data = image_data[:MNIST_TRAIN_ROWS], label_data[:MNIST_TRAIN_ROWS]

    dataset = prepare(image_data, label_data, num_classes, subsample_n=subsample_n, seed=seed, name=f"{name}-{split}")
    logger.info("loaded %s: %d samples x %d features", dataset.name, dataset.num_samples, dataset.num_features)
    return dataset
