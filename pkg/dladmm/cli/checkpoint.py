"""Binary model checkpoints.

Little-endian layout::

    8s   magic b"DLADMMCK"
    u32  format version (1)
    u32  layer count L
    u32  activation code (0 = relu, 1 = leaky_relu)
    f64  leaky slope
    then per layer l = 1..L:
        u32 rows n_l, u32 cols n_{l-1}
        f64[rows * cols]  W_l, row-major
        f64[rows]         b_l
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numpy.typing import NDArray

from dladmm.admm.model import Activation, Architecture
from dladmm.errors import CheckpointError

MAGIC = b"DLADMMCK"
VERSION = 1
HEADER = struct.Struct("<8sIIId")
LAYER_HEADER = struct.Struct("<II")
F64 = np.dtype("<f8")

ACTIVATION_CODES: dict[Activation, int] = {Activation.RELU: 0, Activation.LEAKY_RELU: 1}


@dataclass
class Checkpoint:
    arch: Architecture
    weights: list[NDArray[np.float64]]
    biases: list[NDArray[np.float64]]


def encode_checkpoint(weights: list[NDArray[np.float64]], biases: list[NDArray[np.float64]], arch: Architecture) -> bytes:
    if len(weights) != arch.num_layers or len(biases) != arch.num_layers:
        raise CheckpointError(f"expected {arch.num_layers} layers, got {len(weights)} weights and {len(biases)} biases")
    parts = [HEADER.pack(MAGIC, VERSION, arch.num_layers, ACTIVATION_CODES[arch.activation], arch.leaky_slope)]
    for weight, bias in zip(weights, biases, strict=True):
        rows, cols = weight.shape
        parts.append(LAYER_HEADER.pack(rows, cols))
        parts.append(np.ascontiguousarray(weight, dtype=F64).tobytes())
        parts.append(np.ascontiguousarray(bias, dtype=F64).tobytes())
    return b"".join(parts)


def decode_checkpoint(raw: bytes, source: str = "<bytes>") -> Checkpoint:
    """Parse checkpoint bytes.

    Raises:
        CheckpointError: Wrong magic or version, truncation, trailing bytes or
            inconsistent layer shapes.

    """
    if len(raw) < HEADER.size:
        raise CheckpointError(f"{source}: truncated header")
    magic, version, num_layers, code, slope = HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise CheckpointError(f"{source}: not a dladmm checkpoint (magic {magic!r})")
    if version != VERSION:
        raise CheckpointError(f"{source}: unsupported checkpoint version {version} (expected {VERSION})")
    activations = {value: key for key, value in ACTIVATION_CODES.items()}
    if code not in activations:
        raise CheckpointError(f"{source}: unknown activation code {code}")

    offset = HEADER.size
    weights: list[NDArray[np.float64]] = []
    biases: list[NDArray[np.float64]] = []
    dims: list[int] = []
    for layer in range(1, num_layers + 1):
        if len(raw) < offset + LAYER_HEADER.size:
            raise CheckpointError(f"{source}: truncated at layer {layer}")
        rows, cols = LAYER_HEADER.unpack_from(raw, offset)
        offset += LAYER_HEADER.size
        needed = (rows * cols + rows) * F64.itemsize
        if len(raw) < offset + needed:
            raise CheckpointError(f"{source}: truncated payload at layer {layer}")
        if dims and dims[-1] != cols:
            raise CheckpointError(f"{source}: layer {layer} expects {cols} inputs, previous layer has {dims[-1]} outputs")
        if not dims:
            dims.append(cols)
        dims.append(rows)
        weights.append(np.frombuffer(raw, dtype=F64, count=rows * cols, offset=offset).reshape(rows, cols).astype(np.float64))
        offset += rows * cols * F64.itemsize
        biases.append(np.frombuffer(raw, dtype=F64, count=rows, offset=offset).astype(np.float64))
        offset += rows * F64.itemsize
    if offset != len(raw):
        raise CheckpointError(f"{source}: {len(raw) - offset} trailing bytes")

    try:
        arch = Architecture(layer_dims=tuple(dims), activation=activations[code], leaky_slope=slope)
    except ValueError as e:
        raise CheckpointError(f"{source}: invalid architecture in header: {e}") from e
    return Checkpoint(arch=arch, weights=weights, biases=biases)


def save_checkpoint(path: Path, weights: list[NDArray[np.float64]], biases: list[NDArray[np.float64]], arch: Architecture) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(encode_checkpoint(weights, biases, arch))


def load_checkpoint(path: Path) -> Checkpoint:
    try:
        raw = path.read_bytes()
    except OSError as e:
        raise CheckpointError(f"cannot read checkpoint {path}: {e.strerror or e}") from e
    return decode_checkpoint(raw, source=str(path))
