"""Tests for the binary checkpoint container."""

import struct
from pathlib import Path

import numpy as np
import pytest

from dladmm.admm.model import Activation, Architecture
from dladmm.cli.checkpoint import HEADER, MAGIC, decode_checkpoint, encode_checkpoint, load_checkpoint, save_checkpoint
from dladmm.errors import CheckpointError


@pytest.fixture
def model() -> tuple[Architecture, list[np.ndarray], list[np.ndarray]]:
    rng = np.random.default_rng(0)
    arch = Architecture(layer_dims=(4, 3, 2), activation=Activation.LEAKY_RELU, leaky_slope=0.05)
    return arch, [rng.normal(size=(3, 4)), rng.normal(size=(2, 3))], [rng.normal(size=3), rng.normal(size=2)]


class TestCheckpoint:
    """Encoding, decoding and corruption handling."""

    def test_bit_exact_reload(self, model: tuple[Architecture, list[np.ndarray], list[np.ndarray]], tmp_path: Path) -> None:
        """Weights, biases and the architecture come back unchanged."""
        arch, W, b = model
        path = tmp_path / "model.ckpt"
        save_checkpoint(path, W, b, arch)
        loaded = load_checkpoint(path)
        assert loaded.arch == arch
        for saved, restored in zip([*W, *b], [*loaded.weights, *loaded.biases], strict=True):
            np.testing.assert_array_equal(saved, restored)

    def test_header_layout(self, model: tuple[Architecture, list[np.ndarray], list[np.ndarray]]) -> None:
        """Magic, version, layer count, activation code and slope lead the file."""
        arch, W, b = model
        raw = encode_checkpoint(W, b, arch)
        assert HEADER.unpack_from(raw) == (MAGIC, 1, 2, 1, 0.05)
        assert struct.unpack_from("<II", raw, HEADER.size) == (3, 4)
        assert len(raw) == HEADER.size + 2 * 8 + 8 * (12 + 3 + 6 + 2)

    def test_bad_magic(self, model: tuple[Architecture, list[np.ndarray], list[np.ndarray]]) -> None:
        """A corrupted header is rejected."""
        raw = bytearray(encode_checkpoint(*model[1:], model[0]))
        raw[0:2] = b"XX"
        with pytest.raises(CheckpointError, match="magic"):
            decode_checkpoint(bytes(raw))

    def test_version_mismatch(self, model: tuple[Architecture, list[np.ndarray], list[np.ndarray]]) -> None:
        """An unknown version is rejected."""
        raw = bytearray(encode_checkpoint(*model[1:], model[0]))
        raw[8:12] = struct.pack("<I", 2)
        with pytest.raises(CheckpointError, match="version"):
            decode_checkpoint(bytes(raw))

    def test_truncated_and_trailing(self, model: tuple[Architecture, list[np.ndarray], list[np.ndarray]]) -> None:
        """Missing or extra payload bytes are rejected."""
        raw = encode_checkpoint(*model[1:], model[0])
        with pytest.raises(CheckpointError, match="truncated"):
            decode_checkpoint(raw[:-1])
        with pytest.raises(CheckpointError, match="trailing"):
            decode_checkpoint(raw + b"\x00")

    def test_missing_file(self, tmp_path: Path) -> None:
        """An unreadable path is a checkpoint error."""
        with pytest.raises(CheckpointError):
            load_checkpoint(tmp_path / "none.ckpt")
