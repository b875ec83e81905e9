"""Reader for the IDX container used by MNIST and Fashion-MNIST.

Layout (big-endian)::

    u16   0x0000
    u8    element type (0x08 = unsigned byte, the only one supported)
    u8    number of dimensions d
    u32   size of each dimension, d times
    u8[]  payload, row-major

Gzip-compressed files are detected by their ``1f 8b`` prefix and decompressed
transparently.
"""

from __future__ import annotations

import gzip
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numpy.typing import NDArray

from dladmm.errors import DatasetError, IdxFormatError

UBYTE = 0x08
IMAGES_MAGIC = 0x00000803
LABELS_MAGIC = 0x00000801
MAX_DIMS = 3
MAX_ELEMENTS = 1 << 31
GZIP_PREFIX = b"\x1f\x8b"


@dataclass(frozen=True)
class IdxTensor:
    dims: tuple[int, ...]
    data: NDArray[np.uint8]

    @property
    def magic(self) -> int:
        return (UBYTE << 8) | len(self.dims)


def parse_idx(raw: bytes, source: str = "<bytes>") -> IdxTensor:
    """Decode an in-memory IDX blob.

    Raises:
        IdxFormatError: Bad magic, unsupported element type or rank, truncated or
            oversized payload.

    """
    if len(raw) < 4:
        raise IdxFormatError(f"{source}: truncated header ({len(raw)} bytes)")
    zero, dtype, ndim = struct.unpack(">HBB", raw[:4])
    if zero != 0 or dtype != UBYTE or not 1 <= ndim <= MAX_DIMS:
        raise IdxFormatError(f"{source}: bad magic 0x{struct.unpack('>I', raw[:4])[0]:08x}")

    header_end = 4 + 4 * ndim
    if len(raw) < header_end:
        raise IdxFormatError(f"{source}: truncated dimension table")
    dims = struct.unpack(f">{ndim}I", raw[4:header_end])

    count = 1
    for size in dims:
        count *= size
        if count > MAX_ELEMENTS:
            raise IdxFormatError(f"{source}: dimensions {list(dims)} overflow the element limit")

    payload = len(raw) - header_end
    if payload < count:
        raise IdxFormatError(f"{source}: truncated payload ({payload} of {count} bytes)")
    if payload > count:
        raise IdxFormatError(f"{source}: {payload - count} trailing bytes after payload")

    data = np.frombuffer(raw, dtype=np.uint8, count=count, offset=header_end).reshape(dims)
    return IdxTensor(dims=tuple(dims), data=data)


def load_idx(path: str | Path) -> IdxTensor:
    """Read and decode an IDX file, gunzipping it first if needed."""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as e:
        raise DatasetError(f"cannot read {path}: {e.strerror or e}") from e
    if raw[:2] == GZIP_PREFIX:
        try:
            raw = gzip.decompress(raw)
        except (OSError, EOFError) as e:
            raise IdxFormatError(f"{path}: corrupt gzip stream") from e
    return parse_idx(raw, source=str(path))
