"""Binary file formats.

Dense tensor (``.stns``): magic ``STNS``, format version u16, order u16,
dims as u64 each, then the payload as little-endian IEEE-754 doubles in
dimensional order.

Blocked compact symmetric tensor (``.bcss``): magic ``BCSS``, version u16,
order u16, tensor dimension u64, block dimension u64, then the canonical
blocks in hypertriangle order, each as raw doubles in dimensional order.
The meta-grid is not serialized; it is reconstructed on load.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .dense import DenseTensor
from .indexing import hypertriangle_iter
from .storage import BcssTensor

_STNS_MAGIC = b"STNS"
_BCSS_MAGIC = b"BCSS"
_VERSION = 1


def save_tensor(t: DenseTensor, path) -> None:
    with open(path, "wb") as fh:
        fh.write(struct.pack("<4sHH", _STNS_MAGIC, _VERSION, t.order))
        fh.write(struct.pack(f"<{t.order}Q", *t.dims))
        fh.write(np.ascontiguousarray(t.data, dtype="<f8").tobytes())


def load_tensor(path) -> DenseTensor:
    raw = Path(path).read_bytes()
    magic, version, order = struct.unpack_from("<4sHH", raw, 0)
    if magic != _STNS_MAGIC:
        raise ValueError(f"not a dense tensor file (magic {magic!r})")
    if version != _VERSION:
        raise ValueError(f"unsupported dense tensor format version {version}")
    off = struct.calcsize("<4sHH")
    dims = struct.unpack_from(f"<{order}Q", raw, off)
    off += struct.calcsize(f"<{order}Q")
    flat = np.frombuffer(raw, dtype="<f8", offset=off)
    return DenseTensor.from_flat(flat.astype(np.float64), dims)


def save_bcss(a: BcssTensor, path) -> None:
    with open(path, "wb") as fh:
        fh.write(struct.pack("<4sHHQQ", _BCSS_MAGIC, _VERSION, a.order, a.n, a.b))
        for key in hypertriangle_iter(a.grid, a.order):
            block = a.blocks[key]
            fh.write(np.ascontiguousarray(block.reshape(-1, order="F"), dtype="<f8").tobytes())


def load_bcss(path) -> BcssTensor:
    raw = Path(path).read_bytes()
    magic, version, order, n, b = struct.unpack_from("<4sHHQQ", raw, 0)
    if magic != _BCSS_MAGIC:
        raise ValueError(f"not a blocked symmetric tensor file (magic {magic!r})")
    if version != _VERSION:
        raise ValueError(f"unsupported blocked tensor format version {version}")
    off = struct.calcsize("<4sHHQQ")
    block_elems = b**order
    blocks = {}
    for key in hypertriangle_iter(n // b, order):
        flat = np.frombuffer(raw, dtype="<f8", count=block_elems, offset=off)
        off += block_elems * 8
        blocks[key] = flat.astype(np.float64).reshape((b,) * order, order="F")
    return BcssTensor(order, n, b, blocks)
