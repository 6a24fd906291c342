"""EMB1 file writing (and reading, for self-checks).

This is the interchange format the probing package consumes.  Layout,
little-endian throughout:

    bytes 0-3    magic "EMB1"
    bytes 4-7    version u32 = 1
    bytes 8-11   n u32
    bytes 12-15  d u32
    bytes 16-19  n_classes u32
    then         n*d f32, row-major
    then         n u32 labels
"""

import struct

import numpy as np

MAGIC = b"EMB1"
VERSION = 1
_HEADER = struct.Struct("<4sIIII")


def write_emb(path, x: np.ndarray, y: np.ndarray, n_classes: int) -> None:
    x = np.ascontiguousarray(x, dtype=np.float32)
    y = np.asarray(y)
    if x.ndim != 2:
        raise ValueError(f"x must be 2-d, got shape {x.shape}")
    if y.shape != (x.shape[0],):
        raise ValueError(f"{x.shape[0]} rows but {y.shape} labels")
    if n_classes < 1:
        raise ValueError(f"n_classes must be >= 1, got {n_classes}")
    if not np.all(np.isfinite(x)):
        raise ValueError("refusing to write non-finite embeddings")
    if y.size and (y.min() < 0 or y.max() >= n_classes):
        raise ValueError(
            f"labels must lie in [0, {n_classes}), got range "
            f"[{y.min()}, {y.max()}]"
        )
    n, d = x.shape
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, n, d, n_classes))
        fh.write(x.tobytes())
        fh.write(y.astype("<u4").tobytes())


def read_emb(path):
    """Load one EMB1 file; returns (x f32 [n,d], y int64 [n], n_classes)."""
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < _HEADER.size:
        raise ValueError(f"{path}: truncated header ({len(blob)} bytes)")
    magic, version, n, d, n_classes = _HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise ValueError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise ValueError(f"{path}: unsupported version {version}")
    want = _HEADER.size + n * d * 4 + n * 4
    if len(blob) != want:
        raise ValueError(f"{path}: expected {want} bytes, have {len(blob)}")
    x = np.frombuffer(blob, dtype="<f4", count=n * d,
                      offset=_HEADER.size).reshape(n, d).copy()
    y = np.frombuffer(blob, dtype="<u4", count=n,
                      offset=_HEADER.size + n * d * 4).astype(np.int64)
    if y.size and y.max() >= n_classes:
        raise ValueError(f"{path}: label {y.max()} >= n_classes {n_classes}")
    return x, y, n_classes
