"""Embedding datasets: container, binary/CSV loaders, and synthetic generators.

The on-disk binary format ("EMB1") is fixed little-endian and versioned:

    offset  size        field
    0       4           magic bytes b"EMB1"
    4       4           format version, u32 (currently 1)
    8       4           n, u32 (row count)
    12      4           d, u32 (embedding width)
    16      4           n_classes, u32
    20      4*n*d       x, float32, row-major
    20+4nd  4*n         y, u32 labels

A file must end exactly after the label block; loaders reject short reads,
trailing bytes, foreign magic, unknown versions, and out-of-range labels.
"""

from __future__ import annotations

import csv
import struct
from dataclasses import dataclass

import numpy as np

MAGIC = b"EMB1"
VERSION = 1
_HEADER = struct.Struct("<4sIIII")


@dataclass
class EmbeddingSet:
    """A labeled embedding matrix: x (n, d) real, y (n,) integer class ids."""

    x: np.ndarray
    y: np.ndarray
    n_classes: int
    name: str = ""

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def dim(self) -> int:
        return self.x.shape[1]

    def validate(self) -> "EmbeddingSet":
        if self.x.ndim != 2:
            raise ValueError(f"x must be 2-d, got shape {self.x.shape}")
        if self.y.ndim != 1 or self.y.shape[0] != self.x.shape[0]:
            raise ValueError(
                f"y must be ({self.x.shape[0]},), got shape {self.y.shape}"
            )
        if self.n_classes < 1:
            raise ValueError(f"n_classes must be >= 1, got {self.n_classes}")
        if not np.all(np.isfinite(self.x)):
            raise ValueError("x contains non-finite values")
        if self.y.size and (self.y.min() < 0 or self.y.max() >= self.n_classes):
            raise ValueError(
                f"labels must lie in [0, {self.n_classes}), got range "
                f"[{self.y.min()}, {self.y.max()}]"
            )
        return self


def save_emb(data: EmbeddingSet, path) -> None:
    """Write an EmbeddingSet in the EMB1 binary format."""
    data.validate()
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, data.n, data.dim, data.n_classes))
        fh.write(np.ascontiguousarray(data.x, dtype="<f4").tobytes())
        fh.write(np.ascontiguousarray(data.y, dtype="<u4").tobytes())


def load_emb(path) -> EmbeddingSet:
    """Read an EMB1 file; raises ValueError on any malformed content."""
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < _HEADER.size:
        raise ValueError(f"{path}: truncated header ({len(blob)} bytes)")
    magic, version, n, d, n_classes = _HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise ValueError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise ValueError(f"{path}: unsupported format version {version}")
    expected = _HEADER.size + 4 * n * d + 4 * n
    if len(blob) < expected:
        raise ValueError(
            f"{path}: truncated payload ({len(blob)} bytes, expected {expected})"
        )
    if len(blob) > expected:
        raise ValueError(
            f"{path}: {len(blob) - expected} trailing bytes after payload"
        )
    x = np.frombuffer(blob, dtype="<f4", count=n * d, offset=_HEADER.size)
    y = np.frombuffer(blob, dtype="<u4", count=n, offset=_HEADER.size + 4 * n * d)
    out = EmbeddingSet(
        x=x.reshape(n, d).astype(np.float32),
        y=y.astype(np.int64),
        n_classes=n_classes,
        name=str(path),
    )
    return out.validate()


def load_csv(path, n_classes: int | None = None) -> EmbeddingSet:
    """Read a header + "f1,...,fd,label" CSV; errors carry 1-based line numbers."""
    rows: list[list[float]] = []
    labels: list[int] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or len(header) < 2:
            raise ValueError(f"{path}: header must name at least one feature and a label")
        width = len(header)
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != width:
                raise ValueError(
                    f"{path}: line {lineno}: expected {width} fields, got {len(row)}"
                )
            try:
                feats = [float(v) for v in row[:-1]]
                label = int(row[-1])
            except ValueError as exc:
                raise ValueError(f"{path}: line {lineno}: {exc}") from None
            if label < 0:
                raise ValueError(f"{path}: line {lineno}: negative label {label}")
            if n_classes is not None and label >= n_classes:
                raise ValueError(
                    f"{path}: line {lineno}: label {label} >= n_classes {n_classes}"
                )
            rows.append(feats)
            labels.append(label)
    x = np.asarray(rows, dtype=np.float64).reshape(len(rows), width - 1)
    y = np.asarray(labels, dtype=np.int64)
    if n_classes is None:
        n_classes = int(y.max()) + 1 if y.size else 1
    return EmbeddingSet(x=x, y=y, n_classes=n_classes, name=str(path)).validate()


def synth_gaussian_clusters(n: int, d: int, n_classes: int, sep: float,
                            seed: int = 0) -> EmbeddingSet:
    """Unit-variance Gaussian blobs, one per class, means of norm sep.

    Mean directions are mutually orthonormal (QR of a seeded Gaussian draw),
    so any two class means sit sep * sqrt(2) apart; when n_classes exceeds d
    the surplus means fall back to independent random unit directions.
    Counts are balanced: the first n mod n_classes classes get one extra row.
    Rows are then shuffled so no class-sorted structure survives.
    """
    if n < n_classes:
        raise ValueError(f"need at least one sample per class ({n} < {n_classes})")
    if d < 1 or n_classes < 1:
        raise ValueError("d and n_classes must be >= 1")
    if sep < 0:
        raise ValueError(f"sep must be >= 0, got {sep}")
    rng = np.random.default_rng(seed)
    n_ortho = min(n_classes, d)
    q, r = np.linalg.qr(rng.standard_normal((d, n_ortho)))
    q = q * np.sign(np.diag(r))  # canonical column signs
    means = np.zeros((n_classes, d))
    means[:n_ortho] = sep * q.T
    for c in range(d, n_classes):
        v = rng.standard_normal(d)
        means[c] = sep * v / np.linalg.norm(v)
    base, extra = divmod(n, n_classes)
    xs, ys = [], []
    for c in range(n_classes):
        rows = base + (1 if c < extra else 0)
        xs.append(means[c] + rng.standard_normal((rows, d)))
        ys.append(np.full(rows, c, dtype=np.int64))
    x = np.concatenate(xs)
    y = np.concatenate(ys)
    perm = rng.permutation(n)
    return EmbeddingSet(
        x=x[perm], y=y[perm], n_classes=n_classes, name=f"clusters(n={n},d={d},k={n_classes},sep={sep})"
    ).validate()


def synth_periodic(n: int, d: int, freq: float, seed: int = 0) -> EmbeddingSet:
    """Binary labels from a sign-of-sine rule on the first coordinate.

    x ~ U(-pi, pi)^d and y = 1 where sin(freq * x_0) > 0.  For freq > 1 the
    positive region is a union of disjoint bands in x_0, which no single
    affine threshold on the inputs can track.
    """
    if n < 1 or d < 1:
        raise ValueError("n and d must be >= 1")
    if not freq > 0:
        raise ValueError(f"freq must be positive, got {freq}")
    rng = np.random.default_rng(seed)
    x = rng.uniform(-np.pi, np.pi, (n, d))
    y = (np.sin(freq * x[:, 0]) > 0).astype(np.int64)
    return EmbeddingSet(
        x=x, y=y, n_classes=2, name=f"periodic(n={n},d={d},freq={freq})"
    ).validate()


def stratified_split(data: EmbeddingSet, fractions, seed: int = 0):
    """Split per class by largest-remainder apportionment; exact partition.

    ``fractions`` must be non-negative and sum to 1 within 1e-9.  Each class
    is permuted with default_rng(seed) and dealt to the splits so that split
    sizes within the class differ from frac * count by less than 1; remainder
    seats go to the largest fractional parts, ties toward the split furthest
    below its overall proportional target (then the earlier split), so equal
    classes spread their spare rows instead of piling onto one split.
    Every class must have at least as many rows as there are positive
    fractions.  Returns one EmbeddingSet per fraction; the union of the
    splits is exactly the input multiset.
    """
    fr = np.asarray(fractions, dtype=np.float64)
    if fr.ndim != 1 or fr.size < 1:
        raise ValueError("fractions must be a non-empty 1-d sequence")
    if np.any(fr < -1e-9):
        raise ValueError(f"fractions must be non-negative, got {fractions}")
    if abs(fr.sum() - 1.0) > 1e-9:
        raise ValueError(f"fractions must sum to 1, got sum {fr.sum()!r}")
    fr = np.clip(fr, 0.0, None)
    positive = int((fr > 0).sum())
    data.validate()
    rng = np.random.default_rng(seed)
    buckets: list[list[np.ndarray]] = [[] for _ in fr]
    assigned = np.zeros(fr.size, dtype=np.int64)
    for c in range(data.n_classes):
        idx = np.flatnonzero(data.y == c)
        if idx.size == 0:
            continue
        if idx.size < positive:
            raise ValueError(
                f"class {c} has {idx.size} rows, fewer than the {positive} "
                f"positive split fractions"
            )
        idx = rng.permutation(idx)
        quota = fr * idx.size
        counts = np.floor(quota).astype(np.int64)
        short = idx.size - int(counts.sum())
        if short:
            deficit = fr * data.n - (assigned + counts)
            order = sorted(range(fr.size),
                           key=lambda s: (-(quota[s] - counts[s]), -deficit[s], s))
            counts[order[:short]] += 1
        assigned += counts
        pos = 0
        for s, cnt in enumerate(counts):
            buckets[s].append(idx[pos : pos + cnt])
            pos += cnt
    names = ("train", "val", "test")
    out = []
    for s in range(fr.size):
        sel = np.concatenate(buckets[s]) if buckets[s] else np.empty(0, dtype=np.int64)
        sel = rng.permutation(sel)
        label = names[s] if s < len(names) else f"split{s}"
        out.append(
            EmbeddingSet(
                x=data.x[sel], y=data.y[sel], n_classes=data.n_classes,
                name=f"{data.name}/{label}" if data.name else label,
            )
        )
    return tuple(out)
