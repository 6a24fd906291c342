"""Frozen-backbone embedding extraction.

The backbone is used strictly as a feature extractor: weights frozen, eval
mode, no gradients.  Each text is represented by the final hidden state at
the first token position (for encoder-decoder models, the encoder's final
state), which is the usual convention for sentence-level classification.
"""

import os
from dataclasses import dataclass

import numpy as np
import torch

from .emb_io import write_emb
from .registry import HIDDEN_DIM, resolve_backbone, resolve_dataset

SPLITS = ("train", "val", "test")


@dataclass(frozen=True)
class ExportSpec:
    backbone: str
    dataset: str
    limits: tuple[int | None, int | None, int | None] = (None, None, None)
    max_length: int = 512
    batch_size: int = 32
    seed: int = 0
    out_dir: str = "."

    def __post_init__(self):
        if len(self.limits) != len(SPLITS):
            raise ValueError(f"need one limit per split {SPLITS}, got {self.limits}")
        for lim in self.limits:
            if lim is not None and lim < 1:
                raise ValueError(f"limits must be positive or None, got {lim}")
        if self.max_length < 1 or self.batch_size < 1:
            raise ValueError("max_length and batch_size must be >= 1")

    def out_path(self, split: str) -> str:
        return os.path.join(self.out_dir, f"{self.dataset}_{self.backbone}.{split}.emb")


def validate_backbone(model) -> None:
    width = getattr(model.config, "hidden_size", None)
    if width != HIDDEN_DIM:
        raise ValueError(
            f"backbone hidden dimension is {width}, need {HIDDEN_DIM}"
        )


def load_backbone(name: str):
    """Fetch tokenizer and frozen model from the hub; returns (tokenizer, model)."""
    from transformers import AutoModel, AutoTokenizer

    hf_id = resolve_backbone(name)
    tokenizer = AutoTokenizer.from_pretrained(hf_id)
    model = AutoModel.from_pretrained(hf_id)
    model.eval()
    for p in model.parameters():
        p.requires_grad_(False)
    validate_backbone(model)
    return tokenizer, model


def embed_texts(model, tokenizer, texts, max_length: int = 512,
                batch_size: int = 32) -> np.ndarray:
    """First-token embeddings for a sequence of strings; (n, hidden) f32."""
    validate_backbone(model)
    if getattr(model.config, "is_encoder_decoder", False):
        model = model.get_encoder()
    model.eval()
    chunks = []
    with torch.no_grad():
        for start in range(0, len(texts), batch_size):
            batch = list(texts[start : start + batch_size])
            enc = tokenizer(batch, padding=True, truncation=True,
                            max_length=max_length, return_tensors="pt")
            out = model(**{k: v for k, v in enc.items()
                           if k in ("input_ids", "attention_mask", "token_type_ids")})
            first = out.last_hidden_state[:, 0, :]
            chunks.append(first.to(torch.float32).cpu().numpy())
    if not chunks:
        return np.zeros((0, HIDDEN_DIM), dtype=np.float32)
    vecs = np.concatenate(chunks, axis=0)
    if not np.all(np.isfinite(vecs)):
        raise ValueError("backbone produced non-finite embeddings")
    return vecs


def stratified_indices(labels: np.ndarray, limit: int | None, seed: int) -> np.ndarray:
    """Pick ``limit`` rows with per-class largest-remainder quotas; sorted.

    limit None (or >= n) keeps everything.  The draw within each class is a
    seeded permutation, so the selection is deterministic per seed.
    """
    labels = np.asarray(labels)
    n = labels.size
    if limit is None or limit >= n:
        return np.arange(n)
    if limit < 1:
        raise ValueError(f"limit must be positive, got {limit}")
    rng = np.random.default_rng(seed)
    classes, counts = np.unique(labels, return_counts=True)
    quota = counts * (limit / n)
    take = np.floor(quota).astype(np.int64)
    short = limit - int(take.sum())
    if short:
        order = np.argsort(-(quota - take), kind="stable")
        take[order[:short]] += 1
    picked = []
    for cls, k in zip(classes, take):
        idx = np.flatnonzero(labels == cls)
        picked.append(rng.permutation(idx)[:k])
    return np.sort(np.concatenate(picked))


def carve_splits(labels: np.ndarray, train_limit: int | None,
                 val_limit: int | None, seed: int):
    """Disjoint (train_idx, val_idx) drawn from one labelled pool.

    Used when a corpus has no validation split: val rows are drawn first
    (offset seed), removed, and the train draw happens on the remainder.
    """
    labels = np.asarray(labels)
    n = labels.size
    if val_limit is None:
        raise ValueError("carving val from train requires an explicit val limit")
    if (train_limit or 0) + val_limit > n:
        raise ValueError(
            f"cannot carve {train_limit}+{val_limit} rows from {n}"
        )
    val_idx = stratified_indices(labels, val_limit, seed + 1)
    mask = np.ones(n, dtype=bool)
    mask[val_idx] = False
    rest = np.flatnonzero(mask)
    train_idx = rest[stratified_indices(labels[rest], train_limit, seed)]
    return train_idx, val_idx


def export_split(model, tokenizer, texts, labels, n_classes: int, path: str,
                 max_length: int = 512, batch_size: int = 32) -> str:
    labels = np.asarray(labels, dtype=np.int64)
    if labels.size and (labels.min() < 0 or labels.max() >= n_classes):
        raise ValueError(
            f"labels out of range for {n_classes} classes: "
            f"[{labels.min()}, {labels.max()}]"
        )
    vecs = embed_texts(model, tokenizer, texts, max_length=max_length,
                       batch_size=batch_size)
    write_emb(path, vecs, labels, n_classes)
    return path


def export_dataset(model, tokenizer, splits: dict, n_classes: int,
                   spec: ExportSpec) -> dict:
    """Embed and write one file per split; returns {split: path}.

    ``splits`` maps split name -> (texts, labels), already subsampled.
    """
    os.makedirs(spec.out_dir, exist_ok=True)
    paths = {}
    for split in SPLITS:
        if split not in splits:
            raise ValueError(f"missing split {split!r}")
        texts, labels = splits[split]
        paths[split] = export_split(
            model, tokenizer, texts, labels, n_classes, spec.out_path(split),
            max_length=spec.max_length, batch_size=spec.batch_size,
        )
    return paths


def _to_label_indices(values, ds) -> np.ndarray:
    if ds.label_names is not None:
        lookup = {name: i for i, name in enumerate(ds.label_names)}
        try:
            return np.asarray([lookup[v] for v in values], dtype=np.int64)
        except KeyError as exc:
            raise ValueError(f"unexpected label {exc.args[0]!r} for dataset") from None
    return np.asarray(values, dtype=np.int64)


def load_split_texts(ds, split_name: str):
    """Pull (texts, labels) for one hub split; requires the datasets extra."""
    try:
        from datasets import load_dataset
    except ImportError:
        raise ImportError(
            "loading hub corpora needs the 'datasets' package "
            "(pip install embed-export[hub])"
        ) from None
    args = (ds.path, ds.subset) if ds.subset else (ds.path,)
    table = load_dataset(*args, split=split_name)
    texts = list(table[ds.text_col])
    labels = _to_label_indices(table[ds.label_col], ds)
    return texts, labels


def export_embeddings(spec: ExportSpec) -> dict:
    """End-to-end: fetch backbone + corpus, subsample, embed, write EMB1."""
    ds = resolve_dataset(spec.dataset)
    tokenizer, model = load_backbone(spec.backbone)
    train_limit, val_limit, test_limit = spec.limits

    train_texts, train_labels = load_split_texts(ds, ds.train_split)
    if ds.val_split is not None:
        val_texts, val_labels = load_split_texts(ds, ds.val_split)
        keep = stratified_indices(val_labels, val_limit, spec.seed + 1)
        val = ([val_texts[i] for i in keep], val_labels[keep])
        keep = stratified_indices(train_labels, train_limit, spec.seed)
        train = ([train_texts[i] for i in keep], train_labels[keep])
    else:
        train_idx, val_idx = carve_splits(train_labels, train_limit,
                                          val_limit, spec.seed)
        train = ([train_texts[i] for i in train_idx], train_labels[train_idx])
        val = ([train_texts[i] for i in val_idx], train_labels[val_idx])

    test_texts, test_labels = load_split_texts(ds, ds.test_split)
    keep = stratified_indices(test_labels, test_limit, spec.seed + 2)
    test = ([test_texts[i] for i in keep], test_labels[keep])

    splits = {"train": train, "val": val, "test": test}
    return export_dataset(model, tokenizer, splits, ds.n_classes, spec)
