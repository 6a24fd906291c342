"""Frozen transformer embeddings -> EMB1 files for linear probing."""

from .emb_io import read_emb, write_emb
from .export import (
    ExportSpec,
    carve_splits,
    embed_texts,
    export_dataset,
    export_embeddings,
    export_split,
    load_backbone,
    load_split_texts,
    stratified_indices,
    validate_backbone,
)
from .registry import (
    BACKBONES,
    DATASETS,
    HIDDEN_DIM,
    DatasetSpec,
    resolve_backbone,
    resolve_dataset,
)

__version__ = "0.1.0"

__all__ = [
    "BACKBONES",
    "DATASETS",
    "DatasetSpec",
    "ExportSpec",
    "HIDDEN_DIM",
    "carve_splits",
    "embed_texts",
    "export_dataset",
    "export_embeddings",
    "export_split",
    "load_backbone",
    "load_split_texts",
    "read_emb",
    "resolve_backbone",
    "resolve_dataset",
    "stratified_indices",
    "validate_backbone",
    "write_emb",
]
