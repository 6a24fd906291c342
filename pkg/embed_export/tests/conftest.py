"""Shared offline fixtures: a tiny random-weight backbone and tokenizer.

Everything here is constructed locally from configs — no hub access — so
the suite runs in a sealed environment.  Widths stay at the real 768
because the exporter enforces that invariant.
"""

import os

import pytest
import torch
from transformers import DistilBertConfig, DistilBertModel, DistilBertTokenizer

VOCAB = [
    "[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]",
    "the", "a", "cat", "dog", "sat", "ran", "on", "mat", "rug",
    "good", "bad", "fine", "slow", "fast", "##s", "##ly",
]


@pytest.fixture(scope="session")
def tokenizer(tmp_path_factory):
    path = tmp_path_factory.mktemp("vocab") / "vocab.txt"
    path.write_text("\n".join(VOCAB) + "\n")
    return DistilBertTokenizer(str(path))


def tiny_distilbert(dim=768, seed=0):
    cfg = DistilBertConfig(
        vocab_size=len(VOCAB), dim=dim, n_layers=1, n_heads=8,
        hidden_dim=256, max_position_embeddings=64,
    )
    torch.manual_seed(seed)
    model = DistilBertModel(cfg)
    model.eval()
    return model


@pytest.fixture(scope="session")
def model():
    return tiny_distilbert()
