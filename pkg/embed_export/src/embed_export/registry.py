"""Known backbones and datasets.

Every backbone here exposes a 768-wide final hidden state, which the
exporter checks at load time.  Dataset entries carry enough to fetch the
corpus with the ``datasets`` library and to map its label column onto
contiguous class indices.
"""

from dataclasses import dataclass

BACKBONES = {
    "bart": "facebook/bart-base",
    "bert": "bert-base-uncased",
    "deberta": "microsoft/deberta-base",
    "distilbert": "distilbert-base-uncased",
    "electra": "google/electra-base-discriminator",
    "roberta": "roberta-base",
    "xlnet": "xlnet-base-cased",
}

HIDDEN_DIM = 768


@dataclass(frozen=True)
class DatasetSpec:
    """Where a corpus lives on the hub and how to read it."""

    path: str
    n_classes: int
    text_col: str = "text"
    label_col: str = "label"
    subset: str | None = None
    train_split: str = "train"
    val_split: str | None = None  # None: carve val out of train
    test_split: str = "test"
    # for corpora whose label column holds strings rather than indices
    label_names: tuple[str, ...] | None = None


DATASETS = {
    "agnews": DatasetSpec(path="ag_news", n_classes=4),
    "dbpedia": DatasetSpec(path="dbpedia_14", n_classes=14, text_col="content"),
    "imdb": DatasetSpec(path="imdb", n_classes=2),
    "papluca": DatasetSpec(
        path="papluca/language-identification", n_classes=20,
        label_col="labels", val_split="validation",
        label_names=("ar", "bg", "de", "el", "en", "es", "fr", "hi", "it", "ja",
                     "nl", "pl", "pt", "ru", "sw", "th", "tr", "ur", "vi", "zh"),
    ),
    "sst5": DatasetSpec(path="SetFit/sst5", n_classes=5, val_split="validation"),
    "trec50": DatasetSpec(path="trec", n_classes=50, label_col="fine_label"),
    "yelp": DatasetSpec(path="yelp_review_full", n_classes=5),
}


def resolve_backbone(name: str) -> str:
    try:
        return BACKBONES[name]
    except KeyError:
        raise ValueError(
            f"unknown backbone {name!r}; known: {', '.join(sorted(BACKBONES))}"
        ) from None


def resolve_dataset(name: str) -> DatasetSpec:
    try:
        return DATASETS[name]
    except KeyError:
        raise ValueError(
            f"unknown dataset {name!r}; known: {', '.join(sorted(DATASETS))}"
        ) from None
