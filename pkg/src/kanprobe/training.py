"""Head training: softmax cross-entropy, Adam, and the mini-batch loop.

The backbone is frozen by construction (inputs are precomputed embeddings),
so training touches only head parameters.  The loop is deterministic for a
fixed config: shuffling draws a fresh ``default_rng(seed + epoch)``
permutation each epoch, batches are taken in order, and every array op is
sequential, so repeated runs give bitwise-identical parameters and loss
histories on the same backend.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field

import numpy as np

from . import heads as H
from .data import EmbeddingSet

LOG_FLOOR = 1e-12  # probabilities are floored here before the log


@dataclass
class TrainConfig:
    learning_rate: float = 2e-5
    batch_size: int = 64
    epochs: int = 5
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    seed: int = 0
    shuffle: bool = True
    precision: str = "f64"

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise ValueError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.epochs < 0:
            raise ValueError(f"epochs must be >= 0, got {self.epochs}")
        for name in ("beta1", "beta2"):
            v = getattr(self, name)
            if not 0.0 <= v < 1.0:
                raise ValueError(f"{name} must be in [0, 1), got {v}")
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if self.seed < 0:
            raise ValueError(f"seed must be >= 0, got {self.seed}")
        if self.precision not in ("f32", "f64"):
            raise ValueError(f"precision must be 'f32' or 'f64', got {self.precision!r}")

    def dtype(self) -> np.dtype:
        return np.dtype(np.float32 if self.precision == "f32" else np.float64)

    def to_dict(self) -> dict:
        return {
            "learning_rate": self.learning_rate,
            "batch_size": self.batch_size,
            "epochs": self.epochs,
            "beta1": self.beta1,
            "beta2": self.beta2,
            "epsilon": self.epsilon,
            "seed": self.seed,
            "shuffle": self.shuffle,
            "precision": self.precision,
        }


@dataclass
class AdamState:
    """First/second moment estimates keyed like the head's parameter dict."""

    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)
    t: int = 0

    @classmethod
    def for_params(cls, params: dict[str, np.ndarray]) -> "AdamState":
        return cls(
            m={k: np.zeros_like(p) for k, p in params.items()},
            v={k: np.zeros_like(p) for k, p in params.items()},
            t=0,
        )


@dataclass
class LossHistory:
    train: list[float] = field(default_factory=list)
    val: list[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"train": list(self.train), "val": list(self.val)}


def softmax(z: np.ndarray) -> np.ndarray:
    """Row-wise softmax with max subtraction; accepts (c,) or (n, c)."""
    z = np.asarray(z, dtype=np.result_type(z, np.float32))
    if z.size == 0 or z.shape[-1] == 0:
        raise ValueError("softmax of an empty logit vector")
    shifted = z - z.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def cross_entropy(probs: np.ndarray, label: int) -> float:
    """Negative log-probability of the true label, with the log floored at 1e-12."""
    probs = np.asarray(probs)
    if probs.ndim != 1:
        raise ValueError(f"expected a probability vector, got shape {probs.shape}")
    if not 0 <= label < probs.shape[0]:
        raise ValueError(f"label {label} out of range for {probs.shape[0]} classes")
    return float(-np.log(max(float(probs[label]), LOG_FLOOR)))


def _batch_loss(logits: np.ndarray, labels: np.ndarray) -> float:
    probs = softmax(logits)
    picked = probs[np.arange(labels.shape[0]), labels]
    return float(-np.log(np.maximum(picked, LOG_FLOOR)).mean())


def adam_step(params: dict[str, np.ndarray], grads: dict[str, np.ndarray],
              state: AdamState, cfg: TrainConfig) -> None:
    """One in-place Adam update with bias correction.

    The step counter increments once per call; the effective update is
    p -= lr * m_hat / (sqrt(v_hat) + eps).  Raises on non-finite gradients,
    naming the offending tensor.
    """
    state.t += 1
    b1, b2 = cfg.beta1, cfg.beta2
    c1 = 1.0 - b1 ** state.t
    c2 = 1.0 - b2 ** state.t
    for name, p in params.items():
        g = grads[name]
        if not np.all(np.isfinite(g)):
            raise ValueError(f"non-finite gradient for parameter {name!r}")
        m = state.m[name]
        v = state.v[name]
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * (g * g)
        p -= cfg.learning_rate * (m / c1) / (np.sqrt(v / c2) + cfg.epsilon)


def predict_batch(head, X: np.ndarray) -> np.ndarray:
    """Argmax class per row; ties resolve to the lowest class index."""
    return np.argmax(H.forward_batch(head, X), axis=1)


def predict(head, x: np.ndarray) -> int:
    return int(np.argmax(H.head_forward(head, x)))


def evaluate_loss(head, data: EmbeddingSet, batch_size: int = 256) -> float:
    """Mean cross-entropy over a dataset, computed in eval-sized batches."""
    if data.n == 0:
        raise ValueError("cannot evaluate on an empty dataset")
    total = 0.0
    for start in range(0, data.n, batch_size):
        X = data.x[start : start + batch_size]
        y = data.y[start : start + batch_size]
        total += _batch_loss(H.forward_batch(head, X), y) * X.shape[0]
    return total / data.n


def _check_compat(head, data: EmbeddingSet, name: str) -> None:
    if data.n == 0:
        raise ValueError(f"{name} dataset is empty")
    if data.x.shape[1] != H.head_in_dim(head):
        raise ValueError(
            f"{name} dataset width {data.x.shape[1]} does not match head "
            f"in_dim {H.head_in_dim(head)}"
        )
    if int(data.y.max()) >= H.head_out_dim(head):
        raise ValueError(
            f"{name} dataset has label {int(data.y.max())} but the head emits "
            f"{H.head_out_dim(head)} classes"
        )


def _cast_head(head, dtype):
    out = copy.deepcopy(head)
    for p in out.parameters().values():
        if p.dtype != dtype:
            break
    else:
        return out
    # rebuild with cast arrays; dataclass fields share names with parameters()
    for name, p in out.parameters().items():
        setattr(out, name, np.ascontiguousarray(p, dtype=dtype))
    return out


def train(head, train_set: EmbeddingSet, val_set: EmbeddingSet,
          cfg: TrainConfig | None = None):
    """Mini-batch Adam on softmax cross-entropy; returns (trained head, history).

    The input head is never mutated: training runs on a deep copy cast to
    cfg.precision.  The recorded train loss per epoch is the sample-weighted
    mean of the batch losses as they were before each update; the val loss is
    computed once per epoch after the updates.  epochs=0 returns the (copied)
    head unchanged with an empty history.
    """
    cfg = cfg or TrainConfig()
    _check_compat(head, train_set, "train")
    _check_compat(head, val_set, "val")
    dtype = cfg.dtype()
    model = _cast_head(head, dtype)
    params = model.parameters()
    state = AdamState.for_params(params)
    history = LossHistory()
    n = train_set.n
    X_all = np.ascontiguousarray(train_set.x, dtype=dtype)
    y_all = np.ascontiguousarray(train_set.y)
    out_dim = H.head_out_dim(model)
    eye = np.eye(out_dim, dtype=dtype)
    for epoch in range(cfg.epochs):
        if cfg.shuffle:
            order = np.random.default_rng(cfg.seed + epoch).permutation(n)
        else:
            order = np.arange(n)
        loss_sum = 0.0
        for start in range(0, n, cfg.batch_size):
            idx = order[start : start + cfg.batch_size]
            X = np.ascontiguousarray(X_all[idx])
            y = y_all[idx]
            logits = H.forward_batch(model, X)
            probs = softmax(logits)
            picked = probs[np.arange(idx.size), y]
            loss_sum += float(-np.log(np.maximum(picked, LOG_FLOOR)).sum())
            grad_logits = (probs - eye[y]) / idx.size
            bundle = H.backward_batch(model, X, grad_logits.astype(dtype, copy=False))
            adam_step(params, bundle.grads, state, cfg)
        history.train.append(loss_sum / n)
        history.val.append(evaluate_loss(model, val_set))
    return model, history
