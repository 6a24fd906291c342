"""kanprobe: MLP, spline-KAN, and Fourier-KAN heads for linear probing.

Train small trainable heads on frozen transformer embeddings, compare their
parameter budgets and metrics, and verify the Fourier truncation behavior
that motivates the trigonometric edge functions.
"""

from .backend import active as active_backend
from .backend import available as available_backends
from .data import (
    EmbeddingSet,
    load_csv,
    load_emb,
    save_emb,
    stratified_split,
    synth_gaussian_clusters,
    synth_periodic,
)
from .fourier import (
    FUNCTIONS,
    ErrorCurve,
    FourierFit,
    convergence_scan,
    fourier_coefficients,
    truncation_error,
)
from .heads import (
    FourierKanHead,
    GradientBundle,
    Head,
    Mlp1Head,
    Mlp2Head,
    SplineKanHead,
    backward_batch,
    bspline_basis,
    describe,
    forward_batch,
    head_backward,
    head_forward,
    init_head,
    param_count,
    phi_fourier,
    phi_spline,
    sigmoid,
    silu,
    uniform_clamped_knots,
)
from .metrics import (
    ConfusionMatrix,
    MetricsReport,
    compute_metrics,
    confusion_matrix,
    evaluate,
)
from .training import (
    AdamState,
    LossHistory,
    TrainConfig,
    adam_step,
    cross_entropy,
    evaluate_loss,
    predict,
    predict_batch,
    softmax,
    train,
)

__version__ = "0.1.0"

__all__ = [
    "AdamState",
    "ConfusionMatrix",
    "EmbeddingSet",
    "ErrorCurve",
    "FUNCTIONS",
    "FourierFit",
    "FourierKanHead",
    "GradientBundle",
    "Head",
    "LossHistory",
    "MetricsReport",
    "Mlp1Head",
    "Mlp2Head",
    "SplineKanHead",
    "TrainConfig",
    "active_backend",
    "adam_step",
    "available_backends",
    "backward_batch",
    "bspline_basis",
    "compute_metrics",
    "confusion_matrix",
    "convergence_scan",
    "cross_entropy",
    "describe",
    "evaluate",
    "evaluate_loss",
    "forward_batch",
    "fourier_coefficients",
    "head_backward",
    "head_forward",
    "init_head",
    "load_csv",
    "load_emb",
    "param_count",
    "phi_fourier",
    "phi_spline",
    "predict",
    "predict_batch",
    "save_emb",
    "sigmoid",
    "silu",
    "softmax",
    "stratified_split",
    "synth_gaussian_clusters",
    "synth_periodic",
    "train",
    "truncation_error",
    "uniform_clamped_knots",
]
