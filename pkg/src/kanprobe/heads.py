"""Classification heads: linear, two-layer MLP, spline KAN, and Fourier KAN.

Every head maps an embedding vector of width ``in_dim`` to ``out_dim``
pre-softmax logits.  The KAN variants put one learnable univariate function
on each (output j, input i) edge and sum over inputs:

    logits_j = sum_i phi_ji(x_i)            (+ bias_j for the Fourier head)

Spline edges use the residual form

    phi(x) = w_base * silu(x) + w_spline * sum_k c_k B_k(clip(x))

with B-spline bases of the configured degree on a clamped uniform knot
vector over [-1, 1]; the spline argument is clamped to the knot span while
the silu residual sees the raw input.  Fourier edges are truncated
trigonometric sums

    phi(x) = sum_{k=1..G} a_k cos(k x) + b_k sin(k x)

with a single bias per output row, so the Fourier head needs no input
normalization and is 2*pi-periodic in every coordinate.

Heads are plain value objects; forward and backward never mutate them.
Batched KAN forward/backward run through the active kernel backend
(compiled extension when built, vectorized numpy otherwise); the MLP heads
are matrix products and stay in numpy either way.  All backward passes are
hand-derived and checked against central finite differences in the tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import backend


@dataclass
class Mlp1Head:
    """Single affine layer: logits = W0 @ x + b0."""

    W0: np.ndarray  # (out_dim, in_dim)
    b0: np.ndarray  # (out_dim,)

    @property
    def in_dim(self) -> int:
        return self.W0.shape[1]

    @property
    def out_dim(self) -> int:
        return self.W0.shape[0]

    def parameters(self) -> dict[str, np.ndarray]:
        return {"W0": self.W0, "b0": self.b0}


@dataclass
class Mlp2Head:
    """Two affine layers with a sigmoid between: W1 @ sigmoid(W0 @ x + b0) + b1."""

    W0: np.ndarray  # (hidden, in_dim)
    b0: np.ndarray  # (hidden,)
    W1: np.ndarray  # (out_dim, hidden)
    b1: np.ndarray  # (out_dim,)
    hidden: int = 0

    def __post_init__(self):
        if self.hidden == 0:
            self.hidden = self.W0.shape[0]

    @property
    def in_dim(self) -> int:
        return self.W0.shape[1]

    @property
    def out_dim(self) -> int:
        return self.W1.shape[0]

    def parameters(self) -> dict[str, np.ndarray]:
        return {"W0": self.W0, "b0": self.b0, "W1": self.W1, "b1": self.b1}


@dataclass
class SplineKanHead:
    """KAN head whose edge functions are residual B-spline sums."""

    in_dim: int
    out_dim: int
    grid: int
    degree: int
    knots: np.ndarray  # (2*degree + grid + 1,) clamped over [-1, 1]
    c: np.ndarray  # (out_dim, in_dim, grid + degree) spline coefficients
    w_base: np.ndarray  # (out_dim, in_dim)
    w_spline: np.ndarray  # (out_dim, in_dim)

    def parameters(self) -> dict[str, np.ndarray]:
        return {"c": self.c, "w_base": self.w_base, "w_spline": self.w_spline}


@dataclass
class FourierKanHead:
    """KAN head whose edge functions are truncated Fourier series."""

    in_dim: int
    out_dim: int
    grid: int
    a: np.ndarray  # (out_dim, in_dim, grid) cosine coefficients
    b: np.ndarray  # (out_dim, in_dim, grid) sine coefficients
    bias: np.ndarray  # (out_dim,)

    def parameters(self) -> dict[str, np.ndarray]:
        return {"a": self.a, "b": self.b, "bias": self.bias}


Head = Mlp1Head | Mlp2Head | SplineKanHead | FourierKanHead

HEAD_KINDS = ("mlp1", "mlp2", "kan", "frkan")


@dataclass
class GradientBundle:
    """Parameter gradients (same keys/shapes as head.parameters()) plus grad_input.

    ``grad_input`` is (in_dim,) for a single sample and (n, in_dim) for a
    batch; parameter gradients are always summed over the batch.
    """

    grads: dict[str, np.ndarray] = field(default_factory=dict)
    grad_input: np.ndarray | None = None


def silu(x):
    """x * sigmoid(x), numerically stable on both tails; scalars in, float out."""
    arr = np.asarray(x)
    out = arr * sigmoid(arr)
    return float(out) if out.ndim == 0 else out


def sigmoid(x):
    """Logistic function, computed without overflow for large |x|."""
    x = np.asarray(x)
    if x.dtype.kind != "f":
        x = x.astype(np.float64)
    pos = x >= 0
    e = np.exp(np.where(pos, -x, x))  # exponent always <= 0
    return np.where(pos, 1.0 / (1.0 + e), e / (1.0 + e))


def uniform_clamped_knots(grid: int, degree: int, lo: float = -1.0, hi: float = 1.0) -> np.ndarray:
    """Clamped knot vector: degree+1 copies of each end, grid-1 interior knots."""
    if grid < 1:
        raise ValueError(f"grid must be >= 1, got {grid}")
    if degree < 0:
        raise ValueError(f"degree must be >= 0, got {degree}")
    interior = np.linspace(lo, hi, grid + 1)
    return np.concatenate([np.full(degree, lo), interior, np.full(degree, hi)])


def bspline_basis(x: float, knots, degree: int, index: int) -> float:
    """Value of one B-spline basis function by Cox-de Boor recursion.

    Intervals are half-open except that the rightmost non-degenerate
    interval is closed, so clamped bases still sum to one at the right end
    of the span.
    """
    t = np.asarray(knots, dtype=float)
    if degree < 0:
        raise ValueError(f"degree must be >= 0, got {degree}")
    if t.size < degree + 2:
        raise ValueError("need at least degree+2 knots")
    if np.any(np.diff(t) < 0):
        raise ValueError("knots must be non-decreasing")
    n_basis = t.size - degree - 1
    if not 0 <= index < n_basis:
        raise ValueError(f"basis index {index} out of range [0, {n_basis})")
    return _deboor(float(x), degree, index, t, t[-1])


def _deboor(x, k, i, t, right_end):
    if k == 0:
        if t[i] <= x < t[i + 1]:
            return 1.0
        if x == right_end and t[i] < t[i + 1] == right_end:
            return 1.0
        return 0.0
    val = 0.0
    den1 = t[i + k] - t[i]
    if den1 > 0:
        val += (x - t[i]) / den1 * _deboor(x, k - 1, i, t, right_end)
    den2 = t[i + k + 1] - t[i + 1]
    if den2 > 0:
        val += (t[i + k + 1] - x) / den2 * _deboor(x, k - 1, i + 1, t, right_end)
    return val


def phi_spline(head: SplineKanHead, x: float, j: int, i: int) -> float:
    """Edge function (output j, input i) of a spline head at scalar x."""
    t = head.knots
    lo, hi = t[head.degree], t[t.size - head.degree - 1]
    xc = min(max(float(x), lo), hi)
    s = sum(
        head.c[j, i, k] * bspline_basis(xc, t, head.degree, k)
        for k in range(head.c.shape[2])
    )
    return float(head.w_base[j, i] * silu(float(x)) + head.w_spline[j, i] * s)


def phi_fourier(head: FourierKanHead, x: float, j: int, i: int) -> float:
    """Edge function (output j, input i) of a Fourier head at scalar x."""
    k = np.arange(1, head.grid + 1)
    return float(np.dot(head.a[j, i], np.cos(k * x)) + np.dot(head.b[j, i], np.sin(k * x)))


def _as_batch(head: Head, X: np.ndarray, dtype) -> np.ndarray:
    X = np.ascontiguousarray(X, dtype=dtype)
    if X.ndim != 2:
        raise ValueError(f"expected a (n, in_dim) batch, got shape {X.shape}")
    if X.shape[1] != head_in_dim(head):
        raise ValueError(
            f"input width {X.shape[1]} does not match head in_dim {head_in_dim(head)}"
        )
    return X


def head_in_dim(head: Head) -> int:
    return head.in_dim


def head_out_dim(head: Head) -> int:
    return head.out_dim


def _param_dtype(head: Head) -> np.dtype:
    return next(iter(head.parameters().values())).dtype


def forward_batch(head: Head, X: np.ndarray) -> np.ndarray:
    """Logits (n, out_dim) for a batch of inputs (n, in_dim)."""
    dt = _param_dtype(head)
    X = _as_batch(head, X, dt)
    if isinstance(head, Mlp1Head):
        return X @ head.W0.T + head.b0
    if isinstance(head, Mlp2Head):
        hid = sigmoid(X @ head.W0.T + head.b0)
        return hid @ head.W1.T + head.b1
    kern = backend.get_kernels()
    if isinstance(head, FourierKanHead):
        return kern.fourier_forward(X, head.a, head.b, head.bias)
    if isinstance(head, SplineKanHead):
        knots = np.ascontiguousarray(head.knots, dtype=dt)
        return kern.spline_forward(X, knots, head.degree, head.c, head.w_base, head.w_spline)
    raise TypeError(f"unknown head type {type(head).__name__}")


def head_forward(head: Head, x: np.ndarray) -> np.ndarray:
    """Logits (out_dim,) for one input vector (in_dim,)."""
    x = np.asarray(x)
    if x.ndim != 1:
        raise ValueError(f"expected a 1-d input vector, got shape {x.shape}")
    return forward_batch(head, x[None, :])[0]


def backward_batch(head: Head, X: np.ndarray, grad_logits: np.ndarray) -> GradientBundle:
    """Parameter gradients summed over the batch, plus per-sample grad_input (n, in_dim)."""
    dt = _param_dtype(head)
    X = _as_batch(head, X, dt)
    GL = np.ascontiguousarray(grad_logits, dtype=dt)
    if GL.shape != (X.shape[0], head_out_dim(head)):
        raise ValueError(
            f"grad_logits shape {GL.shape} does not match (n, out_dim) = "
            f"({X.shape[0]}, {head_out_dim(head)})"
        )
    if isinstance(head, Mlp1Head):
        grads = {"W0": GL.T @ X, "b0": GL.sum(axis=0)}
        return GradientBundle(grads, GL @ head.W0)
    if isinstance(head, Mlp2Head):
        hid = sigmoid(X @ head.W0.T + head.b0)
        d_hid = (GL @ head.W1) * hid * (1.0 - hid)
        grads = {
            "W0": d_hid.T @ X,
            "b0": d_hid.sum(axis=0),
            "W1": GL.T @ hid,
            "b1": GL.sum(axis=0),
        }
        return GradientBundle(grads, d_hid @ head.W0)
    kern = backend.get_kernels()
    if isinstance(head, FourierKanHead):
        da, db, dbias, dx = kern.fourier_backward(X, head.a, head.b, GL)
        return GradientBundle({"a": da, "b": db, "bias": dbias}, dx)
    if isinstance(head, SplineKanHead):
        knots = np.ascontiguousarray(head.knots, dtype=dt)
        dc, dwb, dws, dx = kern.spline_backward(
            X, knots, head.degree, head.c, head.w_base, head.w_spline, GL
        )
        return GradientBundle({"c": dc, "w_base": dwb, "w_spline": dws}, dx)
    raise TypeError(f"unknown head type {type(head).__name__}")


def head_backward(head: Head, x: np.ndarray, grad_logits: np.ndarray) -> GradientBundle:
    """Single-sample gradients; grad_input has shape (in_dim,)."""
    x = np.asarray(x)
    if x.ndim != 1:
        raise ValueError(f"expected a 1-d input vector, got shape {x.shape}")
    bundle = backward_batch(head, x[None, :], np.asarray(grad_logits)[None, :])
    return GradientBundle(bundle.grads, bundle.grad_input[0])


def param_count(head: Head) -> int:
    """Number of trainable scalars in the head."""
    return sum(p.size for p in head.parameters().values())


def describe(head: Head) -> dict:
    """JSON-friendly summary of a head's architecture."""
    if isinstance(head, Mlp1Head):
        return {"kind": "mlp1", "in_dim": head.in_dim, "out_dim": head.out_dim}
    if isinstance(head, Mlp2Head):
        return {
            "kind": "mlp2",
            "in_dim": head.in_dim,
            "out_dim": head.out_dim,
            "hidden": head.hidden,
        }
    if isinstance(head, SplineKanHead):
        return {
            "kind": "kan",
            "in_dim": head.in_dim,
            "out_dim": head.out_dim,
            "grid": head.grid,
            "degree": head.degree,
        }
    if isinstance(head, FourierKanHead):
        return {
            "kind": "frkan",
            "in_dim": head.in_dim,
            "out_dim": head.out_dim,
            "grid": head.grid,
        }
    raise TypeError(f"unknown head type {type(head).__name__}")


def init_head(kind: str, in_dim: int, out_dim: int, size: int | None = None,
              seed: int = 0, degree: int = 3) -> Head:
    """Build a freshly initialized head.

    ``size`` is the Fourier/spline grid for kind "frkan"/"kan" and the hidden
    width for kind "mlp2"; it must be omitted for "mlp1".  Weight draws use
    numpy's default_rng(seed) in a fixed documented order, so equal arguments
    give bitwise-equal heads:

    * mlp1:  W0 ~ U(-s, s) with s = sqrt(1/in_dim); b0 = 0
    * mlp2:  W0 ~ U(-s0, s0), then W1 ~ U(-s1, s1) with s1 = sqrt(1/hidden);
             both biases 0
    * kan:   c ~ N(0, 0.1^2), then w_base ~ U(-s, s), then w_spline ~ U(-s, s)
    * frkan: a ~ N(0, sd^2), then b ~ N(0, sd^2) with
             sd = 1/(sqrt(in_dim) * sqrt(grid)); bias = 0
    """
    if kind not in HEAD_KINDS:
        raise ValueError(f"unknown head kind {kind!r}; expected one of {HEAD_KINDS}")
    if in_dim < 1 or out_dim < 1:
        raise ValueError(f"in_dim and out_dim must be >= 1, got {in_dim}, {out_dim}")
    rng = np.random.default_rng(seed)
    if kind == "mlp1":
        if size is not None:
            raise ValueError("mlp1 takes no grid/hidden size")
        s = np.sqrt(1.0 / in_dim)
        return Mlp1Head(W0=rng.uniform(-s, s, (out_dim, in_dim)), b0=np.zeros(out_dim))
    if size is None:
        raise ValueError(f"head kind {kind!r} requires a grid/hidden size")
    if kind == "mlp2":
        if size < 1:
            raise ValueError(f"hidden width must be >= 1, got {size}")
        s0 = np.sqrt(1.0 / in_dim)
        W0 = rng.uniform(-s0, s0, (size, in_dim))
        s1 = np.sqrt(1.0 / size)
        W1 = rng.uniform(-s1, s1, (out_dim, size))
        return Mlp2Head(W0=W0, b0=np.zeros(size), W1=W1, b1=np.zeros(out_dim), hidden=size)
    if size < 1:
        raise ValueError(f"grid must be >= 1, got {size}")
    if kind == "kan":
        knots = uniform_clamped_knots(size, degree)
        c = rng.normal(0.0, 0.1, (out_dim, in_dim, size + degree))
        s = np.sqrt(1.0 / in_dim)
        w_base = rng.uniform(-s, s, (out_dim, in_dim))
        w_spline = rng.uniform(-s, s, (out_dim, in_dim))
        return SplineKanHead(
            in_dim=in_dim, out_dim=out_dim, grid=size, degree=degree,
            knots=knots, c=c, w_base=w_base, w_spline=w_spline,
        )
    sd = 1.0 / (np.sqrt(in_dim) * np.sqrt(size))
    a = rng.normal(0.0, sd, (out_dim, in_dim, size))
    b = rng.normal(0.0, sd, (out_dim, in_dim, size))
    return FourierKanHead(
        in_dim=in_dim, out_dim=out_dim, grid=size, a=a, b=b, bias=np.zeros(out_dim)
    )
