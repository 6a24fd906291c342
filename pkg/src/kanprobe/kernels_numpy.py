"""Vectorized numpy kernels for the batched KAN head forward/backward.

This is the pure-Python fallback behind :mod:`kanprobe.backend`; the Cython
extension ``kanprobe._kernels`` implements the same four entry points with
identical semantics.  All kernels take C-contiguous arrays of one floating
dtype (callers in :mod:`kanprobe.heads` normalize layout and dtype) and loop
over nothing in Python: the B-spline bases come from a vectorized Cox-de Boor
recursion over the whole batch at once.

Shapes, with n = batch, d = in_dim, o = out_dim, G = grid:

* ``x``            (n, d)      inputs
* ``a``, ``b``     (o, d, G)   cosine / sine coefficients per edge
* ``bias``         (o,)        output bias (Fourier head only)
* ``knots``        (2*degree + grid + 1,)   clamped, shared by all edges
* ``coef``         (o, d, grid + degree)    spline coefficients per edge
* ``w_base``, ``w_spline``  (o, d)          residual / spline edge weights
* ``grad_logits``  (n, o)     upstream gradient
"""

from __future__ import annotations

import numpy as np


def fourier_forward(x, a, b, bias):
    """Logits (n, o) of the Fourier head: sum_ik a*cos(kx_i) + b*sin(kx_i) + bias."""
    grid = a.shape[2]
    k = np.arange(1, grid + 1, dtype=x.dtype)
    ang = x[:, :, None] * k  # (n, d, G)
    cos_kx = np.cos(ang)
    sin_kx = np.sin(ang)
    out = np.einsum("ndg,odg->no", cos_kx, a, optimize=True)
    out += np.einsum("ndg,odg->no", sin_kx, b, optimize=True)
    out += bias
    return out


def fourier_backward(x, a, b, grad_logits):
    """Gradients (da, db, dbias, dx) of the Fourier head forward pass."""
    grid = a.shape[2]
    k = np.arange(1, grid + 1, dtype=x.dtype)
    ang = x[:, :, None] * k
    cos_kx = np.cos(ang)
    sin_kx = np.sin(ang)
    da = np.einsum("no,ndg->odg", grad_logits, cos_kx, optimize=True)
    db = np.einsum("no,ndg->odg", grad_logits, sin_kx, optimize=True)
    dbias = grad_logits.sum(axis=0)
    # d logit_o / d x_i = sum_k k * (b[o,i,k] cos(k x_i) - a[o,i,k] sin(k x_i))
    ca = np.einsum("no,odg->ndg", grad_logits, a, optimize=True)
    cb = np.einsum("no,odg->ndg", grad_logits, b, optimize=True)
    dx = ((cb * cos_kx - ca * sin_kx) * k).sum(axis=2)
    return da, db, dbias, dx


def _silu_and_grad(x):
    sig = np.empty_like(x)
    pos = x >= 0
    sig[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    sig[~pos] = ex / (1.0 + ex)
    val = x * sig
    grad = sig * (1.0 + x * (1.0 - sig))
    return val, grad


def bspline_design(x, knots, degree, want_deriv=False):
    """B-spline basis matrix B (..., n_basis) at x, optionally with dB/dx.

    Vectorized Cox-de Boor recursion on a clamped knot vector.  The last
    non-degenerate interval is treated as closed on the right so the bases
    sum to one on the full closed span (the recursion's half-open intervals
    would otherwise zero out the right endpoint).  Derivatives use the
    degree-reduction identity and report the left-hand derivative at the
    right endpoint.
    """
    knots = np.asarray(knots, dtype=x.dtype)
    nk = knots.size
    n_basis = nk - degree - 1
    xe = x[..., None]
    seed = ((xe >= knots[:-1]) & (xe < knots[1:])).astype(x.dtype)
    last = nk - degree - 2  # rightmost interval with positive length
    seed[..., last] = np.where(x == knots[last + 1], 1.0, seed[..., last])
    basis = seed
    lower = None
    for k in range(1, degree + 1):
        if want_deriv and k == degree:
            lower = basis
        den_l = knots[k:-1] - knots[: nk - k - 1]
        den_r = knots[k + 1 :] - knots[1 : nk - k]
        inv_l = np.where(den_l > 0, 1.0 / np.where(den_l > 0, den_l, 1.0), 0.0)
        inv_r = np.where(den_r > 0, 1.0 / np.where(den_r > 0, den_r, 1.0), 0.0)
        left = (xe - knots[: nk - k - 1]) * inv_l
        right = (knots[k + 1 :] - xe) * inv_r
        basis = left * basis[..., :-1] + right * basis[..., 1:]
    if not want_deriv:
        return basis
    if degree == 0:
        return basis, np.zeros_like(basis)
    i = np.arange(n_basis)
    den1 = knots[i + degree] - knots[i]
    den2 = knots[i + degree + 1] - knots[i + 1]
    c1 = np.where(den1 > 0, degree / np.where(den1 > 0, den1, 1.0), 0.0)
    c2 = np.where(den2 > 0, degree / np.where(den2 > 0, den2, 1.0), 0.0)
    deriv = c1 * lower[..., :n_basis] - c2 * lower[..., 1 : n_basis + 1]
    return basis, deriv


def spline_forward(x, knots, degree, coef, w_base, w_spline):
    """Logits (n, o) of the spline head: w_base*silu(x) + w_spline*spline(clip(x))."""
    knots = np.asarray(knots, dtype=x.dtype)
    lo = knots[degree]
    hi = knots[knots.size - degree - 1]
    xc = np.clip(x, lo, hi)
    basis = bspline_design(xc, knots, degree)  # (n, d, nb)
    sil, _ = _silu_and_grad(x)
    out = np.einsum("nd,od->no", sil, w_base, optimize=True)
    wc = w_spline[:, :, None] * coef
    out += np.einsum("ndk,odk->no", basis, wc, optimize=True)
    return out


def spline_backward(x, knots, degree, coef, w_base, w_spline, grad_logits):
    """Gradients (dcoef, dw_base, dw_spline, dx) of the spline head forward."""
    knots = np.asarray(knots, dtype=x.dtype)
    lo = knots[degree]
    hi = knots[knots.size - degree - 1]
    xc = np.clip(x, lo, hi)
    basis, dbasis = bspline_design(xc, knots, degree, want_deriv=True)
    sil, dsil = _silu_and_grad(x)
    dw_base = np.einsum("no,nd->od", grad_logits, sil, optimize=True)
    gb = np.einsum("no,ndk->odk", grad_logits, basis, optimize=True)
    dw_spline = (gb * coef).sum(axis=2)
    dcoef = w_spline[:, :, None] * gb
    inside = ((x > lo) & (x < hi)).astype(x.dtype)
    wc = w_spline[:, :, None] * coef
    dspl = np.einsum("no,odk,ndk->nd", grad_logits, wc, dbasis, optimize=True)
    dx = dsil * (grad_logits @ w_base) + inside * dspl
    return dcoef, dw_base, dw_spline, dx
