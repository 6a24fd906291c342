# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels for the batched KAN head forward/backward.

Entry-point-for-entry-point mirror of ``kanprobe.kernels_numpy``; the package
prefers this module when the extension compiled (see ``kanprobe.backend``).
Loops are sequential and deterministic.  Trigonometric factors cos(kx) and
sin(kx) come from the angle-addition recurrence (two libm calls per scalar
input instead of 2G), B-spline bases from the banded evaluation that only
touches the degree+1 functions alive on the knot span of x.
"""

import numpy as np

from libc.math cimport cos, exp, sin


ctypedef fused real:
    float
    double


cdef inline real _silu(real xv, real* dsil) noexcept nogil:
    cdef real sg, e
    if xv >= 0:
        sg = 1.0 / (1.0 + exp(-xv))
    else:
        e = exp(xv)
        sg = e / (1.0 + e)
    dsil[0] = sg * (1.0 + xv * (1.0 - sg))
    return xv * sg


cdef inline Py_ssize_t _find_span(real xv, real[::1] t, Py_ssize_t degree,
                                  Py_ssize_t n_basis) noexcept nogil:
    cdef Py_ssize_t low, high, mid
    if xv >= t[n_basis]:
        return n_basis - 1
    if xv <= t[degree]:
        return degree
    low = degree
    high = n_basis
    mid = (low + high) // 2
    while xv < t[mid] or xv >= t[mid + 1]:
        if xv < t[mid]:
            high = mid
        else:
            low = mid
        mid = (low + high) // 2
    return mid


cdef inline void _basis_funs(Py_ssize_t span, real xv, Py_ssize_t degree,
                             real[::1] t, real* N, real* left, real* right) noexcept nogil:
    """The degree+1 nonzero basis values at xv; N[r] = B_{span-degree+r}."""
    cdef Py_ssize_t j, r
    cdef real saved, temp
    N[0] = 1.0
    for j in range(1, degree + 1):
        left[j] = xv - t[span + 1 - j]
        right[j] = t[span + j] - xv
        saved = 0.0
        for r in range(j):
            temp = N[r] / (right[r + 1] + left[j - r])
            N[r] = saved + right[r + 1] * temp
            saved = left[j - r] * temp
        N[j] = saved


cdef inline void _basis_derivs(Py_ssize_t span, real xv, Py_ssize_t degree,
                               real[::1] t, real* Nm, real* dN,
                               real* left, real* right) noexcept nogil:
    """dN[j] = d/dx B_{span-degree+j,degree}(xv) via the degree-reduction identity."""
    cdef Py_ssize_t j, i
    cdef real t1, t2, den
    if degree == 0:
        dN[0] = 0.0
        return
    _basis_funs(span, xv, degree - 1, t, Nm, left, right)
    for j in range(degree + 1):
        i = span - degree + j
        t1 = 0.0
        t2 = 0.0
        if j >= 1:
            den = t[i + degree] - t[i]
            if den > 0:
                t1 = Nm[j - 1] / den
        if j <= degree - 1:
            den = t[i + degree + 1] - t[i + 1]
            if den > 0:
                t2 = Nm[j] / den
        dN[j] = degree * (t1 - t2)


def fourier_forward(real[:, ::1] x, real[:, :, ::1] a, real[:, :, ::1] b,
                    real[::1] bias):
    cdef Py_ssize_t n = x.shape[0], d = x.shape[1], o = a.shape[0], g = a.shape[2]
    cdef Py_ssize_t s, i, j, k
    cdef real c1, s1, ck, sk, tmp, acc
    dtype = np.float32 if real is float else np.float64
    out_np = np.zeros((n, o), dtype=dtype)
    cbuf_np = np.empty(g, dtype=dtype)
    sbuf_np = np.empty(g, dtype=dtype)
    cdef real[:, ::1] out = out_np
    cdef real[::1] cbuf = cbuf_np
    cdef real[::1] sbuf = sbuf_np
    with nogil:
        for s in range(n):
            for i in range(d):
                c1 = cos(x[s, i])
                s1 = sin(x[s, i])
                ck = 1.0
                sk = 0.0
                for k in range(g):
                    tmp = ck * c1 - sk * s1
                    sk = sk * c1 + ck * s1
                    ck = tmp
                    cbuf[k] = ck
                    sbuf[k] = sk
                for j in range(o):
                    acc = 0.0
                    for k in range(g):
                        acc += a[j, i, k] * cbuf[k] + b[j, i, k] * sbuf[k]
                    out[s, j] += acc
            for j in range(o):
                out[s, j] += bias[j]
    return out_np


def fourier_backward(real[:, ::1] x, real[:, :, ::1] a, real[:, :, ::1] b,
                     real[:, ::1] grad_logits):
    cdef Py_ssize_t n = x.shape[0], d = x.shape[1], o = a.shape[0], g = a.shape[2]
    cdef Py_ssize_t s, i, j, k
    cdef real c1, s1, ck, sk, tmp, gv, dxv
    dtype = np.float32 if real is float else np.float64
    da_np = np.zeros((o, d, g), dtype=dtype)
    db_np = np.zeros((o, d, g), dtype=dtype)
    dbias_np = np.zeros(o, dtype=dtype)
    dx_np = np.zeros((n, d), dtype=dtype)
    cbuf_np = np.empty(g, dtype=dtype)
    sbuf_np = np.empty(g, dtype=dtype)
    cdef real[:, :, ::1] da = da_np
    cdef real[:, :, ::1] db = db_np
    cdef real[::1] dbias = dbias_np
    cdef real[:, ::1] dx = dx_np
    cdef real[::1] cbuf = cbuf_np
    cdef real[::1] sbuf = sbuf_np
    with nogil:
        for s in range(n):
            for i in range(d):
                c1 = cos(x[s, i])
                s1 = sin(x[s, i])
                ck = 1.0
                sk = 0.0
                for k in range(g):
                    tmp = ck * c1 - sk * s1
                    sk = sk * c1 + ck * s1
                    ck = tmp
                    cbuf[k] = ck
                    sbuf[k] = sk
                dxv = 0.0
                for j in range(o):
                    gv = grad_logits[s, j]
                    for k in range(g):
                        da[j, i, k] += gv * cbuf[k]
                        db[j, i, k] += gv * sbuf[k]
                        dxv += gv * (k + 1) * (b[j, i, k] * cbuf[k] - a[j, i, k] * sbuf[k])
                dx[s, i] = dxv
            for j in range(o):
                dbias[j] += grad_logits[s, j]
    return da_np, db_np, dbias_np, dx_np


def spline_forward(real[:, ::1] x, real[::1] knots, Py_ssize_t degree,
                   real[:, :, ::1] coef, real[:, ::1] w_base, real[:, ::1] w_spline):
    cdef Py_ssize_t n = x.shape[0], d = x.shape[1], o = coef.shape[0]
    cdef Py_ssize_t n_basis = knots.shape[0] - degree - 1
    cdef Py_ssize_t s, i, j, r, span, i0
    cdef real xv, xc, sil, dsil, spl
    cdef real lo = knots[degree], hi = knots[knots.shape[0] - degree - 1]
    dtype = np.float32 if real is float else np.float64
    out_np = np.zeros((n, o), dtype=dtype)
    scratch_np = np.empty(4 * (degree + 2), dtype=dtype)
    cdef real[:, ::1] out = out_np
    cdef real[::1] scratch = scratch_np
    cdef real* N
    cdef real* left
    cdef real* right
    with nogil:
        N = &scratch[0]
        left = &scratch[degree + 2]
        right = &scratch[2 * (degree + 2)]
        for s in range(n):
            for i in range(d):
                xv = x[s, i]
                sil = _silu(xv, &dsil)
                xc = min(max(xv, lo), hi)
                span = _find_span(xc, knots, degree, n_basis)
                _basis_funs(span, xc, degree, knots, N, left, right)
                i0 = span - degree
                for j in range(o):
                    spl = 0.0
                    for r in range(degree + 1):
                        spl += coef[j, i, i0 + r] * N[r]
                    out[s, j] += w_base[j, i] * sil + w_spline[j, i] * spl
    return out_np


def spline_backward(real[:, ::1] x, real[::1] knots, Py_ssize_t degree,
                    real[:, :, ::1] coef, real[:, ::1] w_base, real[:, ::1] w_spline,
                    real[:, ::1] grad_logits):
    cdef Py_ssize_t n = x.shape[0], d = x.shape[1], o = coef.shape[0]
    cdef Py_ssize_t n_basis = knots.shape[0] - degree - 1
    cdef Py_ssize_t s, i, j, r, span, i0
    cdef real xv, xc, sil, dsil, gv, spl, dspl, dxv, inside
    cdef real lo = knots[degree], hi = knots[knots.shape[0] - degree - 1]
    dtype = np.float32 if real is float else np.float64
    dcoef_np = np.zeros((o, d, n_basis), dtype=dtype)
    dwb_np = np.zeros((o, d), dtype=dtype)
    dws_np = np.zeros((o, d), dtype=dtype)
    dx_np = np.zeros((n, d), dtype=dtype)
    scratch_np = np.empty(5 * (degree + 2), dtype=dtype)
    cdef real[:, :, ::1] dcoef = dcoef_np
    cdef real[:, ::1] dwb = dwb_np
    cdef real[:, ::1] dws = dws_np
    cdef real[:, ::1] dx = dx_np
    cdef real[::1] scratch = scratch_np
    cdef real* N
    cdef real* Nm
    cdef real* dN
    cdef real* left
    cdef real* right
    with nogil:
        N = &scratch[0]
        Nm = &scratch[degree + 2]
        dN = &scratch[2 * (degree + 2)]
        left = &scratch[3 * (degree + 2)]
        right = &scratch[4 * (degree + 2)]
        for s in range(n):
            for i in range(d):
                xv = x[s, i]
                sil = _silu(xv, &dsil)
                xc = min(max(xv, lo), hi)
                inside = 1.0 if (xv > lo and xv < hi) else 0.0
                span = _find_span(xc, knots, degree, n_basis)
                _basis_funs(span, xc, degree, knots, N, left, right)
                _basis_derivs(span, xc, degree, knots, Nm, dN, left, right)
                i0 = span - degree
                dxv = 0.0
                for j in range(o):
                    gv = grad_logits[s, j]
                    spl = 0.0
                    dspl = 0.0
                    for r in range(degree + 1):
                        spl += coef[j, i, i0 + r] * N[r]
                        dspl += coef[j, i, i0 + r] * dN[r]
                        dcoef[j, i, i0 + r] += gv * w_spline[j, i] * N[r]
                    dwb[j, i] += gv * sil
                    dws[j, i] += gv * spl
                    dxv += gv * (w_base[j, i] * dsil + inside * w_spline[j, i] * dspl)
                dx[s, i] = dxv
    return dcoef_np, dwb_np, dws_np, dx_np
