"""Numba-compiled twins of the hot kernels in ``_kernels_py``.

Same contracts, same stable formulas; sums use Neumaier compensation instead
of ``math.fsum`` (which numba does not support).  Importing this module
requires numba; ``backend`` falls back to the pure implementations when the
import fails or when ``FRACSPLINE_BACKEND=numpy`` is set.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from ._kernels_py import conv_weight_arrays  # array math, already vectorized

__all__ = [
    "conv_weight_arrays",
    "conv_at_nodes",
    "conv_lag",
    "cdot",
    "frac_integral_spline",
    "kernel_segment_integrals",
]


@njit(cache=True)
def _csum_step(s, comp, term):
    tmp = s + term
    if abs(s) >= abs(term):
        comp += (s - tmp) + term
    else:
        comp += (term - tmp) + s
    return tmp, comp


@njit(cache=True)
def conv_at_nodes(kern, bnd, diag, y):
    n = y.shape[0] - 1
    out = np.zeros(n + 1)
    for i in range(1, n + 1):
        s = bnd[i] * y[0]
        comp = 0.0
        for j in range(1, i):
            s, comp = _csum_step(s, comp, kern[i - j] * y[j])
        s, comp = _csum_step(s, comp, diag * y[i])
        out[i] = s + comp
    return out


@njit(cache=True)
def conv_lag(kern, bnd, y, i):
    if i == 0:
        return 0.0
    s = bnd[i] * y[0]
    comp = 0.0
    for j in range(1, i):
        s, comp = _csum_step(s, comp, kern[i - j] * y[j])
    return s + comp


@njit(cache=True)
def cdot(a, b):
    s = 0.0
    comp = 0.0
    for k in range(a.shape[0]):
        s, comp = _csum_step(s, comp, a[k] * b[k])
    return s + comp


@njit(cache=True)
def _pow_diff(u1, u0, e):
    if u0 == 0.0:
        return u1 ** e
    return -(u1 ** e) * math.expm1(e * math.log1p(-(u1 - u0) / u1))


@njit(cache=True)
def frac_integral_spline(values, h, alpha, inv_gamma_alpha, ts):
    n = values.shape[0] - 1
    out = np.zeros(ts.shape[0])
    for k in range(ts.shape[0]):
        t = ts[k]
        if t <= 0.0:
            out[k] = 0.0
            continue
        s = 0.0
        comp = 0.0
        for j in range(n):
            a = j * h
            if a >= t:
                break
            b = (j + 1) * h
            if b > t:
                b = t
            slope = (values[j + 1] - values[j]) / h
            u1 = t - a
            u0 = t - b
            um = 0.5 * (u0 + u1)
            ym = values[j] + slope * (t - um - a)
            p1 = _pow_diff(u1, u0, alpha)
            p2 = _pow_diff(u1, u0, alpha + 1.0)
            s, comp = _csum_step(s, comp, ym * p1 / alpha)
            s, comp = _csum_step(s, comp, -slope * (p2 / (alpha + 1.0) - um * p1 / alpha))
        out[k] = (s + comp) * inv_gamma_alpha
    return out


@njit(cache=True)
def kernel_segment_integrals(values, h, c, p, upto):
    n = values.shape[0] - 1
    s = 0.0
    comp = 0.0
    for j in range(n):
        a = j * h
        if a >= upto:
            break
        b = (j + 1) * h
        if b > upto:
            b = upto
        slope = (values[j + 1] - values[j]) / h
        u1 = c - a
        u0 = c - b
        um = 0.5 * (u0 + u1)
        ym = values[j] + slope * (c - um - a)
        p1 = _pow_diff(u1, u0, p + 1.0)
        p2 = _pow_diff(u1, u0, p + 2.0)
        s, comp = _csum_step(s, comp, ym * p1 / (p + 1.0))
        s, comp = _csum_step(s, comp, -slope * (p2 / (p + 2.0) - um * p1 / (p + 1.0)))
    return s + comp
