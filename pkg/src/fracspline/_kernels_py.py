"""Pure numpy/stdlib implementations of the hot numeric kernels.

These are the reference implementations: every sum is exactly rounded via
``math.fsum`` and the power differences use expm1/log1p forms that avoid
cancellation.  The numba twins in ``_kernels_nb`` must agree with these to a
few ulps; ``benchmarks/bench_backends.py`` compares their speed.
"""

from __future__ import annotations

import math

import numpy as np


def conv_weight_arrays(alpha: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Dimensionless convolution-weight kernels for the product-trapezoid rule.

    Returns ``(kern, bnd)`` of length ``n+1`` (index 0 unused) such that the
    exact fractional integral of a linear spline at node ``i`` is::

        c * ( bnd[i]*y[0] + sum_{0<j<i} kern[i-j]*y[j] + y[i] ),
        c = h**alpha / gamma(alpha+2)

    ``kern[d]`` is the centered second difference ``(d+1)**b - 2*d**b + (d-1)**b``
    and ``bnd[i]`` is ``(i-1)**b - i**(b-1)*(i-b)`` with ``b = alpha+1``. Both are
    evaluated through binomial series for d >= 2, because the naive differences
    lose ~log10(d**2) digits to cancellation.
    """
    b = alpha + 1.0
    kern = np.zeros(n + 1)
    bnd = np.zeros(n + 1)
    if n >= 1:
        kern[1] = 2.0 ** b - 2.0
        bnd[1] = alpha  # (0)**b - 1*(1-b) = b-1
    if n >= 2:
        d = np.arange(2, n + 1, dtype=np.float64)
        x = 1.0 / d
        scale = d ** b
        # (1+x)**b + (1-x)**b - 2 = 2 * sum_{k>=1} C(b,2k) x**(2k)
        acc = np.zeros_like(d)
        coef = 1.0
        xp = np.ones_like(d)
        k = 0
        while True:
            k += 1
            coef *= (b - (2 * k - 2)) / (2 * k - 1)
            coef *= (b - (2 * k - 1)) / (2 * k)
            xp *= x * x
            term = coef * xp
            acc += term
            if k > 4 and np.max(np.abs(term)) < 1e-18 * max(np.max(np.abs(acc)), 1e-300):
                break
            if k > 200:
                break
        kern[2:] = 2.0 * scale * acc
        # (1-x)**b - (1 - b*x) = sum_{k>=2} C(b,k) (-x)**k
        acc = np.zeros_like(d)
        coef = b * (b - 1.0) / 2.0
        xp = x * x
        acc += coef * xp
        k = 2
        while True:
            k += 1
            coef *= (b - (k - 1)) / k
            xp *= -x
            term = coef * xp
            acc += term
            if k > 4 and np.max(np.abs(term)) < 1e-18 * max(np.max(np.abs(acc)), 1e-300):
                break
            if k > 200:
                break
        bnd[2:] = scale * acc
    return kern, bnd


def conv_at_nodes(kern: np.ndarray, bnd: np.ndarray, diag: float, y: np.ndarray) -> np.ndarray:
    """All-node convolution: out[i] = bnd[i]*y[0] + sum_{0<j<i} kern[i-j]*y[j] + diag*y[i]."""
    n = y.shape[0] - 1
    out = np.zeros(n + 1)
    for i in range(1, n + 1):
        terms = (kern[i - 1:0:-1] * y[1:i]).tolist()
        terms.append(bnd[i] * y[0])
        terms.append(diag * y[i])
        out[i] = math.fsum(terms)
    return out


def conv_lag(kern: np.ndarray, bnd: np.ndarray, y: np.ndarray, i: int) -> float:
    """Lag part of the convolution at node i: history sum excluding the y[i] term."""
    if i == 0:
        return 0.0
    terms = (kern[i - 1:0:-1] * y[1:i]).tolist()
    terms.append(bnd[i] * y[0])
    return math.fsum(terms)


def cdot(a: np.ndarray, b: np.ndarray) -> float:
    """Compensated dot product."""
    return math.fsum((a * b).tolist())


def _pow_diff(u1: float, u0: float, e: float) -> float:
    """u1**e - u0**e for 0 <= u0 < u1, accurate even when u1 - u0 << u1."""
    if u0 == 0.0:
        return u1 ** e
    return -(u1 ** e) * math.expm1(e * math.log1p(-(u1 - u0) / u1))

def frac_integral_spline(values: np.ndarray, h: float, alpha: float,
                         inv_gamma_alpha: float, ts: np.ndarray) -> np.ndarray:
    """Exact order-``alpha`` fractional integral of a linear spline at points ``ts``.

    Per-segment closed form: on a segment the spline is ``ym + s*(u_mid - u)`` in
    the kernel variable ``u = t - tau``, and the two power moments of ``u**(alpha-1)``
    integrate exactly.  Midpoint centering keeps the slope contribution from
    cancelling against the constant one.
    """
    n = values.shape[0] - 1
    out = np.zeros(ts.shape[0])
    for k, t in enumerate(ts):
        t = float(t)
        if t <= 0.0:
            out[k] = 0.0
            continue
        terms = []
        for j in range(n):
            a = j * h
            if a >= t:
                break
            b = min((j + 1) * h, t)
            slope = (values[j + 1] - values[j]) / h
            u1 = t - a
            u0 = t - b
            um = 0.5 * (u0 + u1)
            ym = values[j] + slope * (t - um - a)
            p1 = _pow_diff(u1, u0, alpha)
            p2 = _pow_diff(u1, u0, alpha + 1.0)
            terms.append(ym * p1 / alpha)
            terms.append(-slope * (p2 / (alpha + 1.0) - um * p1 / alpha))
        out[k] = math.fsum(terms) * inv_gamma_alpha
    return out


def kernel_segment_integrals(values: np.ndarray, h: float, c: float, p: float,
                             upto: float) -> float:
    """Exact ``int_0^upto (c - s)**p * spline(s) ds`` for a spline on step ``h``.

    Requires ``upto <= c`` and ``p > -1``; the kernel may be weakly singular at
    ``s = c``. Used by the Green's-function route to boundary value problems.
    """
    n = values.shape[0] - 1
    terms = []
    for j in range(n):
        a = j * h
        if a >= upto:
            break
        b = min((j + 1) * h, upto)
        slope = (values[j + 1] - values[j]) / h
        u1 = c - a
        u0 = c - b
        um = 0.5 * (u0 + u1)
        ym = values[j] + slope * (c - um - a)
        p1 = _pow_diff(u1, u0, p + 1.0)
        p2 = _pow_diff(u1, u0, p + 2.0)
        terms.append(ym * p1 / (p + 1.0))
        terms.append(-slope * (p2 / (p + 2.0) - um * p1 / (p + 1.0)))
    return math.fsum(terms)
