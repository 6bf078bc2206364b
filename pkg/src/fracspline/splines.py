"""Piecewise-linear splines on uniform grids and their exact fractional integrals.

The approximation space is S_1: continuous, linear between the nodes of a
uniform partition of [0, T].  Fractional integrals of such splines have closed
forms (each hat function is a sum of power terms), which gives both the
convolution weights used by the collocation sweep and a pointwise evaluator
for reconstruction between nodes.  No quadrature happens anywhere in this
module.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import backend
from .fractional import gamma_fn

__all__ = [
    "UniformGrid",
    "LinearSpline",
    "interpolate",
    "frac_integral_weights",
    "frac_integral_at_nodes",
    "frac_integral_at",
    "modulus_of_continuity",
]


@dataclass(frozen=True)
class UniformGrid:
    """Uniform partition 0 = t_0 < t_1 < ... < t_N = T with step h = T/N."""

    T: float
    N: int

    def __post_init__(self) -> None:
        if not (self.T > 0.0 and math.isfinite(self.T)):
            raise ValueError(f"interval length must be positive, got {self.T}")
        if self.N < 1:
            raise ValueError(f"need at least one subinterval, got N={self.N}")

    @property
    def h(self) -> float:
        return self.T / self.N

    def nodes(self) -> np.ndarray:
        return np.linspace(0.0, self.T, self.N + 1)

    def refine(self) -> "UniformGrid":
        return UniformGrid(self.T, 2 * self.N)


@dataclass(frozen=True)
class LinearSpline:
    """Element of S_1: nodal values on a uniform grid, linear in between."""

    grid: UniformGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.shape != (self.grid.N + 1,):
            raise ValueError(
                f"expected {self.grid.N + 1} nodal values, got shape {vals.shape}"
            )
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def __call__(self, t):
        """Evaluate at scalar or array t inside [0, T]."""
        t_arr = np.asarray(t, dtype=np.float64)
        if np.any(t_arr < 0.0) or np.any(t_arr > self.grid.T * (1.0 + 1e-15)):
            raise ValueError(f"evaluation point outside [0, {self.grid.T}]")
        out = np.interp(t_arr, self.grid.nodes(), self.values)
        return float(out) if np.isscalar(t) or t_arr.ndim == 0 else out


def interpolate(f: Callable[[float], float], grid: UniformGrid) -> LinearSpline:
    """Projection onto S_1: the spline matching ``f`` at every grid node."""
    vals = np.array([float(f(float(t))) for t in grid.nodes()])
    return LinearSpline(grid, vals)


# --- convolution weights -----------------------------------------------------
#
# Dimensionless kernels are cached per alpha and grown on demand; the h**alpha
# scaling is applied by the callers.  A lock guards growth so concurrent solves
# can share the cache.

_weight_cache: dict[float, tuple[np.ndarray, np.ndarray]] = {}
_weight_lock = threading.Lock()


def _weight_kernels(alpha: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    with _weight_lock:
        cached = _weight_cache.get(alpha)
        if cached is None or cached[0].shape[0] < n + 1:
            have = 0 if cached is None else cached[0].shape[0]
            cached = backend.conv_weight_arrays(alpha, max(n, 64, 2 * have))
            _weight_cache[alpha] = cached
        return cached


def _scaled_kernels(alpha: float, h: float, n: int) -> tuple[np.ndarray, np.ndarray, float]:
    """(kern, bnd, diag) already scaled by c = h**alpha / gamma(alpha+2)."""
    kern, bnd = _weight_kernels(alpha, n)
    c = h ** alpha / gamma_fn(alpha + 2.0)
    return kern[: n + 1] * c, bnd[: n + 1] * c, c


def frac_integral_weights(alpha: float, i: int, h: float) -> np.ndarray:
    """Row ``w[i, 0..i]`` with ``I^alpha y_N(t_i) = sum_j w[i,j] y_j`` exact on S_1.

    Row 0 is empty (the integral vanishes at t = 0).  For ``alpha = 1`` the row
    degenerates to the composite trapezoidal rule.
    """
    if not alpha > 0.0:
        raise ValueError(f"order must be positive, got {alpha}")
    if i < 0:
        raise ValueError(f"node index must be nonnegative, got {i}")
    if i == 0:
        return np.zeros(0)
    kern, bnd, c = _scaled_kernels(alpha, h, i)
    w = np.empty(i + 1)
    w[0] = bnd[i]
    if i > 1:
        w[1:i] = kern[i - 1:0:-1]
    w[i] = c
    return w


def frac_integral_at_nodes(s: LinearSpline, alpha: float) -> np.ndarray:
    """Vector of I^alpha s at every grid node (entry 0 is exactly 0)."""
    if not alpha > 0.0:
        raise ValueError(f"order must be positive, got {alpha}")
    kern, bnd, c = _scaled_kernels(alpha, s.grid.h, s.grid.N)
    return backend.conv_at_nodes(kern, bnd, c, s.values)


def frac_integral_at(s: LinearSpline, alpha: float, t) -> float | np.ndarray:
    """Exact I^alpha of the spline at arbitrary t in [0, T].

    Per-segment closed forms, no quadrature; at the nodes this agrees with
    :func:`frac_integral_at_nodes` up to rounding.
    """
    if not alpha > 0.0:
        raise ValueError(f"order must be positive, got {alpha}")
    t_arr = np.atleast_1d(np.asarray(t, dtype=np.float64))
    if np.any(t_arr < 0.0) or np.any(t_arr > s.grid.T * (1.0 + 1e-15)):
        raise ValueError(f"evaluation point outside [0, {s.grid.T}]")
    out = backend.frac_integral_spline(
        s.values, s.grid.h, alpha, 1.0 / gamma_fn(alpha), t_arr
    )
    return float(out[0]) if np.isscalar(t) or np.asarray(t).ndim == 0 else out


def modulus_of_continuity(f: Callable[[float], float], h: float, T: float,
                          samples: int | None = None) -> float:
    """Sampled modulus of continuity sup{|f(t+d) - f(t)| : |d| <= h} on [0, T].

    Dense-grid estimator (a lower bound on the true modulus).  The default
    resolution is 40 points per h-window so the window scale is well resolved.
    """
    if samples is None:
        samples = 40 * max(2, int(round(T / h)))
    if samples < 2:
        raise ValueError("need at least 2 sample points")
    ts = np.linspace(0.0, T, samples)
    vals = np.array([float(f(float(t))) for t in ts])
    step = T / (samples - 1)
    k = int(math.floor(h / step + 1e-12))
    k = max(1, min(k, samples - 1))
    windows = np.lib.stride_tricks.sliding_window_view(vals, k + 1)
    return float(np.max(windows.max(axis=1) - windows.min(axis=1)))
