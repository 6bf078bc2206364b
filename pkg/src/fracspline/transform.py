"""Reduction of fractional differential problems to integral equations.

Three problem classes are supported: the Caputo initial value problem, the
Riemann-Liouville initial value problem (orders below one, zero initial state)
and the Caputo boundary value problem on [0, 1] with Robin-type conditions.
Each reduces to one canonical form

    y(t) = f(t, z_0(t), ..., z_m(t)),
    z_j(t) = g_j(t) + I^{beta_j} y(t) + sum_k kappa_{jk}(t) * Phi_{mu_k}[y],

where the Phi are fixed moments of y against (1-s)**(mu-1) (boundary problems
only).  Solving for y and mapping back to x are inverse operations up to the
spline approximation error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import backend
from .expr import RhsFunction
from .fractional import caputo_tail_derivative, gamma_fn, initial_polynomial
from .splines import LinearSpline, frac_integral_at, frac_integral_weights

__all__ = [
    "CaputoIvp",
    "RlIvp",
    "CaputoBvp",
    "NonlocalTerm",
    "EquationArgument",
    "IntegralEquation",
    "SolutionFunction",
    "reduce_ivp_caputo",
    "reduce_ivp_rl",
    "reduce_bvp",
    "reconstruct_ivp",
    "reconstruct_rl",
    "reconstruct_bvp",
    "green_function",
    "bvp_linear_solve",
    "spline_moment",
]


def _check_descending(main: float, rest: Sequence[float], lower: float, label: str) -> None:
    chain = [main, *rest]
    for a, b in zip(chain, chain[1:]):
        if not a > b:
            raise ValueError(f"{label} orders must be strictly descending, got {chain}")
    if not chain[-1] > lower:
        raise ValueError(f"{label} orders must stay above {lower}, got {chain}")


@dataclass(frozen=True)
class CaputoIvp:
    """D*^alpha x = f(t, x, D*^a1 x, ..., D*^am x) with classical initial data."""

    alpha: float
    alphas: tuple[float, ...]
    x0: tuple[float, ...]
    T: float
    f: RhsFunction

    def __post_init__(self) -> None:
        object.__setattr__(self, "alphas", tuple(float(a) for a in self.alphas))
        object.__setattr__(self, "x0", tuple(float(v) for v in self.x0))
        _check_descending(self.alpha, self.alphas, 0.0, "Caputo IVP")
        n = math.ceil(self.alpha)
        if len(self.x0) != n:
            raise ValueError(
                f"need ceil(alpha)={n} initial values for alpha={self.alpha}, got {len(self.x0)}"
            )
        if not self.T > 0.0:
            raise ValueError(f"horizon must be positive, got {self.T}")
        if self.f.arity != len(self.alphas):
            raise ValueError(
                f"rhs arity {self.f.arity} does not match {len(self.alphas)} derivative orders"
            )

    @property
    def n(self) -> int:
        return math.ceil(self.alpha)


@dataclass(frozen=True)
class RlIvp:
    """D^alpha x = f(t, x, D^a1 x, ...), all orders in (0, 1), x(0) = 0."""

    alpha: float
    alphas: tuple[float, ...]
    T: float
    f: RhsFunction

    def __post_init__(self) -> None:
        object.__setattr__(self, "alphas", tuple(float(a) for a in self.alphas))
        if not (0.0 < self.alpha < 1.0):
            raise ValueError(f"RL problem needs alpha in (0,1), got {self.alpha}")
        _check_descending(self.alpha, self.alphas, 0.0, "RL IVP")
        if not self.T > 0.0:
            raise ValueError(f"horizon must be positive, got {self.T}")
        if self.f.arity != len(self.alphas):
            raise ValueError(
                f"rhs arity {self.f.arity} does not match {len(self.alphas)} derivative orders"
            )


@dataclass(frozen=True)
class CaputoBvp:
    """D*^q x = f(t, x, D*^q1 x, ...) on [0,1] with A x + B x' given at both ends.

    Orders live in (1, 2]; A must be nonzero for the boundary operator to be
    invertible.
    """

    q: float
    qs: tuple[float, ...]
    A: float
    B: float
    eta1: float
    eta2: float
    f: RhsFunction

    def __post_init__(self) -> None:
        object.__setattr__(self, "qs", tuple(float(v) for v in self.qs))
        if not (1.0 < self.q <= 2.0):
            raise ValueError(f"BVP order q must lie in (1, 2], got {self.q}")
        _check_descending(self.q, self.qs, 1.0, "BVP")
        if self.A == 0.0:
            raise ValueError("boundary coefficient A must be nonzero")
        if self.f.arity != len(self.qs):
            raise ValueError(
                f"rhs arity {self.f.arity} does not match {len(self.qs)} derivative orders"
            )


@dataclass(frozen=True)
class NonlocalTerm:
    """kappa(t) * Phi_mu[y] with Phi_mu[y] = int_0^1 (1-s)**(mu-1) y(s) ds."""

    coefficient: Callable[[float], float]
    moment_order: float


@dataclass(frozen=True)
class EquationArgument:
    """One argument z_j(t) = forcing(t) + I^beta y(t) + nonlocal terms."""

    beta: float
    forcing: Callable[[float], float]
    nonlocal_terms: tuple[NonlocalTerm, ...] = ()


@dataclass(frozen=True)
class IntegralEquation:
    """Canonical reduced form y = f(t, z_0, ..., z_m)."""

    T: float
    args: tuple[EquationArgument, ...]
    f: RhsFunction

    def __post_init__(self) -> None:
        for arg in self.args:
            if not arg.beta > 0.0:
                raise ValueError(f"integral orders must be positive, got {arg.beta}")
        if self.f.arity != len(self.args) - 1:
            raise ValueError("rhs arity does not match the argument count")

    @property
    def has_nonlocal(self) -> bool:
        return any(arg.nonlocal_terms for arg in self.args)


def spline_moment(s: LinearSpline, mu: float) -> float:
    """Phi_mu[s] = int_0^1 (1-u)**(mu-1) s(u) du, exact for the spline.

    Equals gamma(mu) * I^mu s(1); the closed-form convolution weights absorb
    the weak singularity at u = 1 when mu < 1.
    """
    if abs(s.grid.T - 1.0) > 1e-12:
        raise ValueError("moments are defined for splines on [0, 1]")
    w = frac_integral_weights(mu, s.grid.N, s.grid.h)
    return gamma_fn(mu) * backend.cdot(w, s.values)


# --- reductions ---------------------------------------------------------------


def reduce_ivp_caputo(p: CaputoIvp) -> IntegralEquation:
    """Reduce the Caputo IVP: forcing terms carry the initial polynomial and its
    order-alpha_i tails, one integral of order alpha - alpha_i per argument."""
    x0 = p.x0
    args = [EquationArgument(p.alpha, lambda t, x0=x0: initial_polynomial(x0, t))]
    for a_i in p.alphas:
        n_i = math.ceil(a_i)
        args.append(
            EquationArgument(
                p.alpha - a_i,
                lambda t, a_i=a_i, n_i=n_i, x0=x0: caputo_tail_derivative(a_i, n_i, x0, t),
            )
        )
    return IntegralEquation(p.T, tuple(args), p.f)


def _zero(t: float) -> float:
    return 0.0


def reduce_ivp_rl(p: RlIvp) -> IntegralEquation:
    """Reduce the RL IVP; the zero initial state leaves no forcing at all."""
    args = [EquationArgument(p.alpha, _zero)]
    args += [EquationArgument(p.alpha - a_i, _zero) for a_i in p.alphas]
    return IntegralEquation(p.T, tuple(args), p.f)


def _bvp_affine(p: CaputoBvp) -> Callable[[float], float]:
    A, B, e1, e2 = p.A, p.B, p.eta1, p.eta2

    def g0(t: float) -> float:
        return ((A * (1.0 - t) + B) * e1 + (-B + A * t) * e2) / A ** 2

    return g0


def reduce_bvp(p: CaputoBvp) -> IntegralEquation:
    """Reduce the BVP to a fixed-point equation with two nonlocal moments.

    The state argument is the full solution representation

        x(t) = g_0(t) + I^q y(t) + k1(t) Phi_q[y] + k2(t) Phi_{q-1}[y],

    with k1 = (B - A t)/(A gamma(q)) and k2 = B (B - A t)/(A^2 gamma(q-1)); the
    k2 term drops out when B = 0.  Derivative arguments of order q_i > 1 see
    only I^{q - q_i} y: they annihilate the affine part of x.
    """
    A, B, q = p.A, p.B, p.q
    gq = gamma_fn(q)

    def k1(t: float) -> float:
        return (B - A * t) / (A * gq)

    terms = [NonlocalTerm(k1, q)]
    if B != 0.0:
        gq1 = gamma_fn(q - 1.0)

        def k2(t: float) -> float:
            return B * (B - A * t) / (A ** 2 * gq1)

        terms.append(NonlocalTerm(k2, q - 1.0))
    args = [EquationArgument(q, _bvp_affine(p), tuple(terms))]
    args += [EquationArgument(q - q_i, _zero) for q_i in p.qs]
    return IntegralEquation(1.0, tuple(args), p.f)


# --- reconstructions ----------------------------------------------------------


@dataclass(frozen=True)
class SolutionFunction:
    """The solution x recovered from the integral-equation solution y.

    Evaluates the state argument z_0 of the reduced equation: forcing plus
    I^beta_0 y plus any nonlocal corrections (with the moments frozen at
    construction).  ``derivative`` is the analytic x' where defined (beta_0 > 1).
    """

    y: LinearSpline
    beta0: float
    forcing: Callable[[float], float]
    nonlocal_terms: tuple[NonlocalTerm, ...] = ()
    moments: tuple[float, ...] = ()
    forcing_derivative: Callable[[float], float] | None = None
    coeff_derivatives: tuple[Callable[[float], float], ...] = ()

    def __call__(self, t):
        ts = np.atleast_1d(np.asarray(t, dtype=np.float64))
        out = frac_integral_at(self.y, self.beta0, ts)
        out = out + np.array([self.forcing(float(tv)) for tv in ts])
        for term, phi in zip(self.nonlocal_terms, self.moments):
            out = out + phi * np.array([term.coefficient(float(tv)) for tv in ts])
        return float(out[0]) if np.isscalar(t) or np.asarray(t).ndim == 0 else out

    def derivative(self, t: float) -> float:
        """x'(t); requires beta_0 > 1 so that d/dt I^beta = I^(beta-1)."""
        if not self.beta0 > 1.0:
            raise ValueError("derivative needs an integral order above 1")
        if self.forcing_derivative is None:
            raise ValueError("no analytic derivative attached to this solution")
        val = frac_integral_at(self.y, self.beta0 - 1.0, t) + self.forcing_derivative(t)
        for dk, phi in zip(self.coeff_derivatives, self.moments):
            val += phi * dk(t)
        return float(val)


def reconstruct_ivp(y: LinearSpline, p: CaputoIvp) -> SolutionFunction:
    """x(t) = I^alpha y(t) + initial polynomial."""
    x0 = p.x0

    def poly(t: float) -> float:
        return initial_polynomial(x0, t)

    def dpoly(t: float) -> float:
        # d/dt sum x_k t^k/k! = sum x_{k+1} t^k/k!
        return initial_polynomial(x0[1:], t) if len(x0) > 1 else 0.0

    return SolutionFunction(y, p.alpha, poly,
                            forcing_derivative=dpoly if p.alpha > 1.0 else None)


def reconstruct_rl(y: LinearSpline, p: RlIvp) -> SolutionFunction:
    """x(t) = I^alpha y(t); the implicit x(0) = 0 holds by construction."""
    return SolutionFunction(y, p.alpha, _zero)


def reconstruct_bvp(y: LinearSpline, p: CaputoBvp) -> SolutionFunction:
    """Assemble x from I^q y, the two exact moments and the boundary affine term."""
    eq = reduce_bvp(p)
    arg0 = eq.args[0]
    moments = tuple(spline_moment(y, term.moment_order) for term in arg0.nonlocal_terms)
    A, B, e1, e2, q = p.A, p.B, p.eta1, p.eta2, p.q

    def dg0(t: float) -> float:
        return (-A * e1 + A * e2) / A ** 2

    derivs: list[Callable[[float], float]] = [lambda t: -1.0 / gamma_fn(q)]
    if len(arg0.nonlocal_terms) > 1:
        derivs.append(lambda t: -B / (A * gamma_fn(q - 1.0)))
    return SolutionFunction(
        y,
        q,
        arg0.forcing,
        nonlocal_terms=arg0.nonlocal_terms,
        moments=moments,
        forcing_derivative=dg0,
        coeff_derivatives=tuple(derivs),
    )


# --- the Green's-function route (independent path, used as a cross-check) -----


def green_function(q: float, A: float, B: float, t: float, s: float) -> float:
    """Kernel G(t, s) of the linear BVP D*^q x = v with the Robin boundary pair.

    Weakly singular at s = 1 when q < 2 and B != 0 (returns a signed infinity
    there); both branches agree on the diagonal s = t.
    """
    if A == 0.0:
        raise ValueError("boundary coefficient A must be nonzero")
    if not (0.0 <= t <= 1.0 and 0.0 <= s <= 1.0):
        raise ValueError("G(t, s) is defined on the unit square")
    gq = gamma_fn(q)
    one_ms = 1.0 - s
    val = (B - A * t) * one_ms ** (q - 1.0) / (A * gq)
    if s < t:
        val += A * (t - s) ** (q - 1.0) / (A * gq)
    if B != 0.0:
        coef = B * (B - A * t) / (A ** 2 * gamma_fn(q - 1.0))
        if one_ms == 0.0:
            if q == 2.0:
                val += coef
            elif coef != 0.0:
                return math.copysign(math.inf, coef)
        else:
            val += coef * one_ms ** (q - 2.0)
    return val


def bvp_linear_solve(q: float, A: float, B: float, eta1: float, eta2: float,
                     v: LinearSpline, t) -> float | np.ndarray:
    """Solve D*^q x = v with the Robin boundary pair, evaluated at t.

    Integrates the Green kernel against the spline segment by segment with
    exact antiderivatives (the linear-case oracle for the reduction path; no
    quadrature, no shared code with the moment machinery).
    """
    if A == 0.0:
        raise ValueError("boundary coefficient A must be nonzero")
    if abs(v.grid.T - 1.0) > 1e-12:
        raise ValueError("the boundary problem lives on [0, 1]")
    ts = np.atleast_1d(np.asarray(t, dtype=np.float64))
    vals = v.values
    h = v.grid.h
    gq = gamma_fn(q)
    m1 = backend.kernel_segment_integrals(vals, h, 1.0, q - 1.0, 1.0)
    m2 = backend.kernel_segment_integrals(vals, h, 1.0, q - 2.0, 1.0) if B != 0.0 else 0.0
    out = np.empty(ts.shape[0])
    for k, tv in enumerate(ts):
        tv = float(tv)
        acc = ((A * (1.0 - tv) + B) * eta1 + (-B + A * tv) * eta2) / A ** 2
        if tv > 0.0:
            acc += backend.kernel_segment_integrals(vals, h, tv, q - 1.0, tv) / gq
        acc += (B - A * tv) / (A * gq) * m1
        if B != 0.0:
            acc += B * (B - A * tv) / (A ** 2 * gamma_fn(q - 1.0)) * m2
        out[k] = acc
    return float(out[0]) if np.isscalar(t) or np.asarray(t).ndim == 0 else out
