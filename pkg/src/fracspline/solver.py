"""Spline collocation for the reduced integral equations.

Volterra-type equations (initial value reductions, no nonlocal terms) are
solved by node marching: at every grid node the history sum is frozen and one
scalar fixed-point equation is solved.  Equations with nonlocal moments
(boundary value reductions) use a global Picard sweep over the whole node
vector.  Both paths report iteration diagnostics, a sampled Lipschitz/
contraction estimate, and an a-posteriori residual.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import backend
from .expr import ExprEvalError, lipschitz_probe
from .fractional import gamma_fn
from .splines import (
    LinearSpline,
    UniformGrid,
    _scaled_kernels,
    frac_integral_at,
    modulus_of_continuity,
)
from .transform import (
    CaputoBvp,
    CaputoIvp,
    IntegralEquation,
    RlIvp,
    SolutionFunction,
    reconstruct_bvp,
    reconstruct_ivp,
    reconstruct_rl,
    reduce_bvp,
    reduce_ivp_caputo,
    reduce_ivp_rl,
    spline_moment,
)

__all__ = [
    "CollocationConfig",
    "CollocationSolution",
    "ConvergenceReport",
    "ConvergenceError",
    "contraction_constant",
    "solve_volterra",
    "solve_fredholm",
    "solve_problem",
    "residual_supnorm",
    "eoc_study",
    "WARN_CONTRACTION",
    "WARN_SECANT",
    "WARN_MOMENT_SINGULARITY",
    "WARN_ROUNDOFF_SLOPES",
]

WARN_CONTRACTION = "[WARN contraction]"
WARN_SECANT = "[WARN secant-fallback]"
WARN_MOMENT_SINGULARITY = "[WARN moment-singularity]"
WARN_ROUNDOFF_SLOPES = "[WARN slopes-roundoff]"

Problem = CaputoIvp | RlIvp | CaputoBvp


class ConvergenceError(RuntimeError):
    """Fixed-point iteration failed; carries the node index and last residual."""

    def __init__(self, message: str, node: int | None = None, residual: float | None = None):
        super().__init__(message)
        self.node = node
        self.residual = residual


@dataclass(frozen=True)
class CollocationConfig:
    """Solver knobs: grid size, stop tolerance, iteration caps, probe settings."""

    n: int = 64
    tol: float = 1e-10
    max_iter: int = 100
    lipschitz_box: tuple[tuple[float, float], ...] | None = None
    lipschitz_samples: int = 4000
    strict_contraction: bool = False

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"need at least one subinterval, got n={self.n}")
        if not self.tol > 0.0:
            raise ValueError(f"tolerance must be positive, got {self.tol}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be at least 1, got {self.max_iter}")


@dataclass(frozen=True)
class CollocationSolution:
    """Solved spline plus diagnostics from the collocation sweep."""

    y: LinearSpline
    x: SolutionFunction | None
    iterations: tuple[int, ...]
    residual: float
    lipschitz_estimate: float
    contraction_estimate: float
    warnings: tuple[str, ...]
    secant_fallbacks: int = 0
    sweep_deltas: tuple[float, ...] = ()
    node_deltas: tuple[tuple[float, ...], ...] = ()


@dataclass(frozen=True)
class ConvergenceReport:
    """Per-level sup-norm errors and the dyadic convergence-order slopes."""

    levels: tuple[int, ...]
    hs: tuple[float, ...]
    errors: tuple[float, ...]
    slopes: tuple[float, ...]
    moduli: tuple[float, ...] = ()
    roundoff: bool = False
    reference: str = "exact"


def contraction_constant(eq: IntegralEquation, L: float) -> float:
    """Fixed-point contraction bound L * sum_j T^beta_j / gamma(beta_j + 1).

    Nonlocal terms add L * sup|kappa| * Phi_mu[1] per term (the operator norm
    of the moment functional on constants), with Phi_mu[1] = 1/mu.
    """
    if L < 0.0:
        raise ValueError(f"Lipschitz constant must be nonnegative, got {L}")
    total = 0.0
    probe = np.linspace(0.0, eq.T, 129)
    for arg in eq.args:
        total += eq.T ** arg.beta / gamma_fn(arg.beta + 1.0)
        for term in arg.nonlocal_terms:
            sup_kappa = max(abs(term.coefficient(float(t))) for t in probe)
            total += sup_kappa / term.moment_order
    return L * total


def unit_horizon_constant(eq: IntegralEquation, L: float) -> float:
    """The same bound without the T**beta factors (tight only for T = 1)."""
    total = sum(1.0 / gamma_fn(arg.beta + 1.0) for arg in eq.args)
    return L * total


def _default_box(eq: IntegralEquation) -> tuple[tuple[float, float], ...]:
    return ((0.0, eq.T),) + ((-2.0, 2.0),) * (len(eq.args))


def _probe_contraction(eq: IntegralEquation, cfg: CollocationConfig) -> tuple[float, float, list[str]]:
    box = cfg.lipschitz_box if cfg.lipschitz_box is not None else _default_box(eq)
    L = lipschitz_probe(eq.f, box, cfg.lipschitz_samples)
    Lt = contraction_constant(eq, L)
    warnings = []
    if Lt >= 1.0:
        warnings.append(
            f"{WARN_CONTRACTION} estimated contraction constant {Lt:.4g} >= 1; "
            "the fixed-point theory does not guarantee convergence"
        )
    return L, Lt, warnings


def _solve_scalar(phi: Callable[[float], float], y0: float, tol: float,
                  max_iter: int) -> tuple[float, int, bool, list[float]]:
    """Solve y = phi(y) near y0: damped fixed point, then safeguarded secant.

    Returns (root, iterations, used_secant, deltas).  The damping factor is
    halved whenever the update oscillates without shrinking; after max_iter/2
    plain steps the method switches to a secant iteration on y - phi(y),
    clipped into a bracket once a sign change is seen.
    """
    theta = 1.0
    y = y0
    deltas: list[float] = []
    prev_delta = None
    switch_at = max(2, max_iter // 2)
    for it in range(1, switch_at + 1):
        fy = phi(y)
        delta = fy - y
        deltas.append(abs(delta))
        if abs(delta) <= tol * (1.0 + abs(fy)):
            return fy, it, False, deltas
        if prev_delta is not None and delta * prev_delta < 0.0 and abs(delta) >= abs(prev_delta):
            theta = 0.5 * theta
        y = y + theta * delta
        prev_delta = delta

    # Safeguarded secant on F(y) = phi(y) - y.
    a = y
    fa = phi(a) - a
    b = a + (theta * fa if fa != 0.0 else tol)
    fb = phi(b) - b
    bracket = None  # ((lo, flo), (hi, fhi)) with flo * fhi < 0
    if fa * fb < 0.0:
        bracket = ((a, fa), (b, fb)) if a < b else ((b, fb), (a, fa))
    for it in range(switch_at + 1, max_iter + 1):
        if abs(fb) <= tol * (1.0 + abs(b)):
            return b, it, True, deltas
        denom = fb - fa
        c = b - fb * (b - a) / denom if denom != 0.0 else b + tol * (1.0 + abs(b))
        if bracket is not None:
            (blo, flo), (bhi, fhi) = bracket
            if not (blo < c < bhi):
                c = 0.5 * (blo + bhi)
        fc = phi(c) - c
        deltas.append(abs(fc))
        if bracket is not None:
            (blo, flo), (bhi, fhi) = bracket
            if flo * fc < 0.0:
                bracket = ((blo, flo), (c, fc))
            else:
                bracket = ((c, fc), (bhi, fhi))
        elif fb * fc < 0.0:
            bracket = ((b, fb), (c, fc)) if b < c else ((c, fc), (b, fb))
        a, fa = b, fb
        b, fb = c, fc
    raise ConvergenceError(
        f"scalar fixed point did not converge within {max_iter} iterations "
        f"(last residual {abs(fb):.3e})",
        residual=abs(fb),
    )


def solve_volterra(eq: IntegralEquation, cfg: CollocationConfig) -> CollocationSolution:
    """Node-marching collocation for equations without nonlocal terms.

    Node 0 is a direct evaluation (all integrals vanish there); at node i the
    lag sums over y_0..y_{i-1} are frozen and the remaining scalar equation in
    y_i is solved with :func:`_solve_scalar`, warm-started from y_{i-1}.
    """
    if eq.has_nonlocal:
        raise ValueError("node marching cannot handle nonlocal terms; use solve_fredholm")
    L, Lt, warnings = _probe_contraction(eq, cfg)
    if cfg.strict_contraction and Lt >= 1.0:
        raise ConvergenceError(
            f"contraction estimate {Lt:.4g} >= 1 and strict mode is on", residual=Lt
        )
    grid = UniformGrid(eq.T, cfg.n)
    h = grid.h
    nargs = len(eq.args)
    kernels = [_scaled_kernels(arg.beta, h, cfg.n) for arg in eq.args]
    g_nodes = np.array(
        [[arg.forcing(float(i * h)) for arg in eq.args] for i in range(cfg.n + 1)]
    )
    y = np.zeros(cfg.n + 1)
    iterations = [0] * (cfg.n + 1)
    node_deltas: list[tuple[float, ...]] = [()]
    secant_count = 0
    try:
        y[0] = eq.f(0.0, g_nodes[0].tolist())
    except ExprEvalError as exc:
        raise ConvergenceError(f"rhs evaluation failed at node 0: {exc}", node=0) from exc
    iterations[0] = 1
    z = [0.0] * nargs
    for i in range(1, cfg.n + 1):
        ti = i * h
        lags = [backend.conv_lag(kern, bnd, y, i) for kern, bnd, _ in kernels]
        diags = [c for _, _, c in kernels]

        def phi(v: float) -> float:
            for j in range(nargs):
                z[j] = g_nodes[i][j] + lags[j] + diags[j] * v
            return eq.f(ti, z)

        try:
            root, its, used_secant, deltas = _solve_scalar(phi, y[i - 1], cfg.tol, cfg.max_iter)
        except ConvergenceError as exc:
            raise ConvergenceError(
                f"node {i} (t={ti:.6g}) did not converge: {exc}", node=i,
                residual=exc.residual,
            ) from exc
        except ExprEvalError as exc:
            raise ConvergenceError(
                f"rhs evaluation failed at node {i} (t={ti:.6g}): {exc}", node=i
            ) from exc
        y[i] = root
        iterations[i] = its
        node_deltas.append(tuple(deltas))
        if used_secant:
            secant_count += 1
    if secant_count:
        warnings.append(
            f"{WARN_SECANT} scalar solver fell back to secant at {secant_count} node(s)"
        )
    spline = LinearSpline(grid, y)
    residual = _node_residual(eq, spline, g_nodes, kernels)
    return CollocationSolution(
        y=spline,
        x=None,
        iterations=tuple(iterations),
        residual=residual,
        lipschitz_estimate=L,
        contraction_estimate=Lt,
        warnings=tuple(warnings),
        secant_fallbacks=secant_count,
        node_deltas=tuple(node_deltas),
    )


def _node_residual(eq: IntegralEquation, s: LinearSpline, g_nodes, kernels) -> float:
    y = s.values
    n = s.grid.N
    moments = _equation_moments(eq, s)
    worst = 0.0
    for i in range(n + 1):
        ti = i * s.grid.h
        z = []
        for j, arg in enumerate(eq.args):
            kern, bnd, c = kernels[j]
            conv = backend.conv_lag(kern, bnd, y, i) + (c * y[i] if i > 0 else 0.0)
            zj = g_nodes[i][j] + conv
            for term, phi in zip(arg.nonlocal_terms, moments.get(j, ())):
                zj += term.coefficient(ti) * phi
            z.append(zj)
        worst = max(worst, abs(y[i] - eq.f(ti, z)))
    return worst


def _equation_moments(eq: IntegralEquation, s: LinearSpline) -> dict[int, tuple[float, ...]]:
    out: dict[int, tuple[float, ...]] = {}
    for j, arg in enumerate(eq.args):
        if arg.nonlocal_terms:
            out[j] = tuple(spline_moment(s, term.moment_order) for term in arg.nonlocal_terms)
    return out


def solve_fredholm(eq: IntegralEquation, cfg: CollocationConfig) -> CollocationSolution:
    """Global Picard sweep for equations that may carry nonlocal moments.

    Every sweep recomputes all convolution sums and moments from the previous
    iterate; the sweep stops when the sup-norm update drops below tol.
    """
    L, Lt, warnings = _probe_contraction(eq, cfg)
    if cfg.strict_contraction and Lt >= 1.0:
        raise ConvergenceError(
            f"contraction estimate {Lt:.4g} >= 1 and strict mode is on", residual=Lt
        )
    for arg in eq.args:
        for term in arg.nonlocal_terms:
            if term.moment_order < 0.01:
                warnings.append(
                    f"{WARN_MOMENT_SINGULARITY} moment order {term.moment_order:.3g} is "
                    "nearly singular; expect amplified rounding"
                )
    grid = UniformGrid(eq.T, cfg.n)
    h = grid.h
    nodes = grid.nodes()
    kernels = [_scaled_kernels(arg.beta, h, cfg.n) for arg in eq.args]
    g_nodes = np.array(
        [[arg.forcing(float(t)) for arg in eq.args] for t in nodes]
    )
    kappa_nodes = {
        j: np.array([[term.coefficient(float(t)) for term in arg.nonlocal_terms] for t in nodes])
        for j, arg in enumerate(eq.args)
        if arg.nonlocal_terms
    }
    y = np.zeros(cfg.n + 1)
    deltas: list[float] = []
    sweeps = 0
    converged = False
    while sweeps < cfg.max_iter:
        sweeps += 1
        spline = LinearSpline(grid, y)
        moments = _equation_moments(eq, spline)
        convs = [backend.conv_at_nodes(kern, bnd, c, y) for kern, bnd, c in kernels]
        ynew = np.empty_like(y)
        try:
            for i in range(cfg.n + 1):
                z = []
                for j in range(len(eq.args)):
                    zj = g_nodes[i][j] + convs[j][i]
                    if j in moments:
                        zj += float(kappa_nodes[j][i] @ np.asarray(moments[j]))
                    z.append(zj)
                ynew[i] = eq.f(float(nodes[i]), z)
        except ExprEvalError as exc:
            raise ConvergenceError(f"rhs evaluation failed in sweep {sweeps}: {exc}") from exc
        delta = float(np.max(np.abs(ynew - y)))
        deltas.append(delta)
        y = ynew
        if delta <= cfg.tol:
            converged = True
            break
    if not converged:
        ratio = deltas[-1] / deltas[-2] if len(deltas) > 1 and deltas[-2] > 0 else math.nan
        raise ConvergenceError(
            f"Picard sweep did not converge within {cfg.max_iter} sweeps "
            f"(last delta {deltas[-1]:.3e}, observed ratio {ratio:.3g})",
            residual=deltas[-1],
        )
    spline = LinearSpline(grid, y)
    residual = _node_residual(eq, spline, g_nodes, kernels)
    return CollocationSolution(
        y=spline,
        x=None,
        iterations=(sweeps,),
        residual=residual,
        lipschitz_estimate=L,
        contraction_estimate=Lt,
        warnings=tuple(warnings),
        sweep_deltas=tuple(deltas),
    )


def _reduce(problem: Problem) -> IntegralEquation:
    if isinstance(problem, CaputoIvp):
        return reduce_ivp_caputo(problem)
    if isinstance(problem, RlIvp):
        return reduce_ivp_rl(problem)
    if isinstance(problem, CaputoBvp):
        return reduce_bvp(problem)
    raise TypeError(f"unsupported problem type {type(problem).__name__}")


def _reconstruct(problem: Problem, y: LinearSpline) -> SolutionFunction:
    if isinstance(problem, CaputoIvp):
        return reconstruct_ivp(y, problem)
    if isinstance(problem, RlIvp):
        return reconstruct_rl(y, problem)
    return reconstruct_bvp(y, problem)


def solve_problem(problem: Problem, cfg: CollocationConfig) -> CollocationSolution:
    """Reduce, solve with the right scheme, and attach the reconstructed x."""
    eq = _reduce(problem)
    if eq.has_nonlocal:
        sol = solve_fredholm(eq, cfg)
    else:
        sol = solve_volterra(eq, cfg)
    x = _reconstruct(problem, sol.y)
    return CollocationSolution(
        y=sol.y,
        x=x,
        iterations=sol.iterations,
        residual=sol.residual,
        lipschitz_estimate=sol.lipschitz_estimate,
        contraction_estimate=sol.contraction_estimate,
        warnings=sol.warnings,
        secant_fallbacks=sol.secant_fallbacks,
        sweep_deltas=sol.sweep_deltas,
        node_deltas=sol.node_deltas,
    )


def residual_supnorm(eq: IntegralEquation, y: LinearSpline, probe_count: int = 201) -> float:
    """Max over probe points of |y(t) - f(t, assembled arguments)|.

    Probes are the grid nodes plus a uniform grid of ``probe_count`` points;
    the integrals are evaluated with the exact off-node spline formulas, so
    this is an independent check on the collocation sweep.
    """
    ts = np.unique(np.concatenate([y.grid.nodes(), np.linspace(0.0, eq.T, probe_count)]))
    moments = _equation_moments(eq, y)
    ints = [frac_integral_at(y, arg.beta, ts) for arg in eq.args]
    yvals = y(ts)
    worst = 0.0
    for k, t in enumerate(ts):
        t = float(t)
        z = []
        for j, arg in enumerate(eq.args):
            zj = arg.forcing(t) + float(ints[j][k])
            for term, phi in zip(arg.nonlocal_terms, moments.get(j, ())):
                zj += term.coefficient(t) * phi
            z.append(zj)
        worst = max(worst, abs(float(yvals[k]) - eq.f(t, z)))
    return worst


def eoc_study(problem: Problem, levels: Sequence[int], cfg: CollocationConfig,
              reference: Callable[[float], float] | None = None,
              measure_modulus: bool = False,
              probes_per_interval: int = 10) -> ConvergenceReport:
    """Solve on dyadically refined grids and report sup-norm errors and slopes.

    ``levels`` must be successive halvings (each entry twice the previous).
    With no ``reference`` callable, one extra halving is solved and used as the
    proxy reference.  Errors are measured on the coarsest grid's nodes plus a
    dense uniform probe grid; slopes are log2 error ratios.
    """
    levels = [int(n) for n in levels]
    if len(levels) < 2:
        raise ValueError("need at least two refinement levels")
    for a, b in zip(levels, levels[1:]):
        if b != 2 * a:
            raise ValueError(f"levels must halve the step each time, got {levels}")
    solve_levels = list(levels)
    ref_kind = "exact"
    if reference is None:
        solve_levels.append(2 * levels[-1])
        ref_kind = "proxy"
    solutions = []
    for n in solve_levels:
        lcfg = CollocationConfig(
            n=n, tol=cfg.tol, max_iter=cfg.max_iter,
            lipschitz_box=cfg.lipschitz_box, lipschitz_samples=cfg.lipschitz_samples,
            strict_contraction=cfg.strict_contraction,
        )
        solutions.append(solve_problem(problem, lcfg))
    T = solutions[0].y.grid.T
    dense = np.linspace(0.0, T, probes_per_interval * max(solve_levels) + 1)
    ts = np.unique(np.concatenate([np.linspace(0.0, T, levels[0] + 1), dense]))
    if reference is None:
        ref_vals = solutions[-1].y(ts)
        solutions = solutions[:-1]
    else:
        ref_vals = np.array([float(reference(float(t))) for t in ts])
    errors = []
    for sol in solutions:
        errors.append(float(np.max(np.abs(sol.y(ts) - ref_vals))))
    slopes = tuple(
        math.log2(errors[k] / errors[k + 1]) if errors[k + 1] > 0 else math.inf
        for k in range(len(errors) - 1)
    )
    scale = float(np.max(np.abs(ref_vals))) + 1.0
    roundoff = max(errors) <= 1e-12 * scale
    moduli: tuple[float, ...] = ()
    if measure_modulus and reference is not None:
        moduli = tuple(
            modulus_of_continuity(reference, T / n, T) for n in levels
        )
    return ConvergenceReport(
        levels=tuple(levels),
        hs=tuple(T / n for n in levels),
        errors=tuple(errors),
        slopes=slopes,
        moduli=moduli,
        roundoff=roundoff,
        reference=ref_kind,
    )
