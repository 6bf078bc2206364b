"""Built-in manufactured benchmark problems.

Each entry pins a problem whose exact solution is known in closed form (power
functions whose fractional derivatives are again power functions, classical
second-order boundary problems, or the Mittag-Leffler series for the one
genuinely transcendental case).  The exact solutions are stated in the same
expression syntax as the right-hand sides, so they can be parsed and evaluated
by the package itself; tests cross-check every entry against independent
oracles before trusting it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .config import ProblemConfig, SolverSettings
from .expr import parse
from .fractional import gamma_fn

__all__ = ["Benchmark", "BENCHMARKS", "get_benchmark", "mittag_leffler_series"]


def mittag_leffler_series(t: float, terms: int = 30) -> float:
    """Truncated series sum_k t**(k/2) / gamma(k/2 + 1).

    Solves y = I^{1/2} y + 1 (it is the Mittag-Leffler function E_{1/2} at
    sqrt(t)); 30 terms are far below double rounding on [0, 1].
    """
    acc = 0.0
    for k in range(terms):
        acc += t ** (k / 2.0) / gamma_fn(k / 2.0 + 1.0)
    return acc


@dataclass(frozen=True)
class Benchmark:
    """A manufactured problem: config plus its exact solution and expected rate."""

    name: str
    description: str
    config: ProblemConfig
    exact_y: str | None
    exact_x: str | None
    oracle: str
    expected_eoc: float | None  # None: the exact y lies in S_1, errors at roundoff

    def exact_y_fn(self):
        if self.exact_y is not None:
            f = parse(self.exact_y)
            return lambda t: f(t, [0.0])
        if self.name == "ml_linear":
            return mittag_leffler_series
        return None

    def exact_x_fn(self):
        if self.exact_x is not None:
            f = parse(self.exact_x)
            return lambda t: f(t, [0.0])
        if self.name == "ml_linear":
            return mittag_leffler_series
        return None


def _solver(n: int = 16, refinements: int = 3, tol: float = 1e-10) -> SolverSettings:
    return SolverSettings(n=n, tol=tol, refinements=refinements)


BENCHMARKS: tuple[Benchmark, ...] = (
    Benchmark(
        name="ivp_smooth_m0",
        description="one-term Caputo IVP, exact x = t^2.5 (smooth y = c t^2)",
        config=ProblemConfig(
            kind="ivp_caputo", alpha=0.5, alphas=(), x0=(0.0,), T=1.0,
            rhs="gamma(3.5)/gamma(3)*t^2 + 0.5*(x - t^2.5)",
            solver=_solver(),
        ),
        exact_y="gamma(3.5)/gamma(3)*t^2",
        exact_x="t^2.5",
        oracle="power-law fractional derivative of t^2.5, order 0.5",
        expected_eoc=2.0,
    ),
    Benchmark(
        name="ivp_smooth_m1",
        description="two-term Caputo IVP with nonzero initial data, exact x = t^3.5 + 1 + 2t",
        config=ProblemConfig(
            kind="ivp_caputo", alpha=1.5, alphas=(0.5,), x0=(1.0, 2.0), T=1.0,
            rhs=("gamma(4.5)/gamma(3)*t^2 + 0.3*(x - (t^3.5 + 1 + 2*t))"
                 " + 0.2*(d1 - (gamma(4.5)/gamma(4)*t^3 + 2*t^0.5/gamma(1.5)))"),
            solver=_solver(),
        ),
        exact_y="gamma(4.5)/gamma(3)*t^2",
        exact_x="t^3.5 + 1 + 2*t",
        oracle="termwise power-law Caputo derivatives at orders 1.5 and 0.5",
        expected_eoc=2.0,
    ),
    Benchmark(
        name="ivp_smooth_m2",
        description="three-term Caputo IVP, exact x = t^3.75",
        config=ProblemConfig(
            kind="ivp_caputo", alpha=1.75, alphas=(1.25, 0.5), x0=(0.0, 0.0), T=1.0,
            rhs=("gamma(4.75)/gamma(3)*t^2 + 0.3*(x - t^3.75)"
                 " + 0.2*(d1 - gamma(4.75)/gamma(3.5)*t^2.5)"
                 " + 0.1*(d2 - gamma(4.75)/gamma(4.25)*t^3.25)"),
            solver=_solver(),
        ),
        exact_y="gamma(4.75)/gamma(3)*t^2",
        exact_x="t^3.75",
        oracle="termwise power-law Caputo derivatives at orders 1.75, 1.25, 0.5",
        expected_eoc=2.0,
    ),
    Benchmark(
        name="ivp_nonlinear",
        description="quadratic nonlinearity, exact x = t^2.5",
        config=ProblemConfig(
            kind="ivp_caputo", alpha=0.5, alphas=(), x0=(0.0,), T=1.0,
            rhs="gamma(3.5)/gamma(3)*t^2 + 0.3*(t^5 - x^2)",
            # solution stays in [0, 1]; the default +-2 box would inflate L
            solver=SolverSettings(n=16, refinements=3, lipschitz_box=(0.0, 1.0, 0.0, 1.1)),
        ),
        exact_y="gamma(3.5)/gamma(3)*t^2",
        exact_x="t^2.5",
        oracle="power-law derivative of t^2.5 plus the identity (t^2.5)^2 = t^5",
        expected_eoc=2.0,
    ),
    Benchmark(
        name="ivp_rough",
        description="low-regularity manufactured y = t^0.8 (continuous, not C^1)",
        config=ProblemConfig(
            kind="ivp_caputo", alpha=0.5, alphas=(), x0=(1.0,), T=1.0,
            rhs="t^0.8 + 0.5*(x - (gamma(1.8)/gamma(2.3)*t^1.3 + 1))",
            solver=_solver(n=32, refinements=3),
        ),
        exact_y="t^0.8",
        exact_x="gamma(1.8)/gamma(2.3)*t^1.3 + 1",
        oracle="power-law fractional integral of t^0.8, order 0.5",
        expected_eoc=0.8,
    ),
    Benchmark(
        name="ml_linear",
        description="y = I^0.5 y + 1; exact solution is the Mittag-Leffler series",
        config=ProblemConfig(
            kind="ivp_caputo", alpha=0.5, alphas=(), x0=(1.0,), T=1.0,
            rhs="x",
            solver=_solver(n=64, refinements=3),
        ),
        exact_y=None,  # sum_{k<30} t^(k/2)/gamma(k/2+1), see mittag_leffler_series
        exact_x=None,
        oracle="30-term Mittag-Leffler series evaluation",
        expected_eoc=0.5,
    ),
    Benchmark(
        name="rl_smooth",
        description="two-term Riemann-Liouville IVP, exact x = t^2.4",
        config=ProblemConfig(
            kind="ivp_rl", alpha=0.9, alphas=(0.3,), T=1.0,
            rhs=("gamma(3.4)/gamma(2.5)*t^1.5 + 0.4*(x - t^2.4)"
                 " + 0.2*(d1 - gamma(3.4)/gamma(3.1)*t^2.1)"),
            solver=_solver(),
        ),
        exact_y="gamma(3.4)/gamma(2.5)*t^1.5",
        exact_x="t^2.4",
        oracle="power-law RL derivatives at orders 0.9 and 0.3",
        expected_eoc=1.5,
    ),
    Benchmark(
        name="rl_linear",
        description="RL IVP whose exact y is linear; the spline reproduces it exactly",
        config=ProblemConfig(
            kind="ivp_rl", alpha=0.9, alphas=(), T=1.0,
            rhs="gamma(2.9)/gamma(2)*t + 0.5*(x - t^1.9)",
            solver=_solver(),
        ),
        exact_y="gamma(2.9)/gamma(2)*t",
        exact_x="t^1.9",
        oracle="power-law RL derivative of t^1.9, order 0.9",
        expected_eoc=None,
    ),
    Benchmark(
        name="bvp_classical",
        description="q = 2 Dirichlet problem x'' = -1, exact x = t(1-t)/2",
        config=ProblemConfig(
            kind="bvp", q=2.0, qs=(), A=1.0, B=0.0, eta1=0.0, eta2=0.0,
            rhs="0 - 1",
            solver=_solver(),
        ),
        exact_y="0 - 1",
        exact_x="t*(1 - t)/2",
        oracle="classical two-point boundary problem",
        expected_eoc=None,
    ),
    Benchmark(
        name="bvp_frac_linear",
        description="q = 1.5 Robin problem with exact y = t (spline-exact)",
        config=ProblemConfig(
            kind="bvp", q=1.5, qs=(), A=1.0, B=0.5, eta1=0.2, eta2=1.0,
            rhs=("t + 0.3*(x - (t^2.5/gamma(3.5) + (0.5 - t)/gamma(3.5)"
                 " + 0.5*(0.5 - t)/gamma(2.5) + 0.8*t - 0.2))"),
            solver=_solver(n=32),
        ),
        exact_y="t",
        exact_x=("t^2.5/gamma(3.5) + (0.5 - t)/gamma(3.5)"
                 " + 0.5*(0.5 - t)/gamma(2.5) + 0.8*t - 0.2"),
        oracle="beta-function moments of y = t against (1-s)^(q-1), (1-s)^(q-2)",
        expected_eoc=None,
    ),
    Benchmark(
        name="bvp_frac_rough",
        description="q = 1.5 Robin problem, manufactured y = t^1.25",
        config=ProblemConfig(
            kind="bvp", q=1.5, qs=(), A=1.0, B=0.5, eta1=0.0, eta2=0.0,
            rhs=("t^1.25 + 0.25*(x - (gamma(2.25)/gamma(3.75)*t^2.75"
                 " + (0.5 - t)*gamma(2.25)/gamma(3.75)"
                 " + 0.5*(0.5 - t)*gamma(2.25)/gamma(2.75)))"),
            solver=_solver(n=32),
        ),
        exact_y="t^1.25",
        exact_x=("gamma(2.25)/gamma(3.75)*t^2.75 + (0.5 - t)*gamma(2.25)/gamma(3.75)"
                 " + 0.5*(0.5 - t)*gamma(2.25)/gamma(2.75)"),
        oracle="beta-function moments of t^1.25 against the boundary kernels",
        expected_eoc=1.25,
    ),
)


def get_benchmark(name: str) -> Benchmark:
    for entry in BENCHMARKS:
        if entry.name == name:
            return entry
    raise KeyError(f"no benchmark named {name!r}; known: {[b.name for b in BENCHMARKS]}")
