"""fracspline: multi-term fractional differential equations by spline collocation.

Reduce Caputo/Riemann-Liouville initial value problems and Caputo boundary
value problems to fractional integral equations, solve them on piecewise
linear splines with exact convolution weights, and map the result back to the
original unknown.  See the README for the CLI and configuration format.
"""

from .backend import BACKEND
from .config import ConfigError, ProblemConfig, SolverSettings, load_config, loads_config, write_config
from .expr import (
    ExprEvalError,
    ExprSyntaxError,
    RhsFunction,
    eval_rhs,
    lipschitz_probe,
    parse,
    pretty,
)
from .fractional import (
    PowerTerm,
    caputo_tail_derivative,
    frac_integral_power,
    gamma_fn,
    initial_polynomial,
    reciprocal_gamma,
    rl_derivative_power,
)
from .registry import BENCHMARKS, Benchmark, get_benchmark, mittag_leffler_series
from .solver import (
    CollocationConfig,
    CollocationSolution,
    ConvergenceError,
    ConvergenceReport,
    contraction_constant,
    eoc_study,
    residual_supnorm,
    solve_fredholm,
    solve_problem,
    solve_volterra,
)
from .splines import (
    LinearSpline,
    UniformGrid,
    frac_integral_at,
    frac_integral_at_nodes,
    frac_integral_weights,
    interpolate,
    modulus_of_continuity,
)
from .transform import (
    CaputoBvp,
    CaputoIvp,
    IntegralEquation,
    RlIvp,
    SolutionFunction,
    bvp_linear_solve,
    green_function,
    reconstruct_bvp,
    reconstruct_ivp,
    reconstruct_rl,
    reduce_bvp,
    reduce_ivp_caputo,
    reduce_ivp_rl,
    spline_moment,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BENCHMARKS",
    "Benchmark",
    "CaputoBvp",
    "CaputoIvp",
    "CollocationConfig",
    "CollocationSolution",
    "ConfigError",
    "ConvergenceError",
    "ConvergenceReport",
    "ExprEvalError",
    "ExprSyntaxError",
    "IntegralEquation",
    "LinearSpline",
    "PowerTerm",
    "ProblemConfig",
    "RhsFunction",
    "RlIvp",
    "SolutionFunction",
    "SolverSettings",
    "UniformGrid",
    "bvp_linear_solve",
    "caputo_tail_derivative",
    "contraction_constant",
    "eoc_study",
    "eval_rhs",
    "frac_integral_at",
    "frac_integral_at_nodes",
    "frac_integral_power",
    "frac_integral_weights",
    "gamma_fn",
    "get_benchmark",
    "green_function",
    "initial_polynomial",
    "interpolate",
    "lipschitz_probe",
    "load_config",
    "loads_config",
    "mittag_leffler_series",
    "modulus_of_continuity",
    "parse",
    "pretty",
    "reciprocal_gamma",
    "reconstruct_bvp",
    "reconstruct_ivp",
    "reconstruct_rl",
    "reduce_bvp",
    "reduce_ivp_caputo",
    "reduce_ivp_rl",
    "residual_supnorm",
    "rl_derivative_power",
    "solve_fredholm",
    "solve_problem",
    "solve_volterra",
    "spline_moment",
    "write_config",
]
