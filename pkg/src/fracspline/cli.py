"""Command-line front end.

Subcommands::

    fracspline solve <config> [--out DIR] [--n N] [--refinements R] [--tol X]
    fracspline eoc <config>   [--out DIR] [--n N] [--refinements R] [--tol X]
    fracspline benchmarks [--run] [--out DIR]

``solve`` writes ``solution.csv`` (t, y, x at the nodes and four probe points
per subinterval), ``eoc.csv`` when at least two refinement levels are
requested, and ``run.log`` with the contraction diagnostics and warnings.
Floats are printed with shortest round-trip formatting, so identical inputs
produce byte-identical CSV files.

Exit codes: 0 success, 2 configuration error, 3 solver non-convergence,
4 input/output failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import backend
from .config import ConfigError, ProblemConfig, load_config, write_config
from .registry import BENCHMARKS
from .solver import (
    ConvergenceError,
    ConvergenceReport,
    eoc_study,
    solve_problem,
    unit_horizon_constant,
)
from .transform import CaputoBvp

__all__ = ["RunOutput", "run", "run_benchmarks", "main"]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_IO = 4

PROBES_PER_SUBINTERVAL = 4


@dataclass(frozen=True)
class RunOutput:
    """Everything one run produces, before and independent of file writing."""

    solution_rows: tuple[tuple[float, float, float], ...]
    eoc_rows: tuple[tuple[int, float, float, float | None], ...]
    log_lines: tuple[str, ...]


def _fmt(x: float) -> str:
    return repr(float(x))


def _solution_rows(sol) -> tuple[tuple[float, float, float], ...]:
    grid = sol.y.grid
    n, h = grid.N, grid.h
    ts = np.empty(n * (PROBES_PER_SUBINTERVAL + 1) + 1)
    k = 0
    for i in range(n):
        for p in range(PROBES_PER_SUBINTERVAL + 1):
            ts[k] = (i + p / (PROBES_PER_SUBINTERVAL + 1)) * h
            k += 1
    ts[k] = grid.T
    ys = sol.y(ts)
    xs = sol.x(ts)
    return tuple((float(t), float(y), float(x)) for t, y, x in zip(ts, ys, xs))


def _eoc_rows(report: ConvergenceReport):
    rows = []
    for k, (n, h, err) in enumerate(zip(report.levels, report.hs, report.errors)):
        slope = report.slopes[k - 1] if k > 0 else None
        rows.append((int(n), float(h), float(err), slope))
    return tuple(rows)


def run(config: ProblemConfig, output_dir: str | Path) -> RunOutput:
    """Solve per the configuration and write solution.csv / eoc.csv / run.log."""
    problem = config.problem()
    ccfg = config.solver.collocation(config.arity, config.horizon)
    sol = solve_problem(problem, ccfg)

    log: list[str] = []
    log.append(f"problem: {config.kind} (m={config.arity}, rhs: {config.rhs})")
    log.append(
        f"grid: N={ccfg.n} h={_fmt(config.horizon / ccfg.n)} T={_fmt(config.horizon)}"
    )
    log.append(f"backend: {backend.BACKEND}")
    log.append(
        f"lipschitz estimate: L={sol.lipschitz_estimate:.6g} "
        f"({ccfg.lipschitz_samples} samples)"
    )
    log.append(f"contraction constant: {sol.contraction_estimate:.6g} (horizon-aware)")
    if config.horizon != 1.0:
        eq_uh = unit_horizon_constant
        from .solver import _reduce  # local import to keep the public surface clean

        log.append(
            "contraction constant (unit-horizon formula, for reference): "
            f"{eq_uh(_reduce(problem), sol.lipschitz_estimate):.6g}"
        )
    if sol.sweep_deltas:
        log.append(f"iterations: {sol.iterations[0]} Picard sweeps")
        ratios = [
            d2 / d1 for d1, d2 in zip(sol.sweep_deltas, sol.sweep_deltas[1:]) if d1 > 0
        ]
        if ratios:
            log.append(f"observed sweep contraction ratio: {max(ratios):.4g} (max)")
    else:
        log.append(
            f"iterations: total={sum(sol.iterations)} "
            f"max-per-node={max(sol.iterations)} secant-fallbacks={sol.secant_fallbacks}"
        )
    log.append(f"residual sup-norm at nodes: {sol.residual:.6g}")
    if isinstance(problem, CaputoBvp):
        r1 = problem.A * sol.x(0.0) + problem.B * sol.x.derivative(0.0) - problem.eta1
        r2 = problem.A * sol.x(1.0) + problem.B * sol.x.derivative(1.0) - problem.eta2
        log.append(f"boundary residuals: {abs(r1):.6g} {abs(r2):.6g}")
    for w in sol.warnings:
        log.append(w)

    eoc_rows: tuple = ()
    if config.solver.refinements >= 2:
        levels = [ccfg.n * 2 ** k for k in range(config.solver.refinements)]
        report = eoc_study(problem, levels, ccfg, reference=None)
        eoc_rows = _eoc_rows(report)
        log.append(
            "eoc: levels=" + ",".join(str(n) for n in report.levels)
            + " slopes=" + ",".join(f"{s:.3f}" for s in report.slopes)
            + f" (reference: {report.reference})"
        )
        if report.roundoff:
            from .solver import WARN_ROUNDOFF_SLOPES

            log.append(
                f"{WARN_ROUNDOFF_SLOPES} errors are at rounding level; "
                "slopes are not meaningful"
            )

    out = RunOutput(_solution_rows(sol), eoc_rows, tuple(log))
    _write_outputs(out, Path(output_dir))
    return out


def _write_outputs(out: RunOutput, outdir: Path) -> None:
    outdir.mkdir(parents=True, exist_ok=True)
    lines = ["t,y,x"]
    lines += [f"{_fmt(t)},{_fmt(y)},{_fmt(x)}" for t, y, x in out.solution_rows]
    (outdir / "solution.csv").write_text("\n".join(lines) + "\n")
    if out.eoc_rows:
        lines = ["N,h,sup_error,eoc"]
        for n, h, err, slope in out.eoc_rows:
            tail = _fmt(slope) if slope is not None else ""
            lines.append(f"{n},{_fmt(h)},{_fmt(err)},{tail}")
        (outdir / "eoc.csv").write_text("\n".join(lines) + "\n")
    (outdir / "run.log").write_text("\n".join(out.log_lines) + "\n")


def run_benchmarks(outdir: str | Path) -> list[str]:
    """Run every registry entry into <outdir>/<name>/; returns the names run."""
    names = []
    for entry in BENCHMARKS:
        run(entry.config, Path(outdir) / entry.name)
        names.append(entry.name)
    return names


def _print_benchmarks() -> None:
    for entry in BENCHMARKS:
        print(f"{entry.name}")
        print(f"  kind:         {entry.config.kind}")
        print(f"  description:  {entry.description}")
        print(f"  rhs:          {entry.config.rhs}")
        if entry.exact_y is not None:
            print(f"  exact y:      {entry.exact_y}")
            print(f"  exact x:      {entry.exact_x}")
        else:
            print("  exact y = x:  sum_(k<30) t^(k/2)/gamma(k/2 + 1)  (series)")
        print(f"  oracle:       {entry.oracle}")
        if entry.expected_eoc is not None:
            print(f"  expected eoc: {entry.expected_eoc}")
        else:
            print("  expected eoc: exact in S_1 (errors at rounding level)")
        print()


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="fracspline",
        description="multi-term fractional differential equation solver "
        "(spline collocation)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_solve_args(p):
        p.add_argument("config", help="problem configuration file")
        p.add_argument("--out", default=".", help="output directory (default: .)")
        p.add_argument("--n", type=int, default=None, help="override grid size")
        p.add_argument("--refinements", type=int, default=None,
                       help="override refinement level count")
        p.add_argument("--tol", type=float, default=None, help="override tolerance")

    add_solve_args(sub.add_parser("solve", help="solve a problem and write CSV outputs"))
    p_eoc = sub.add_parser("eoc", help="run a convergence study (refinements >= 2)")
    add_solve_args(p_eoc)
    p_bench = sub.add_parser("benchmarks", help="list (or run) the built-in benchmarks")
    p_bench.add_argument("--run", action="store_true", help="solve every entry")
    p_bench.add_argument("--out", default="benchmark-out",
                         help="output directory for --run")

    args = parser.parse_args(argv)
    try:
        if args.command == "benchmarks":
            if args.run:
                for name in run_benchmarks(args.out):
                    print(f"ran {name}")
                print(f"outputs in {args.out}/")
            else:
                _print_benchmarks()
            return EXIT_OK
        config = load_config(args.config)
        config = config.with_overrides(n=args.n, refinements=args.refinements,
                                       tol=args.tol)
        if args.command == "eoc" and config.solver.refinements < 2:
            config = config.with_overrides(refinements=4)
        out = run(config, args.out)
        for line in out.log_lines:
            print(line)
        return EXIT_OK
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConvergenceError as exc:
        print(f"solver failed: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
