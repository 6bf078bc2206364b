"""Problem configuration files.

Flat, line-oriented ``key = value`` text with one optional ``[solver]``
section.  Grammar (documented verbatim in the README)::

    file       := { line }
    line       := blank | comment | section | assignment
    comment    := '#' ...
    section    := '[solver]'
    assignment := key '=' value
    value      := number | boolean | list | text
    list       := '[' [ number { ',' number } ] ']'
    boolean    := 'true' | 'false'

Keys before the section header describe the problem (per kind); keys after it
configure the solver.  The ``rhs`` value is the raw remainder of the line.
Errors carry the file path and line number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path

from .expr import ExprSyntaxError, parse
from .solver import CollocationConfig
from .transform import CaputoBvp, CaputoIvp, RlIvp

__all__ = ["ConfigError", "ProblemConfig", "load_config", "loads_config", "write_config"]

KINDS = ("ivp_caputo", "ivp_rl", "bvp")

_PROBLEM_KEYS = {
    "ivp_caputo": {"kind", "alpha", "alphas", "x0", "T", "rhs"},
    "ivp_rl": {"kind", "alpha", "alphas", "T", "rhs"},
    "bvp": {"kind", "q", "qs", "A", "B", "eta1", "eta2", "rhs"},
}
_OPTIONAL_KEYS = {"alphas", "qs"}
_SOLVER_KEYS = {"n", "tol", "max_iter", "refinements", "lipschitz_box",
                "lipschitz_samples", "strict"}


class ConfigError(ValueError):
    """Configuration parse or validation failure, anchored to a source line."""

    def __init__(self, message: str, path: str = "<config>", line: int = 0):
        prefix = f"{path}:{line}: " if line else f"{path}: "
        super().__init__(prefix + message)
        self.path = path
        self.line = line


@dataclass(frozen=True)
class SolverSettings:
    """The [solver] block: grid size, tolerances and probe configuration."""

    n: int = 64
    tol: float = 1e-10
    max_iter: int = 100
    refinements: int = 1
    lipschitz_box: tuple[float, ...] | None = None
    lipschitz_samples: int = 4000
    strict: bool = False

    def collocation(self, arity: int, horizon: float) -> CollocationConfig:
        box = None
        if self.lipschitz_box is not None:
            flat = self.lipschitz_box
            box = tuple((flat[2 * k], flat[2 * k + 1]) for k in range(len(flat) // 2))
        else:
            box = ((0.0, horizon),) + ((-2.0, 2.0),) * (arity + 1)
        return CollocationConfig(
            n=self.n, tol=self.tol, max_iter=self.max_iter,
            lipschitz_box=box, lipschitz_samples=self.lipschitz_samples,
            strict_contraction=self.strict,
        )


@dataclass(frozen=True)
class ProblemConfig:
    """Validated problem description plus solver settings."""

    kind: str
    rhs: str
    solver: SolverSettings
    alpha: float | None = None
    alphas: tuple[float, ...] = ()
    x0: tuple[float, ...] = ()
    T: float | None = None
    q: float | None = None
    qs: tuple[float, ...] = ()
    A: float | None = None
    B: float | None = None
    eta1: float | None = None
    eta2: float | None = None

    @property
    def arity(self) -> int:
        return len(self.alphas) if self.kind != "bvp" else len(self.qs)

    @property
    def horizon(self) -> float:
        return 1.0 if self.kind == "bvp" else float(self.T)

    def problem(self):
        """Build the typed problem object (parses the rhs on the way)."""
        f = parse(self.rhs, self.arity)
        if self.kind == "ivp_caputo":
            return CaputoIvp(self.alpha, self.alphas, self.x0, self.T, f)
        if self.kind == "ivp_rl":
            return RlIvp(self.alpha, self.alphas, self.T, f)
        return CaputoBvp(self.q, self.qs, self.A, self.B, self.eta1, self.eta2, f)

    def with_overrides(self, n: int | None = None, refinements: int | None = None,
                       tol: float | None = None) -> "ProblemConfig":
        solver = self.solver
        if n is not None:
            solver = replace(solver, n=n)
        if refinements is not None:
            solver = replace(solver, refinements=refinements)
        if tol is not None:
            solver = replace(solver, tol=tol)
        return replace(self, solver=solver)


def _parse_number(text: str, path: str, line: int, key: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"key {key!r}: not a number: {text!r}", path, line) from None


def _parse_list(text: str, path: str, line: int, key: str) -> tuple[float, ...]:
    text = text.strip()
    if not (text.startswith("[") and text.endswith("]")):
        raise ConfigError(f"key {key!r}: expected a bracketed list", path, line)
    inner = text[1:-1].strip()
    if not inner:
        return ()
    return tuple(_parse_number(p.strip(), path, line, key) for p in inner.split(","))


def _parse_int(text: str, path: str, line: int, key: str) -> int:
    v = _parse_number(text, path, line, key)
    if v != int(v):
        raise ConfigError(f"key {key!r}: expected an integer, got {text!r}", path, line)
    return int(v)


def _parse_bool(text: str, path: str, line: int, key: str) -> bool:
    t = text.strip().lower()
    if t == "true":
        return True
    if t == "false":
        return False
    raise ConfigError(f"key {key!r}: expected true or false, got {text!r}", path, line)


def loads_config(text: str, path: str = "<config>") -> ProblemConfig:
    """Parse and validate configuration text (see module docstring for grammar)."""
    problem: dict[str, tuple[str, int]] = {}
    solver: dict[str, tuple[str, int]] = {}
    section = problem
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if stripped.startswith("["):
            if stripped != "[solver]":
                raise ConfigError(f"unknown section {stripped!r}", path, lineno)
            section = solver
            continue
        if "=" not in stripped:
            raise ConfigError(f"expected 'key = value', got {stripped!r}", path, lineno)
        key, _, value = stripped.partition("=")
        key = key.strip()
        value = value.strip()
        if key in section:
            raise ConfigError(f"duplicate key {key!r}", path, lineno)
        section[key] = (value, lineno)
    return _validate(problem, solver, path)


def load_config(path: str | Path) -> ProblemConfig:
    """Read and validate a configuration file."""
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read file: {exc}", str(p)) from exc
    return loads_config(text, str(p))


def _validate(problem: dict, solver: dict, path: str) -> ProblemConfig:
    if "kind" not in problem:
        raise ConfigError("missing required key 'kind'", path)
    kind_text, kind_line = problem["kind"]
    kind = kind_text.strip()
    if kind not in KINDS:
        raise ConfigError(f"unknown kind {kind!r}; expected one of {', '.join(KINDS)}",
                          path, kind_line)
    allowed = _PROBLEM_KEYS[kind]
    for key, (_, lineno) in problem.items():
        if key not in allowed:
            raise ConfigError(f"key {key!r} does not belong to kind {kind!r}", path, lineno)
    for key in allowed - _OPTIONAL_KEYS:
        if key not in problem:
            raise ConfigError(f"kind {kind!r} requires key {key!r}", path)
    for key, (_, lineno) in solver.items():
        if key not in _SOLVER_KEYS:
            raise ConfigError(f"unknown [solver] key {key!r}", path, lineno)

    def num(key: str) -> float:
        text, lineno = problem[key]
        return _parse_number(text, path, lineno, key)

    def lst(key: str) -> tuple[float, ...]:
        if key not in problem:
            return ()
        text, lineno = problem[key]
        return _parse_list(text, path, lineno, key)

    rhs_text, rhs_line = problem["rhs"]
    fields: dict = {"kind": kind, "rhs": rhs_text}
    if kind == "ivp_caputo":
        fields.update(alpha=num("alpha"), alphas=lst("alphas"), x0=lst("x0"), T=num("T"))
    elif kind == "ivp_rl":
        fields.update(alpha=num("alpha"), alphas=lst("alphas"), T=num("T"))
    else:
        fields.update(q=num("q"), qs=lst("qs"), A=num("A"), B=num("B"),
                      eta1=num("eta1"), eta2=num("eta2"))

    def sval(key: str, parser):
        text, lineno = solver[key]
        return parser(text, path, lineno, key)

    s_kwargs: dict = {}
    if "n" in solver:
        s_kwargs["n"] = sval("n", _parse_int)
    if "tol" in solver:
        s_kwargs["tol"] = sval("tol", _parse_number)
    if "max_iter" in solver:
        s_kwargs["max_iter"] = sval("max_iter", _parse_int)
    if "refinements" in solver:
        s_kwargs["refinements"] = sval("refinements", _parse_int)
    if "lipschitz_box" in solver:
        s_kwargs["lipschitz_box"] = sval("lipschitz_box", _parse_list)
    if "lipschitz_samples" in solver:
        s_kwargs["lipschitz_samples"] = sval("lipschitz_samples", _parse_int)
    if "strict" in solver:
        s_kwargs["strict"] = sval("strict", _parse_bool)
    cfg = ProblemConfig(solver=SolverSettings(**s_kwargs), **fields)
    _validate_semantics(cfg, problem, solver, path)
    return cfg


def _line_of(table: dict, key: str, default: int = 0) -> int:
    return table[key][1] if key in table else default


def _validate_semantics(cfg: ProblemConfig, problem: dict, solver: dict, path: str) -> None:
    kind = cfg.kind
    if kind in ("ivp_caputo", "ivp_rl"):
        if not cfg.T > 0.0:
            raise ConfigError(f"horizon T must be positive, got {cfg.T}",
                              path, _line_of(problem, "T"))
        chain = (cfg.alpha, *cfg.alphas)
        if any(not a > b for a, b in zip(chain, chain[1:])) or not chain[-1] > 0.0:
            raise ConfigError(
                f"orders must descend strictly from alpha and stay positive, got {list(chain)}",
                path, _line_of(problem, "alphas", _line_of(problem, "alpha")))
        if kind == "ivp_rl" and not cfg.alpha < 1.0:
            raise ConfigError(f"ivp_rl needs alpha in (0,1), got {cfg.alpha}",
                              path, _line_of(problem, "alpha"))
        if kind == "ivp_caputo":
            n = math.ceil(cfg.alpha)
            if len(cfg.x0) != n:
                raise ConfigError(
                    f"x0 must hold ceil(alpha)={n} values, got {len(cfg.x0)}",
                    path, _line_of(problem, "x0"))
    else:
        if not (1.0 < cfg.q <= 2.0):
            raise ConfigError(f"bvp needs q in (1, 2], got {cfg.q}",
                              path, _line_of(problem, "q"))
        chain = (cfg.q, *cfg.qs)
        if any(not a > b for a, b in zip(chain, chain[1:])) or not chain[-1] > 1.0:
            raise ConfigError(
                f"orders must descend strictly from q and stay above 1, got {list(chain)}",
                path, _line_of(problem, "qs", _line_of(problem, "q")))
        if cfg.A == 0.0:
            raise ConfigError("bvp requires a nonzero boundary coefficient A",
                              path, _line_of(problem, "A"))
    try:
        parse(cfg.rhs, cfg.arity)
    except ExprSyntaxError as exc:
        raise ConfigError(f"rhs does not parse: {exc}", path, _line_of(problem, "rhs")) from exc
    box = cfg.solver.lipschitz_box
    if box is not None:
        want = 2 * (cfg.arity + 2)
        if len(box) != want:
            raise ConfigError(
                f"lipschitz_box needs {want} numbers (lo/hi per variable), got {len(box)}",
                path, _line_of(solver, "lipschitz_box"))
    if cfg.solver.refinements < 1:
        raise ConfigError("refinements must be at least 1",
                          path, _line_of(solver, "refinements"))


def _fmt_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, tuple):
        return "[" + ", ".join(repr(float(x)) for x in v) + "]"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_config(cfg: ProblemConfig) -> str:
    """Serialize to canonical text; ``loads_config`` round-trips it exactly."""
    lines = [f"kind = {cfg.kind}"]
    if cfg.kind == "ivp_caputo":
        items = [("alpha", cfg.alpha), ("alphas", cfg.alphas), ("x0", cfg.x0), ("T", cfg.T)]
    elif cfg.kind == "ivp_rl":
        items = [("alpha", cfg.alpha), ("alphas", cfg.alphas), ("T", cfg.T)]
    else:
        items = [("q", cfg.q), ("qs", cfg.qs), ("A", cfg.A), ("B", cfg.B),
                 ("eta1", cfg.eta1), ("eta2", cfg.eta2)]
    for key, val in items:
        lines.append(f"{key} = {_fmt_value(val)}")
    lines.append(f"rhs = {cfg.rhs}")
    lines.append("")
    lines.append("[solver]")
    s = cfg.solver
    lines.append(f"n = {s.n}")
    lines.append(f"tol = {_fmt_value(s.tol)}")
    lines.append(f"max_iter = {s.max_iter}")
    lines.append(f"refinements = {s.refinements}")
    if s.lipschitz_box is not None:
        lines.append(f"lipschitz_box = {_fmt_value(s.lipschitz_box)}")
    lines.append(f"lipschitz_samples = {s.lipschitz_samples}")
    lines.append(f"strict = {_fmt_value(s.strict)}")
    return "\n".join(lines) + "\n"
