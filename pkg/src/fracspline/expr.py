"""A small arithmetic expression language for user-defined right-hand sides.

Grammar (recursive descent, one token of lookahead)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?          # right-associative, binds above unary -
    atom   := NUMBER | IDENT | IDENT '(' expr ')' | '(' expr ')'

Variables are ``t``, ``x`` (the state argument) and ``d1`` .. ``dm`` (the
derivative arguments); the callable set is fixed to sin, cos, exp, ln, sqrt,
abs and gamma.  Everything is immutable and evaluation is pure, so parsed
expressions can be shared freely between solves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .fractional import gamma_fn

__all__ = [
    "Expr",
    "RhsFunction",
    "ExprSyntaxError",
    "ExprEvalError",
    "parse",
    "eval_rhs",
    "pretty",
    "lipschitz_probe",
]


class ExprSyntaxError(ValueError):
    """Parse failure; ``offset`` is the byte position in the source text."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class ExprEvalError(ArithmeticError):
    """Domain fault during evaluation (log of a nonpositive value, x/0, ...)."""


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    # index: -1 for t, 0 for x, k for dk
    index: int


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    lhs: "Expr"
    rhs: "Expr"


@dataclass(frozen=True)
class Call:
    fn: str
    arg: "Expr"


Expr = Union[Num, Var, Neg, BinOp, Call]

_FUNCTIONS = ("sin", "cos", "exp", "ln", "sqrt", "abs", "gamma")


@dataclass(frozen=True)
class RhsFunction:
    """A parsed right-hand side f(t, x, d1..dm) with fixed arity m >= 0."""

    expr: Expr
    arity: int
    source: str

    def __call__(self, t: float, z: Sequence[float]) -> float:
        return eval_rhs(self, t, z)


class _Parser:
    def __init__(self, src: str, arity: int):
        self.src = src
        self.arity = arity
        self.pos = 0

    def error(self, message: str, offset: int | None = None):
        raise ExprSyntaxError(message, self.pos if offset is None else offset)

    def skip_ws(self) -> None:
        while self.pos < len(self.src) and self.src[self.pos] in " \t":
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.src[self.pos] if self.pos < len(self.src) else ""

    def accept(self, ch: str) -> bool:
        if self.peek() == ch:
            self.pos += 1
            return True
        return False

    def expect(self, ch: str) -> None:
        if not self.accept(ch):
            self.error(f"expected {ch!r}")

    def parse(self) -> Expr:
        node = self.expr()
        self.skip_ws()
        if self.pos != len(self.src):
            self.error(f"unexpected input {self.src[self.pos]!r}")
        return node

    def expr(self) -> Expr:
        node = self.term()
        while True:
            ch = self.peek()
            if ch in ("+", "-"):
                self.pos += 1
                node = BinOp(ch, node, self.term())
            else:
                return node

    def term(self) -> Expr:
        node = self.unary()
        while True:
            ch = self.peek()
            if ch in ("*", "/"):
                self.pos += 1
                node = BinOp(ch, node, self.unary())
            else:
                return node

    def unary(self) -> Expr:
        if self.accept("-"):
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        node = self.atom()
        if self.accept("^"):
            # right-associative; the exponent may start with a unary minus
            return BinOp("^", node, self.unary())
        return node

    def atom(self) -> Expr:
        ch = self.peek()  # skips whitespace
        start = self.pos
        if ch == "(":
            self.pos += 1
            node = self.expr()
            self.expect(")")
            return node
        if ch.isdigit() or ch == ".":
            return self.number()
        if ch.isalpha() or ch == "_":
            return self.identifier(start)
        self.error("expected a number, variable, function call or '('")

    def number(self) -> Expr:
        start = self.pos
        src = self.src
        while self.pos < len(src) and (src[self.pos].isdigit() or src[self.pos] == "."):
            self.pos += 1
        if self.pos < len(src) and src[self.pos] in "eE":
            mark = self.pos
            self.pos += 1
            if self.pos < len(src) and src[self.pos] in "+-":
                self.pos += 1
            if self.pos < len(src) and src[self.pos].isdigit():
                while self.pos < len(src) and src[self.pos].isdigit():
                    self.pos += 1
            else:
                self.pos = mark  # the e/E belongs to an identifier, back off
        text = src[start:self.pos]
        try:
            return Num(float(text))
        except ValueError:
            self.error(f"bad numeric literal {text!r}", start)

    def identifier(self, start: int) -> Expr:
        src = self.src
        while self.pos < len(src) and (src[self.pos].isalnum() or src[self.pos] == "_"):
            self.pos += 1
        name = src[start:self.pos]
        if name == "t":
            return Var(-1)
        if name == "x":
            return Var(0)
        if name.startswith("d") and name[1:].isdigit():
            idx = int(name[1:])
            if idx < 1 or idx > self.arity:
                self.error(
                    f"variable {name!r} exceeds the declared arity m={self.arity}", start
                )
            return Var(idx)
        if name in _FUNCTIONS:
            self.expect("(")
            arg = self.expr()
            self.expect(")")
            return Call(name, arg)
        self.error(f"unknown identifier {name!r}", start)


def parse(src: str, arity: int = 0) -> RhsFunction:
    """Parse ``src`` into an RhsFunction of the given arity."""
    if arity < 0:
        raise ValueError("arity must be nonnegative")
    expr = _Parser(src, arity).parse()
    return RhsFunction(expr, arity, src)


def _eval(node: Expr, t: float, z: Sequence[float]) -> float:
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return t if node.index < 0 else z[node.index]
    if isinstance(node, Neg):
        return -_eval(node.operand, t, z)
    if isinstance(node, BinOp):
        a = _eval(node.lhs, t, z)
        b = _eval(node.rhs, t, z)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if node.op == "/":
            if b == 0.0:
                raise ExprEvalError("division by zero")
            return a / b
        # '^'
        try:
            v = a ** b
        except (OverflowError, ZeroDivisionError, ValueError) as exc:
            raise ExprEvalError(f"power fault: {a!r} ^ {b!r}") from exc
        if isinstance(v, complex):
            raise ExprEvalError(f"power of a negative base: {a!r} ^ {b!r}")
        return v
    # Call
    a = _eval(node.arg, t, z)
    fn = node.fn
    try:
        if fn == "sin":
            return math.sin(a)
        if fn == "cos":
            return math.cos(a)
        if fn == "exp":
            return math.exp(a)
        if fn == "ln":
            if a <= 0.0:
                raise ExprEvalError(f"ln of nonpositive value {a!r}")
            return math.log(a)
        if fn == "sqrt":
            if a < 0.0:
                raise ExprEvalError(f"sqrt of negative value {a!r}")
            return math.sqrt(a)
        if fn == "abs":
            return abs(a)
        return gamma_fn(a)
    except (OverflowError, ValueError) as exc:
        raise ExprEvalError(f"{fn}({a!r}) fault: {exc}") from exc


def eval_rhs(f: RhsFunction, t: float, z: Sequence[float]) -> float:
    """Evaluate f with bindings t, x = z[0], d_i = z[i]."""
    if len(z) != f.arity + 1:
        raise ValueError(f"expected {f.arity + 1} state values, got {len(z)}")
    return _eval(f.expr, t, z)


def _prec(node: Expr) -> int:
    if isinstance(node, BinOp):
        return {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}[node.op]
    if isinstance(node, Neg):
        return 3
    return 9


def _fmt(node: Expr) -> str:
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Var):
        return "t" if node.index < 0 else ("x" if node.index == 0 else f"d{node.index}")
    if isinstance(node, Neg):
        inner = _fmt(node.operand)
        if _prec(node.operand) < 3:
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(node, Call):
        return f"{node.fn}({_fmt(node.arg)})"
    p = _prec(node)
    lhs = _fmt(node.lhs)
    rhs = _fmt(node.rhs)
    # left-assoc for + - * /: parenthesize right child at equal precedence;
    # right-assoc for ^: parenthesize left child at equal precedence
    if _prec(node.lhs) < p or (node.op == "^" and _prec(node.lhs) <= p):
        lhs = f"({lhs})"
    if _prec(node.rhs) < p or (node.op in "+-*/" and _prec(node.rhs) == p):
        rhs = f"({rhs})"
    return f"{lhs} {node.op} {rhs}" if node.op != "^" else f"{lhs}{node.op}{rhs}"


def pretty(f: RhsFunction) -> str:
    """Canonical text form; reparsing it yields the identical syntax tree."""
    return _fmt(f.expr)


def lipschitz_probe(f: RhsFunction, box: Sequence[tuple[float, float]],
                    samples: int = 4000, seed: int = 20260810) -> float:
    """Sampled estimate of the Lipschitz constant L in |df| <= L sum_i |dz_i|.

    ``box`` holds one (lo, hi) interval per variable: first t, then x and the
    d_i.  Pairs share the same t and differ in z; half of them differ in a
    single coordinate, which pins the per-coordinate slopes of smooth f.  The
    estimate is a lower bound on the true constant over the box.
    """
    if samples < 2:
        raise ValueError("need at least 2 samples")
    if len(box) != f.arity + 2:
        raise ValueError(f"expected {f.arity + 2} intervals, got {len(box)}")
    rng = np.random.default_rng(seed)
    lo = np.array([b[0] for b in box], dtype=float)
    hi = np.array([b[1] for b in box], dtype=float)
    if np.any(hi < lo):
        raise ValueError("box intervals must have lo <= hi")
    nz = f.arity + 1
    best = 0.0
    for k in range(samples):
        t = float(rng.uniform(lo[0], hi[0]))
        z1 = rng.uniform(lo[1:], hi[1:])
        if k % 2 == 0:
            z2 = rng.uniform(lo[1:], hi[1:])
        else:
            z2 = z1.copy()
            j = int(rng.integers(0, nz))
            z2[j] = rng.uniform(lo[1 + j], hi[1 + j])
        denom = float(np.sum(np.abs(z1 - z2)))
        if denom == 0.0:
            continue
        try:
            df = abs(eval_rhs(f, t, z1.tolist()) - eval_rhs(f, t, z2.tolist()))
        except ExprEvalError:
            continue
        ratio = df / denom
        if ratio > best:
            best = ratio
    return best
