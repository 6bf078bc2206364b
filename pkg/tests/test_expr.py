import math

import numpy as np
import pytest

from fracspline.expr import (
    BinOp,
    Call,
    ExprEvalError,
    ExprSyntaxError,
    Neg,
    Num,
    Var,
    eval_rhs,
    lipschitz_probe,
    parse,
    pretty,
)


class TestParse:
    def test_basic_shape(self):
        f = parse("t + x*d1", 1)
        e = f.expr
        assert isinstance(e, BinOp) and e.op == "+"
        assert e.lhs == Var(-1)
        assert e.rhs == BinOp("*", Var(0), Var(1))

    def test_power_right_associative(self):
        f = parse("2^3^2")
        assert eval_rhs(f, 0.0, [0.0]) == 512.0

    def test_precedence(self):
        assert parse("1 + 2*3")(0.0, [0.0]) == 7.0
        assert parse("-2^2")(0.0, [0.0]) == -4.0
        assert parse("2^-3")(0.0, [0.0]) == 0.125
        assert parse("6 - 2 - 1")(0.0, [0.0]) == 3.0  # left associative
        assert parse("8/4/2")(0.0, [0.0]) == 1.0

    def test_arity_violation(self):
        with pytest.raises(ExprSyntaxError) as err:
            parse("d2", 1)
        assert "arity" in str(err.value)

    def test_unknown_identifier(self):
        with pytest.raises(ExprSyntaxError) as err:
            parse("t + foo", 0)
        assert "foo" in str(err.value)
        assert err.value.offset == 4

    def test_syntax_error_offset(self):
        with pytest.raises(ExprSyntaxError) as err:
            parse("1 + * 2")
        assert err.value.offset == 4

    def test_unbalanced_paren(self):
        with pytest.raises(ExprSyntaxError):
            parse("(1 + 2")

    def test_trailing_garbage(self):
        with pytest.raises(ExprSyntaxError):
            parse("1 2")

    def test_functions(self):
        f = parse("sin(t) + cos(t) + exp(x) + ln(x) + sqrt(x) + abs(0-x) + gamma(x)", 0)
        v = eval_rhs(f, 0.5, [2.0])
        expected = (math.sin(0.5) + math.cos(0.5) + math.exp(2.0) + math.log(2.0)
                    + math.sqrt(2.0) + 2.0 + 1.0)
        assert v == pytest.approx(expected, rel=1e-14)

    def test_scientific_literals(self):
        assert parse("1e-3 + 2.5E2")(0.0, [0.0]) == pytest.approx(250.001)


class TestEval:
    def test_constant(self):
        assert parse("1")(123.0, [7.0]) == 1.0

    def test_bindings(self):
        assert parse("x + t")(2.0, [3.0]) == 5.0

    def test_sin_half_pi(self):
        f = parse("sin(d1)", 1)
        assert eval_rhs(f, 0.0, [0.0, 3.14159265358979 / 2]) == pytest.approx(1.0, abs=1e-12)

    def test_wrong_arity_at_eval(self):
        f = parse("x")
        with pytest.raises(ValueError):
            eval_rhs(f, 0.0, [1.0, 2.0])

    @pytest.mark.parametrize("src,z", [
        ("ln(x)", [-1.0]),
        ("ln(x)", [0.0]),
        ("sqrt(x)", [-4.0]),
        ("1/x", [0.0]),
        ("gamma(x)", [-2.0]),
        ("x^0.5", [-1.0]),
    ])
    def test_domain_faults(self, src, z):
        f = parse(src)
        with pytest.raises(ExprEvalError):
            eval_rhs(f, 0.0, z)

    def test_referential_transparency(self):
        f = parse("sin(x)*exp(t) - gamma(x + 1.1)/3", 0)
        vals = {eval_rhs(f, 0.37, [1.21]) for _ in range(50)}
        assert len(vals) == 1


class TestPretty:
    @pytest.mark.parametrize("src", [
        "t + x*d1",
        "2^3^2",
        "-(x + t)*d1",
        "sin(x)/cos(t) - gamma(x^2)",
        "1e-3*x",
        "t - -x",
        "(t + x)/(t - x)",
        "x^(t + 1)",
        "(2^3)^2",
        "t*(1 - t)/2",
    ])
    def test_roundtrip_fixed_point(self, src):
        f1 = parse(src, 1)
        text1 = pretty(f1)
        f2 = parse(text1, 1)
        assert f2.expr == f1.expr
        assert pretty(f2) == text1


class TestLipschitzProbe:
    def test_identity(self):
        f = parse("x")
        box = [(0.0, 1.0), (-1.0, 1.0)]
        got = lipschitz_probe(f, box, 2000)
        assert got == pytest.approx(1.0, rel=1e-9)

    def test_time_only(self):
        f = parse("t")
        assert lipschitz_probe(f, [(0.0, 1.0), (-1.0, 1.0)], 500) == 0.0

    def test_linear_max_coefficient(self):
        # L for 2x + 3 d1 under the sum metric is max(2, 3) = 3;
        # dense pair sampling converges to it from below
        f = parse("2*x + 3*d1", 1)
        box = [(0.0, 1.0), (-1.0, 1.0), (-1.0, 1.0)]
        got = lipschitz_probe(f, box, 100_000)
        assert got == pytest.approx(3.0, rel=0.05)
        assert got <= 3.0 * (1.0 + 1e-9)

    def test_deterministic(self):
        f = parse("sin(x)*x", 0)
        box = [(0.0, 2.0), (-2.0, 2.0)]
        assert lipschitz_probe(f, box, 3000) == lipschitz_probe(f, box, 3000)

    def test_bad_box(self):
        f = parse("x")
        with pytest.raises(ValueError):
            lipschitz_probe(f, [(0.0, 1.0)], 100)
        with pytest.raises(ValueError):
            lipschitz_probe(f, [(0.0, 1.0), (2.0, 1.0)], 100)
