import math

import numpy as np
import pytest

from fracspline.expr import parse
from fracspline.fractional import frac_integral_power, gamma_fn, rl_derivative_power
from fracspline.splines import LinearSpline, UniformGrid, interpolate
from fracspline.transform import (
    CaputoBvp,
    CaputoIvp,
    RlIvp,
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

from oracles import (
    caputo_derivative_quad,
    frac_integral_power_quad,
    spline_weighted_moment_quad,
)


def _rhs(src, m=0):
    return parse(src, m)


class TestProblemInvariants:
    def test_caputo_ivp_validation(self):
        with pytest.raises(ValueError):
            CaputoIvp(1.5, (0.5,), (1.0,), 1.0, _rhs("x", 1))  # needs 2 initial values
        with pytest.raises(ValueError):
            CaputoIvp(1.5, (1.6,), (1.0, 0.0), 1.0, _rhs("x", 1))  # not descending
        with pytest.raises(ValueError):
            CaputoIvp(1.5, (0.5,), (1.0, 0.0), 1.0, _rhs("x", 0))  # arity mismatch
        p = CaputoIvp(1.5, (0.5,), (1.0, 0.0), 1.0, _rhs("x", 1))
        assert p.n == 2

    def test_rl_ivp_validation(self):
        with pytest.raises(ValueError):
            RlIvp(1.2, (), 1.0, _rhs("x"))
        with pytest.raises(ValueError):
            RlIvp(0.9, (0.9,), 1.0, _rhs("x", 1))

    def test_bvp_validation(self):
        with pytest.raises(ValueError):
            CaputoBvp(2.5, (), 1.0, 0.0, 0.0, 0.0, _rhs("x"))
        with pytest.raises(ValueError):
            CaputoBvp(1.5, (), 0.0, 1.0, 0.0, 0.0, _rhs("x"))  # A = 0
        with pytest.raises(ValueError):
            CaputoBvp(1.5, (1.0,), 1.0, 0.0, 0.0, 0.0, _rhs("x", 1))  # q_i <= 1


class TestReduceCaputoIvp:
    def test_minimal(self):
        p = CaputoIvp(0.5, (), (0.0,), 1.0, _rhs("x"))
        eq = reduce_ivp_caputo(p)
        assert len(eq.args) == 1
        assert eq.args[0].beta == 0.5
        assert eq.args[0].forcing(0.7) == 0.0
        assert not eq.has_nonlocal

    def test_two_term_forcing(self):
        # alpha=1.5, alpha_1=0.5, x0=[1,2]: g0 = 1 + 2t, g1 = 2 t^0.5/Gamma(1.5)
        p = CaputoIvp(1.5, (0.5,), (1.0, 2.0), 1.0, _rhs("x + d1", 1))
        eq = reduce_ivp_caputo(p)
        assert [a.beta for a in eq.args] == [1.5, 1.0]
        for t in (0.0, 0.3, 1.0):
            assert eq.args[0].forcing(t) == pytest.approx(1.0 + 2.0 * t, rel=1e-15)
            assert eq.args[1].forcing(t) == pytest.approx(
                2.0 * t ** 0.5 / gamma_fn(1.5), rel=1e-13
            )

    def test_tail_against_caputo_quadrature(self):
        # numerically Caputo-differentiate 1 + 2t at order 0.5:
        # (1/Gamma(0.5)) int_0^t (t-u)^(-1/2) * 2 du
        from scipy.integrate import quad

        p = CaputoIvp(1.5, (0.5,), (1.0, 2.0), 1.0, _rhs("x + d1", 1))
        eq = reduce_ivp_caputo(p)
        for t in (0.2, 0.9):
            val, _ = quad(lambda u: 2.0, 0.0, t, weight="alg", wvar=(0.0, -0.5))
            assert eq.args[1].forcing(t) == pytest.approx(val / math.gamma(0.5), rel=1e-12)

    def test_integer_suborder(self):
        # alpha=2, alpha_1=1: the derivative argument forcing is exactly x1
        p = CaputoIvp(2.0, (1.0,), (3.0, 5.0), 1.0, _rhs("x + d1", 1))
        eq = reduce_ivp_caputo(p)
        for t in (0.0, 0.4, 1.0):
            assert eq.args[1].forcing(t) == pytest.approx(5.0, rel=1e-14)


class TestReduceRlIvp:
    def test_zero_forcing_and_orders(self):
        p = RlIvp(0.9, (0.3,), 2.0, _rhs("x + d1", 1))
        eq = reduce_ivp_rl(p)
        assert [a.beta for a in eq.args] == [0.9, pytest.approx(0.6)]
        for a in eq.args:
            assert a.forcing(0.5) == 0.0
        assert not eq.has_nonlocal

    def test_reconstruction_starts_at_zero(self):
        p = RlIvp(0.9, (), 1.0, _rhs("x"))
        y = LinearSpline(UniformGrid(1.0, 8), np.linspace(1.0, 2.0, 9))
        x = reconstruct_rl(y, p)
        assert x(0.0) == 0.0


class TestReconstructIvp:
    def test_zero_y_gives_polynomial(self):
        p = CaputoIvp(1.5, (), (1.0, 2.0), 1.0, _rhs("x"))
        x = reconstruct_ivp(LinearSpline(UniformGrid(1.0, 4), np.zeros(5)), p)
        for t in (0.0, 0.5, 1.0):
            assert x(t) == pytest.approx(1.0 + 2.0 * t, rel=1e-15)

    def test_constant_y(self):
        p = CaputoIvp(0.5, (), (0.0,), 1.0, _rhs("x"))
        x = reconstruct_ivp(LinearSpline(UniformGrid(1.0, 4), np.ones(5)), p)
        for t in (0.1, 0.9):
            assert x(t) == pytest.approx(t ** 0.5 / gamma_fn(1.5), rel=1e-13)

    def test_manufactured_roundtrip(self):
        # y = P_N(D*^0.5 t^2) = P_N(Gamma(3)/Gamma(2.5) t^1.5); x should be ~t^2
        grid = UniformGrid(1.0, 64)
        coef = gamma_fn(3.0) / gamma_fn(2.5)
        y = interpolate(lambda t: coef * t ** 1.5, grid)
        p = CaputoIvp(0.5, (), (0.0,), 1.0, _rhs("x"))
        x = reconstruct_ivp(y, p)
        ts = np.linspace(0, 1, 301)
        err = max(abs(x(float(t)) - t ** 2) for t in ts)
        assert err <= grid.h ** 1.5

    def test_initial_conditions_reproduced(self):
        # Lemma-style round trip: initial values come back exactly at t=0
        rng = np.random.default_rng(23)
        p = CaputoIvp(1.5, (), (0.7, -1.3), 1.0, _rhs("x"))
        y = LinearSpline(UniformGrid(1.0, 16), rng.uniform(-1, 1, 17))
        x = reconstruct_ivp(y, p)
        assert x(0.0) == pytest.approx(0.7, abs=1e-13)
        # forward differences of x at 0 approach x1 (first derivative)
        errs = [abs((x(d) - x(0.0)) / d - (-1.3)) for d in (1e-2, 1e-3, 1e-4)]
        assert errs[2] < errs[0] and errs[2] < 2e-2


class TestLemmaRoundTrip:
    def test_power_solution_recovery(self):
        # exact x = t^3.5 for alpha=1.5, m=1, alpha_1=0.5 and known exact y;
        # reducing then reconstructing with the interpolated exact y recovers x
        alpha, a1 = 1.5, 0.5
        y_exact = lambda t: gamma_fn(4.5) / gamma_fn(3.0) * t * t
        p = CaputoIvp(alpha, (a1,), (0.0, 0.0), 1.0, _rhs("x + d1", 1))
        grid = UniformGrid(1.0, 32)
        x = reconstruct_ivp(interpolate(y_exact, grid), p)
        ts = np.linspace(0, 1, 201)
        err = max(abs(x(float(t)) - t ** 3.5) for t in ts)
        assert err <= grid.h ** 2 * gamma_fn(4.5)  # interpolation-error scale
        assert x(0.0) == 0.0


class TestGreenFunction:
    def test_classical_value(self):
        # q=2, A=1, B=0: G(t,s) = -s(1-t) for s <= t
        assert green_function(2.0, 1.0, 0.0, 0.5, 0.25) == pytest.approx(-0.125, rel=1e-14)

    def test_classical_integral(self):
        # int_0^1 G(t,s) ds solves x'' = 1, x(0)=x(1)=0, i.e. t(t-1)/2
        from scipy.integrate import quad

        for t in (0.2, 0.5, 0.8):
            val, _ = quad(lambda s: green_function(2.0, 1.0, 0.0, t, s), 0.0, 1.0,
                          points=[t], limit=200)
            assert val == pytest.approx(t * (t - 1.0) / 2.0, rel=1e-10)

    def test_branch_continuity(self):
        rng = np.random.default_rng(31)
        for _ in range(1000):
            q = float(rng.uniform(1.05, 2.0))
            A = float(rng.uniform(0.2, 2.0)) * (1 if rng.random() < 0.5 else -1)
            B = float(rng.uniform(-1.5, 1.5))
            t = s = float(rng.uniform(0.0, 0.999))
            left = green_function(q, A, B, t, min(s + 1e-12, 1.0))
            right = green_function(q, A, B, t, s)
            assert left == pytest.approx(right, rel=1e-6, abs=1e-6)

    def test_singular_edge(self):
        # weakly singular at s=1 for q<2, B != 0; finite limits elsewhere
        assert math.isinf(green_function(1.5, 1.0, 1.0, 0.3, 1.0))
        assert green_function(2.0, 1.0, 1.0, 0.3, 1.0) == pytest.approx(
            1.0 * (1.0 - 0.3) / 1.0, rel=1e-12
        )  # B(B-At)(1-s)^0/(A^2 Gamma(1)) = 0.7
        assert green_function(1.5, 1.0, 0.0, 0.3, 1.0) == 0.0


class TestBvpLinearSolve:
    def test_zero_load_boundary_interpolant(self):
        v = LinearSpline(UniformGrid(1.0, 4), np.zeros(5))
        for t in (0.0, 0.5, 1.0):
            got = bvp_linear_solve(2.0, 1.0, 0.0, 3.0, 7.0, v, t)
            assert got == pytest.approx(3.0 * (1.0 - t) + 7.0 * t, rel=1e-14)

    def test_classical_negative_load(self):
        v = LinearSpline(UniformGrid(1.0, 8), -np.ones(9))
        for t in np.linspace(0, 1, 11):
            got = bvp_linear_solve(2.0, 1.0, 0.0, 0.0, 0.0, v, float(t))
            assert got == pytest.approx(t * (1.0 - t) / 2.0, abs=1e-14)

    def test_robin_boundary_residuals(self):
        # q=2, A=1, B=1, eta=1,1, v=0: check A x + B x' at both ends numerically
        v = LinearSpline(UniformGrid(1.0, 4), np.zeros(5))
        x = lambda t: bvp_linear_solve(2.0, 1.0, 1.0, 1.0, 1.0, v, t)
        d = 1e-7
        xp0 = (x(d) - x(0.0)) / d
        xp1 = (x(1.0) - x(1.0 - d)) / d
        assert x(0.0) + xp0 == pytest.approx(1.0, abs=1e-6)
        assert x(1.0) + xp1 == pytest.approx(1.0, abs=1e-6)

    def test_matches_reconstruction_on_random_splines(self):
        # Green-kernel route vs moment route: same function, independent code
        rng = np.random.default_rng(setup_seed := 37)
        for _ in range(100):
            n = int(rng.integers(2, 12))
            q = float(rng.uniform(1.05, 2.0))
            A = float(rng.uniform(0.3, 2.0)) * (1 if rng.random() < 0.5 else -1)
            B = float(rng.uniform(-1.0, 1.0))
            e1 = float(rng.uniform(-1.0, 1.0))
            e2 = float(rng.uniform(-1.0, 1.0))
            y = LinearSpline(UniformGrid(1.0, n), rng.uniform(-1.0, 1.0, n + 1))
            p = CaputoBvp(q, (), A, B, e1, e2, _rhs("x"))
            x = reconstruct_bvp(y, p)
            for t in (0.0, float(rng.uniform(0, 1)), 1.0):
                a = x(t)
                b = bvp_linear_solve(q, A, B, e1, e2, y, t)
                assert a == pytest.approx(b, rel=1e-12, abs=1e-12)


class TestReduceBvp:
    def test_moment_orders(self):
        p = CaputoBvp(1.5, (), 1.0, 0.5, 0.0, 0.0, _rhs("x"))
        eq = reduce_bvp(p)
        orders = [term.moment_order for term in eq.args[0].nonlocal_terms]
        assert orders == [1.5, 0.5]

    def test_b_zero_single_term(self):
        p = CaputoBvp(1.5, (), 2.0, 0.0, 0.0, 0.0, _rhs("x"))
        eq = reduce_bvp(p)
        terms = eq.args[0].nonlocal_terms
        assert len(terms) == 1
        # kappa_1(t) = (B - A t)/(A Gamma(q)) = -t/Gamma(q) for B=0
        for t in (0.0, 0.5, 1.0):
            assert terms[0].coefficient(t) == pytest.approx(-t / gamma_fn(1.5), rel=1e-14)

    def test_derivative_arguments_plain(self):
        p = CaputoBvp(1.8, (1.2,), 1.0, 0.3, 0.0, 0.0, _rhs("x + d1", 1))
        eq = reduce_bvp(p)
        assert eq.args[1].beta == pytest.approx(0.6)
        assert eq.args[1].nonlocal_terms == ()
        assert eq.args[1].forcing(0.5) == 0.0


class TestMoments:
    def test_against_quadrature(self):
        rng = np.random.default_rng(41)
        for _ in range(10):
            n = int(rng.integers(2, 12))
            y = LinearSpline(UniformGrid(1.0, n), rng.uniform(-1.0, 1.0, n + 1))
            for mu in (0.5, 1.0, 1.5, 2.0):
                want = spline_weighted_moment_quad(y.grid.nodes(), y.values, mu)
                assert spline_moment(y, mu) == pytest.approx(want, abs=1e-9)


class TestReconstructBvp:
    def test_zero_y_affine(self):
        # the homogeneous solution is affine; second differences vanish
        p = CaputoBvp(1.7, (), 1.0, 0.4, 0.9, -0.3, _rhs("x"))
        x = reconstruct_bvp(LinearSpline(UniformGrid(1.0, 8), np.zeros(9)), p)
        ts = np.linspace(0, 1, 21)
        vals = np.array([x(float(t)) for t in ts])
        second = vals[2:] - 2.0 * vals[1:-1] + vals[:-2]
        assert np.max(np.abs(second)) < 1e-13

    def test_classical_oracle(self):
        p = CaputoBvp(2.0, (), 1.0, 0.0, 0.0, 0.0, _rhs("x"))
        y = LinearSpline(UniformGrid(1.0, 8), -np.ones(9))
        x = reconstruct_bvp(y, p)
        for t in np.linspace(0, 1, 17):
            assert x(float(t)) == pytest.approx(t * (1.0 - t) / 2.0, abs=1e-14)

    def test_boundary_residuals_via_derivative(self):
        rng = np.random.default_rng(43)
        p = CaputoBvp(1.5, (), 1.0, 0.5, 0.2, 1.0, _rhs("x"))
        y = LinearSpline(UniformGrid(1.0, 16), rng.uniform(-1.0, 1.0, 17))
        x = reconstruct_bvp(y, p)
        r1 = p.A * x(0.0) + p.B * x.derivative(0.0) - p.eta1
        r2 = p.A * x(1.0) + p.B * x.derivative(1.0) - p.eta2
        assert abs(r1) < 1e-12
        assert abs(r2) < 1e-12

    def test_caputo_differentiator_recovers_y(self):
        # push the reconstruction through an independent numerical Caputo
        # differentiator of order q; should recover y to O(h) at interior nodes
        q = 1.5
        p = CaputoBvp(q, (), 1.0, 0.5, 0.2, 1.0, _rhs("x"))
        grid = UniformGrid(1.0, 16)
        y = interpolate(lambda t: t, grid)  # exact y for the manufactured entry
        x = reconstruct_bvp(y, p)
        for t in (0.25, 0.5, 0.75):
            got = caputo_derivative_quad(x, q, t)
            assert got == pytest.approx(t, abs=5.0 * grid.h)
