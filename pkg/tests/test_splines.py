import math

import numpy as np
import pytest

from fracspline.fractional import frac_integral_power, gamma_fn
from fracspline.splines import (
    LinearSpline,
    UniformGrid,
    frac_integral_at,
    frac_integral_at_nodes,
    frac_integral_weights,
    interpolate,
    modulus_of_continuity,
)

from oracles import spline_frac_integral_quad


def random_spline(rng, n_max=16):
    n = int(rng.integers(2, n_max + 1))
    T = float(rng.uniform(0.5, 2.0))
    grid = UniformGrid(T, n)
    return LinearSpline(grid, rng.uniform(-1.0, 1.0, n + 1))


class TestGridAndSpline:
    def test_grid_invariants(self):
        g = UniformGrid(2.0, 8)
        assert g.h * g.N == pytest.approx(g.T, rel=1e-15)
        assert np.all(np.diff(g.nodes()) > 0)
        with pytest.raises(ValueError):
            UniformGrid(0.0, 4)
        with pytest.raises(ValueError):
            UniformGrid(1.0, 0)

    def test_spline_shape_check(self):
        with pytest.raises(ValueError):
            LinearSpline(UniformGrid(1.0, 4), np.zeros(4))

    def test_eval(self):
        g = UniformGrid(1.0, 1)
        s = LinearSpline(g, [0.0, 1.0])
        assert s(g.h) == 1.0
        assert s(g.h / 2) == 0.5
        const = LinearSpline(UniformGrid(1.0, 2), [2.0, 2.0, 2.0])
        for t in (0.0, 0.3, 1.0):
            assert const(t) == 2.0
        with pytest.raises(ValueError):
            s(-0.1)
        with pytest.raises(ValueError):
            s(1.1)


class TestInterpolate:
    def test_linear_reproduction(self):
        g = UniformGrid(2.0, 5)
        s = interpolate(lambda t: 3.0 * t + 1.0, g)
        for t in np.linspace(0, 2, 41):
            assert s(float(t)) == pytest.approx(3.0 * t + 1.0, rel=1e-14)

    def test_parabola_nodes_and_midpoint(self):
        s = interpolate(lambda t: t * t, UniformGrid(1.0, 2))
        assert np.allclose(s.values, [0.0, 0.25, 1.0])
        assert s(0.25) == pytest.approx(0.125)

    def test_idempotent_projection(self):
        rng = np.random.default_rng(2)
        s = random_spline(rng)
        again = interpolate(s, s.grid)
        assert np.array_equal(again.values, s.values)

    def test_sup_norm_one(self):
        # |P_N f|_inf <= |f|_inf for continuous f, sampled
        rng = np.random.default_rng(4)
        for _ in range(20):
            w = float(rng.uniform(1.0, 9.0))
            f = lambda t: math.sin(w * t) + 0.5 * math.cos(3.0 * w * t)
            g = UniformGrid(1.0, int(rng.integers(2, 20)))
            s = interpolate(f, g)
            dense = np.linspace(0, 1, 2001)
            assert np.max(np.abs(s(dense))) <= max(abs(f(float(t))) for t in dense) + 1e-12

    def test_modulus_bound(self):
        # |f - P_N f|_inf <= omega(f, h); for sqrt the modulus is sqrt(h)
        g = UniformGrid(1.0, 25)
        f = math.sqrt
        s = interpolate(f, g)
        dense = np.linspace(0, 1, 4001)
        err = max(abs(f(float(t)) - s(float(t))) for t in dense)
        assert err <= math.sqrt(g.h)

    def test_c2_error_bound(self):
        # |f - P_N f|_inf <= h^2/8 |f''|_inf on polynomials
        for n in (4, 9, 16):
            g = UniformGrid(1.0, n)
            f = lambda t: 2.0 * t ** 3 - t * t + 0.3 * t
            fpp_max = max(abs(12.0 * t - 2.0) for t in np.linspace(0, 1, 101))
            s = interpolate(f, g)
            dense = np.linspace(0, 1, 4001)
            err = max(abs(f(float(t)) - s(float(t))) for t in dense)
            assert err <= g.h ** 2 / 8.0 * fpp_max * (1.0 + 1e-12)


class TestWeights:
    def test_trapezoid_degeneration(self):
        h = 0.25
        w = frac_integral_weights(1.0, 2, h)
        assert np.allclose(w, h * np.array([0.5, 1.0, 0.5]), rtol=1e-14)
        w5 = frac_integral_weights(1.0, 5, h)
        assert np.allclose(w5, h * np.array([0.5, 1, 1, 1, 1, 0.5]), rtol=1e-14)

    def test_row_zero_empty(self):
        assert frac_integral_weights(0.7, 0, 0.1).size == 0

    def test_first_row_closed_form(self):
        # Direct integration of (1/G(a)) int_0^h (h-u)^(a-1)(y0(1-u/h)+y1 u/h) du
        # gives w = h^a/G(a+2) * [a, 1]; cross-checked by quadrature in
        # test_matches_quadrature, asserted in closed form here.
        for alpha in (0.3, 0.5, 1.0, 1.6, 2.0):
            h = 0.2
            w = frac_integral_weights(alpha, 1, h)
            c = h ** alpha / gamma_fn(alpha + 2.0)
            assert w == pytest.approx([c * alpha, c], rel=1e-13)

    def test_row_sums_integrate_constants(self):
        # sum_j w[i,j] = t_i^alpha / Gamma(alpha+1), relative 1e-12
        for alpha in (0.2, 0.5, 1.0, 1.5, 2.0):
            h = 0.125
            for i in (1, 3, 8, 31):
                w = frac_integral_weights(alpha, i, h)
                t_i = i * h
                assert math.fsum(w.tolist()) == pytest.approx(
                    t_i ** alpha / gamma_fn(alpha + 1.0), rel=1e-12
                )

    def test_constant_spline_row_sum_example(self):
        # spline == 1 with alpha = 0.5 at node 3
        h = 0.1
        w = frac_integral_weights(0.5, 3, h)
        assert math.fsum(w.tolist()) == pytest.approx(
            frac_integral_power(0.5, 0.0, 3 * h), rel=1e-12
        )

    def test_matches_quadrature(self):
        rng = np.random.default_rng(8)
        for _ in range(12):
            s = random_spline(rng)
            alpha = float(rng.uniform(0.1, 2.5))
            nodes = s.grid.nodes()
            for i in (1, s.grid.N // 2, s.grid.N):
                if i == 0:
                    continue
                w = frac_integral_weights(alpha, i, s.grid.h)
                got = float(w @ s.values[: i + 1])
                want = spline_frac_integral_quad(nodes, s.values, alpha, float(nodes[i]))
                assert got == pytest.approx(want, abs=1e-8)


class TestFracIntegralAtNodes:
    def test_zero_spline(self):
        s = LinearSpline(UniformGrid(1.0, 6), np.zeros(7))
        assert np.array_equal(frac_integral_at_nodes(s, 0.7), np.zeros(7))

    def test_linear_exactness_alpha_one(self):
        # I^1 of P_N(t) is t^2/2, exact because trapezoid integrates linears
        g = UniformGrid(1.0, 8)
        s = interpolate(lambda t: t, g)
        vals = frac_integral_at_nodes(s, 1.0)
        assert np.allclose(vals, g.nodes() ** 2 / 2.0, rtol=1e-14, atol=1e-16)

    def test_interpolated_parabola(self):
        # I^0.5 of P_N(t^2) approaches the power-law value as O(h^2)
        g = UniformGrid(1.0, 8)
        s = interpolate(lambda t: t * t, g)
        vals = frac_integral_at_nodes(s, 0.5)
        exact = np.array([frac_integral_power(0.5, 2.0, float(t)) for t in g.nodes()])
        assert np.max(np.abs(vals - exact)) < 4.0 * g.h ** 2

    def test_entry_zero_is_zero(self):
        rng = np.random.default_rng(10)
        s = random_spline(rng)
        assert frac_integral_at_nodes(s, 1.3)[0] == 0.0

    def test_quadrature_equivalence(self):
        # acceptance-grade check on random splines, N <= 16
        rng = np.random.default_rng(12)
        for _ in range(8):
            s = random_spline(rng)
            alpha = float(rng.uniform(0.1, 2.2))
            vals = frac_integral_at_nodes(s, alpha)
            nodes = s.grid.nodes()
            for i in range(s.grid.N + 1):
                want = spline_frac_integral_quad(nodes, s.values, alpha, float(nodes[i]))
                assert vals[i] == pytest.approx(want, abs=1e-8)


class TestFracIntegralAt:
    def test_zero_time(self):
        rng = np.random.default_rng(14)
        s = random_spline(rng)
        assert frac_integral_at(s, 0.6, 0.0) == 0.0

    def test_matches_nodes(self):
        # off-node evaluator agrees with the weight path at the nodes to 1e-14
        # relative to the size of the summed terms
        rng = np.random.default_rng(15)
        for _ in range(10):
            s = random_spline(rng)
            alpha = float(rng.uniform(0.1, 2.2))
            via_weights = frac_integral_at_nodes(s, alpha)
            via_closed = frac_integral_at(s, alpha, s.grid.nodes())
            scale = np.max(np.abs(s.values)) * s.grid.T ** alpha / gamma_fn(alpha + 1.0)
            assert np.max(np.abs(via_weights - via_closed)) <= 1e-14 * scale

    def test_constant_spline(self):
        g = UniformGrid(1.5, 7)
        s = LinearSpline(g, np.ones(8))
        for alpha in (0.4, 1.0, 1.7):
            for t in (0.1, 0.77, 1.5):
                assert frac_integral_at(s, alpha, t) == pytest.approx(
                    t ** alpha / gamma_fn(alpha + 1.0), rel=1e-13
                )

    def test_between_nodes_against_quadrature(self):
        rng = np.random.default_rng(16)
        for _ in range(6):
            s = random_spline(rng, n_max=8)
            alpha = float(rng.uniform(0.2, 1.8))
            for _ in range(3):
                t = float(rng.uniform(0.01, s.grid.T))
                want = spline_frac_integral_quad(s.grid.nodes(), s.values, alpha, t)
                assert frac_integral_at(s, alpha, t) == pytest.approx(want, abs=1e-8)

    def test_domain_error(self):
        s = LinearSpline(UniformGrid(1.0, 2), [0.0, 1.0, 0.0])
        with pytest.raises(ValueError):
            frac_integral_at(s, 0.5, 1.5)


class TestModulus:
    def test_identity_function(self):
        # the sampled estimator stays a lower bound, within window resolution
        got = modulus_of_continuity(lambda t: t, 0.1, 1.0)
        assert 0.1 * 0.95 <= got <= 0.1

    def test_constant(self):
        assert modulus_of_continuity(lambda t: 4.0, 0.1, 1.0) == 0.0

    def test_sqrt(self):
        # omega(sqrt, h) = sqrt(h), attained at zero
        got = modulus_of_continuity(math.sqrt, 0.01, 1.0)
        assert got == pytest.approx(0.1, rel=0.02)
