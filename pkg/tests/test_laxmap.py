"""Spectral maps, phase integrals, and Cauchy-type contour functions."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from sgfluxon import laxmap as lm


class TestSpectralMaps:
    def test_E_D_at_minus_one(self):
        assert abs(lm.E_of(-1.0) - 0.5j) < 1e-15
        assert abs(lm.D_of(-1.0)) < 1e-15

    def test_E_on_upper_circle(self):
        # E(e^{i psi}) = (i/2) sin(psi/2), purely imaginary
        w = np.exp(0.5j * math.pi)
        assert abs(lm.E_of(w) - 1j * math.sqrt(2) / 4) < 1e-15
        for psi in (0.3, 1.1, 2.9):
            val = lm.E_of(np.exp(1j * psi))
            assert abs(val - 0.5j * math.sin(psi / 2)) < 1e-14
            assert abs(val.real) < 1e-15
            assert abs(lm.D_of(np.exp(1j * psi)).imag) < 1e-15

    def test_schwarz_rule(self):
        psi = 1.1
        assert abs(lm.E_of(np.exp(1j * psi)) + np.conj(lm.E_of(np.exp(-1j * psi)))) < 1e-15

    def test_inversion_symmetry(self):
        w = 0.3 + 0.4j
        assert abs(lm.E_of(w) - lm.E_of(1 / w)) < 1e-14

    def test_E_prime_fd(self):
        w, h = 0.3 + 0.8j, 1e-6
        fd = (lm.E_of(w + h) - lm.E_of(w - h)) / (2 * h)
        assert abs(lm.E_prime(w) - fd) < 1e-9

    def test_branch_cut_error(self):
        with pytest.raises(lm.BranchCutError):
            lm.E_of(2.0)
        with pytest.raises(lm.BranchCutError):
            lm.Q_of(np.array([0.5 + 0j, 1.0 + 0j]), 1.0, 0.0)


class TestProfiles:
    def test_sech_closed_form(self):
        p = lm.sech_profile(0.25)
        assert abs(p.G0 + 1.0) < 1e-15
        assert abs(p.mu - math.pi / 3) < 1e-12
        ctx = lm.PhaseIntegralContext(p)
        for v in (0.05, 0.12, 0.24):
            assert abs(ctx.psi_v(v) - math.pi * (0.25 - v)) < 1e-13

    def test_sech_quadrature_matches_closed_form(self):
        p = lm.sech_profile(0.25)
        ctx = lm.PhaseIntegralContext(p, use_closed_psi=False)
        for v in (0.01, 0.1, 0.2, 0.249):
            assert abs(ctx.psi_v(v) - math.pi * (0.25 - v)) < 1e-12
        for v in (0.2501, 0.3, 0.45):
            assert abs(ctx.psi_v_ext(v) - math.pi * (0.25 - v)) < 1e-12

    def test_psi_at_band_edge_and_origin(self):
        g = lm.gaussian_profile(1.0)
        ctx = lm.PhaseIntegralContext(g)
        assert abs(ctx.psi_v(ctx.v_max * (1 - 1e-10))) < 1e-6
        # Psi(0+) = -(1/4) integral of G
        assert abs(ctx.psi_v(1e-5) - (-0.25 * g.integral_G)) < 1e-3

    def test_psi_monotone_decreasing(self):
        g = lm.gaussian_profile(1.3)
        ctx = lm.PhaseIntegralContext(g)
        vs = np.linspace(0.02, 0.3, 15)
        ps = [ctx.psi_v(v) for v in vs]
        assert all(b < a for a, b in zip(ps, ps[1:]))
        assert all(ctx.psi_v_prime(v) < 0 for v in (0.05, 0.15, 0.28))

    def test_psi_prime_fd(self):
        g = lm.gaussian_profile(1.0)
        ctx = lm.PhaseIntegralContext(g)
        v, h = 0.13, 1e-6
        fd = (ctx.psi_v(v + h) - ctx.psi_v(v - h)) / (2 * h)
        assert abs(ctx.psi_v_prime(v) - fd) < 1e-8

    def test_complex_continuation_sech(self):
        p = lm.sech_profile(0.25)
        ctx = lm.PhaseIntegralContext(p, use_closed_psi=False)
        ctx.ensure_coverage(0.45)
        for lam in (0.02 + 0.18j, -0.03 + 0.3j, 0.05 + 0.4j):
            closed = 1j * math.pi * lam + math.pi * 0.25
            assert abs(ctx.psi_lambda(lam) - closed) < 1e-12
            assert abs(ctx.psi_prime_lambda(lam) - 1j * math.pi) < 1e-10

    def test_profile_validation(self):
        with pytest.raises(ValueError):
            lm.sech_profile(0.6)
        with pytest.raises(ValueError):
            lm.gaussian_profile(2.5)

    def test_table_profile_roundtrip(self):
        x = np.linspace(0, 9, 400)
        g = -1.2 * np.exp(-(x**2))
        p = lm.table_profile(x, g)
        assert abs(p.G0 + 1.2) < 1e-10
        assert abs(p.integral_G - (-1.2 * math.sqrt(math.pi))) < 1e-6
        ref = lm.gaussian_profile(1.2)
        ctx_t = lm.PhaseIntegralContext(p)
        ctx_r = lm.PhaseIntegralContext(ref)
        assert abs(ctx_t.psi_v(0.15) - ctx_r.psi_v(0.15)) < 1e-7


class TestEpsilonN:
    def test_sech_values(self):
        p = lm.sech_profile(0.25)
        assert abs(lm.epsilon_N(p, 8) - 1.0 / 32) < 1e-15
        assert abs(lm.epsilon_N(p, 1) - 0.25) < 1e-15

    def test_halving(self):
        g = lm.gaussian_profile(0.7)
        for N in (1, 3, 10):
            assert abs(lm.epsilon_N(g, 2 * N) - 0.5 * lm.epsilon_N(g, N)) < 1e-15

    def test_invalid_N(self):
        with pytest.raises(ValueError):
            lm.epsilon_N(lm.sech_profile(0.25), 0)


@pytest.fixture(scope="module")
def ctx():
    return lm.PhaseIntegralContext(lm.sech_profile(0.25))


class TestTheta0AndL:

    def test_theta0_inversion_invariance(self, ctx):
        for psi in (0.2, 0.7, 1.0):
            w = np.exp(1j * psi)
            assert abs(ctx.theta0(w) - ctx.theta0(1 / w)) < 1e-12

    def test_L_boundary_sum_on_positive_axis(self, ctx):
        d = 1e-8
        assert abs(ctx.L_of(2.0 + 1j * d) + ctx.L_of(2.0 - 1j * d)) < 1e-7

    def test_L_schwarz(self, ctx):
        w = 0.5 + 0.5j
        assert abs(ctx.L_of(np.conj(w)) - np.conj(ctx.L_of(w))) < 1e-14

    def test_L_cauchy_decay(self, ctx):
        # Oracle: |L(w)| ~ C/sqrt(|w|) along the negative axis, with
        # C = (1/pi) |int theta0(y)/sqrt(-y) dy| from adaptive quadrature.
        def integrand(psi):
            th0 = ctx.psi_axis(0.5 * math.sin(0.5 * psi))
            val = th0 * (np.exp(0.5j * psi) + np.exp(-0.5j * psi))
            return val.real

        C, _ = quad(integrand, 0, ctx.mu, epsabs=1e-13)
        C = abs(C) / math.pi
        a6 = abs(ctx.L_of(-1e6)) * math.sqrt(1e6)
        a8 = abs(ctx.L_of(-1e8)) * math.sqrt(1e8)
        assert abs(a6 - C) < 1e-3 * C
        assert abs(a8 - C) < 1e-4 * C

    def test_L_against_adaptive_quadrature(self, ctx):
        def L_quad(w):
            def integ(psi, part):
                th0 = ctx.psi_axis(0.5 * math.sin(0.5 * psi))
                val = th0 * (
                    np.exp(0.5j * psi) / (np.exp(1j * psi) - w)
                    + np.exp(-0.5j * psi) / (np.exp(-1j * psi) - w)
                )
                return val.real if part == 0 else val.imag
            re, _ = quad(integ, 0, ctx.mu, args=(0,), epsabs=1e-13, limit=400)
            im, _ = quad(integ, 0, ctx.mu, args=(1,), epsabs=1e-13, limit=400)
            return np.sqrt(complex(-w)) / math.pi * (re + 1j * im)

        for w in (2.0 + 0.3j, -0.5 + 0.1j, 1.2 + 0.8j):
            assert abs(ctx.L_of(w) - L_quad(w)) < 1e-10

    def test_unit_circle_unitary_exponent(self, ctx):
        # for |w| = 1 and x = 0 the exponent 2iQ/eps is purely imaginary
        eps = 1 / 32
        for psi in (0.3, 0.9, 1.4):
            w = np.exp(1j * psi)
            z = np.exp(2j * lm.Q_of(w, 0.0, 1.3) / eps)
            assert abs(abs(z) - 1.0) < 1e-12

    def test_k_function_definition(self, ctx):
        w, x, t = 1.7 + 0.6j, 0.4, 0.9
        k = ctx.k_of(w, x, t)
        manual = 2j * lm.Q_of(w, x, t) + ctx.L_of(w) - 1j * ctx.theta0(w)
        assert abs(k - manual) < 1e-14
