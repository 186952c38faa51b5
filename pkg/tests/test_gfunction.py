"""Endpoint conditions, catastrophe location, constants, and the phase."""

import cmath
import math

import numpy as np
import pytest

from sgfluxon import gfunction as gf
from sgfluxon import laxmap as lm
from sgfluxon import specfun as sf

SECH = lm.sech_profile(0.25)


@pytest.fixture(scope="module")
def finder():
    return gf.CatastropheFinder(SECH)


@pytest.fixture(scope="module")
def cat(finder):
    return finder.locate()


@pytest.fixture(scope="module")
def phase(finder):
    return gf.PhaseComputer(finder)


class TestEndpointContinuation:
    def test_initial_angle_small_t(self, finder):
        st = finder.solve_eta(1e-3)
        assert abs(st.eta - math.pi / 3) < 1e-3
        assert abs(finder.eta_initial() - math.pi / 3) < 1e-12

    def test_continuity(self, finder):
        a = finder.solve_eta(1.0)
        b = finder.solve_eta(1.0001, eta_guess=a.eta)
        assert abs(a.eta - b.eta) < 1e-3

    def test_angle_near_catastrophe(self, finder, cat):
        st = finder.solve_eta(cat.t_gc - 1e-7, eta_guess=cat.theta - 0.002)
        assert abs(st.eta - 1.403433) < 5e-4

    def test_alpha_on_circle(self, finder):
        st = finder.solve_eta(0.8)
        assert abs(abs(st.alpha) - 1.0) < 1e-14


class TestMCondition:
    def test_circle_automatic_zero(self, finder):
        for eta in (1.2, 1.4, 2.0):
            assert abs(finder.M_of(complex(math.cos(eta), math.sin(eta)), 0.0, 1.0)) < 1e-9

    def test_time_zero_endpoint_sech(self, finder):
        for x in (0.3, 0.5, 1.5):
            assert abs(finder.M_time_zero(x)) < 1e-10

    def test_time_zero_endpoint_gaussian(self):
        f = gf.CatastropheFinder(lm.gaussian_profile(1.1))
        for x in (0.3, 0.8):
            assert abs(f.M_time_zero(x)) < 1e-9

    def test_radial_perturbation_linear_growth(self, finder):
        # finite-difference oracle: |M| grows linearly in the radial offset
        vals = []
        for rho_p in (1e-4, 2e-4, 4e-4):
            alpha = complex((1 + rho_p) * np.exp(1.3j))
            vals.append(abs(finder.M_of(alpha, 0.0, 1.0)))
        assert 1.9 < vals[1] / vals[0] < 2.1
        assert 1.9 < vals[2] / vals[1] < 2.1


class TestICondition:
    def test_contour_independence(self):
        # two independent beta parametrizations agree
        f1 = gf.CatastropheFinder(SECH, bulge=0.3)
        f2 = gf.CatastropheFinder(SECH, bulge=0.45)
        for eta, t in ((1.2, 1.0), (1.35, 1.5)):
            assert abs(f1.I_of(eta, t) - f2.I_of(eta, t)) < 1e-9

    def test_linear_in_t(self, finder):
        IA, IC = finder.I_parts(1.3)
        for t in (0.5, 1.0, 2.0):
            assert abs(finder.I_of(1.3, t) - (t * IA + IC)) < 1e-12


class TestCatastrophe:
    def test_paper_values(self, cat):
        assert abs(cat.t_gc - 1.609104) < 5e-4
        assert abs(cat.theta - 1.403433) < 5e-4
        assert abs(cat.m_gc - 0.416708) < 5e-4

    def test_m_gc_from_theta(self, cat):
        assert abs(cat.m_gc - math.sin(0.5 * cat.theta) ** 2) < 1e-12

    def test_omega_gc(self, cat):
        assert abs(cat.omega_gc + math.pi / (2 * sf.elliptic_K(cat.m_gc))) < 1e-10

    def test_H_zero_and_simple(self, finder, cat):
        # residual of H at the endpoint (via the analytic t-linearity) and
        # simplicity |H'| > threshold
        S, _ = finder.endpoint_bracket(cat.theta)
        residual = abs(-cat.t_gc / cat.alpha_gc + S) / 4.0
        assert residual < 1e-9
        assert abs(cat.Hprime) > 1e-3

    def test_I_residual_at_root(self, finder, cat):
        assert abs(finder.I_of(cat.theta, cat.t_gc)) < 1e-10

    def test_arg_Hprime(self, cat):
        # arg H'(alpha_gc) = -(5/2) theta modulo 2 pi
        d = (cmath.phase(cat.Hprime) + 2.5 * cat.theta) % (2.0 * math.pi)
        assert min(d, 2.0 * math.pi - d) < 1e-6

    def test_B_equals_2K(self, cat):
        assert abs(cat.B_gc - 2.0 * sf.elliptic_K(cat.m_gc)) < 1e-6

    def test_A_combination_equals_minus_rho(self, cat):
        comb = cat.A_gc / (cat.B_gc * math.sin(cat.theta)) + 1.0 / math.tan(cat.theta)
        assert abs(comb + cat.rho) < 1e-6

    def test_b_is_minus_a_rho(self, cat):
        assert abs(cat.b + cat.a * cat.rho) < 1e-8
        assert cat.a < 0 and cat.b > 0 and cat.sigma > 0 and cat.M_const > 0

    def test_AB_dual_routes(self, finder, cat):
        A1, B1 = finder.AB_integrals(cat.theta)
        A2, B2 = finder.AB_axis_integrals(cat.theta)
        assert abs(A1 - A2) < 1e-5
        assert abs(B1 - B2) < 1e-5

    def test_sigma_from_f5(self, cat):
        f5 = -0.2 * cat.Hprime * np.exp(0.25j * math.pi) * math.sqrt(2.0 * math.sin(cat.theta))
        assert abs(cat.sigma - abs(1.25 * f5) ** 0.2) < 1e-12

    def test_json_round_trip(self, cat):
        d = cat.to_json_dict()
        for key in ("theta", "t_gc", "m_gc", "omega_gc", "rho", "A", "B", "sigma", "a", "b", "M"):
            assert key in d


class TestPhase:
    def test_phase_zero_at_t_zero(self, finder, phase):
        assert gf.phase_Phi(SECH, 0.0, computer=phase) == 0.0

    def test_phase_derivative_identity(self, finder, phase):
        h = 1e-3
        d = (gf.phase_Phi(SECH, 1.0 + h, computer=phase) - gf.phase_Phi(SECH, 1.0 - h, computer=phase)) / (2 * h)
        eta = finder.solve_eta(1.0).eta
        m = math.sin(0.5 * eta) ** 2
        assert abs(d - math.pi / (2.0 * sf.elliptic_K(m))) < 1e-6

    def test_g_route_cross_validation(self, phase):
        val = phase.phi(1.0)
        freq = phase.phi_from_frequency(1.0)
        assert abs(val.real - freq) < 2e-3
        assert abs(val.imag) < 2e-3

    def test_m_basic_first_moment_vanishes(self, finder, phase):
        eta = finder.solve_eta(1.0).eta
        assert phase.m_basic_residual(eta, 1.0) < 1e-8


class TestPhiField:
    def test_reality_on_circle_beyond_alpha(self, finder):
        eta = finder.solve_eta(1.0).eta
        for psi in (eta + 0.3, eta + 0.8, 2.8):
            v = gf.phi_on_circle(finder, eta, 1.0, psi)
            assert abs(v.real) < 1e-10

    def test_sign_structure_near_terminus(self, finder):
        eta = finder.solve_eta(1.0).eta
        res, ims, grid = gf.phi_field(finder, eta, 1.0, (0.9, 1.1), (0.01, 0.05), 5, 2)
        left = grid[:, res < 0.99]
        right = grid[:, res > 1.01]
        assert np.nanmax(left) < 0
        assert np.nanmin(right) > 0

    def test_endpoint_value_vanishes(self, finder):
        eta = finder.solve_eta(1.0).eta
        v = gf.phi_on_circle(finder, eta, 1.0, eta + 1e-7)
        assert abs(v) < 1e-6
