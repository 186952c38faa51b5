"""Special-function layer: frozen oracles and invariants."""

import math

import numpy as np
import pytest
from scipy.integrate import quad, solve_ivp

from sgfluxon import specfun as sf
from sgfluxon.identities import run_identity_suite

# Oracle: adaptive quadrature of the defining integrals at m = 1/2,
# K = int_0^1 ds/sqrt((1-s^2)(1-m s^2)), frozen from scipy.integrate.quad.
K_HALF_QUAD = 1.8540746773013719


def K_by_quadrature(m):
    # s = sin(t) renders the defining integrand smooth on [0, pi/2].
    val, _ = quad(
        lambda t: 1.0 / math.sqrt(1.0 - m * math.sin(t) ** 2),
        0.0,
        math.pi / 2,
        epsabs=1e-13,
        epsrel=1e-13,
        limit=400,
    )
    return val


def E_by_quadrature(m):
    val, _ = quad(
        lambda t: math.sqrt(1.0 - m * math.sin(t) ** 2),
        0.0,
        math.pi / 2,
        epsabs=1e-13,
        epsrel=1e-13,
        limit=400,
    )
    return val


class TestEllipticKE:
    def test_small_m_limit(self):
        K, E = sf.elliptic_K_E(1e-12)
        assert abs(K - math.pi / 2) < 1e-11
        assert abs(E - math.pi / 2) < 1e-11

    def test_m_half_against_quadrature(self):
        K, E = sf.elliptic_K_E(0.5)
        assert abs(K - K_HALF_QUAD) < 1e-13
        assert abs(K - K_by_quadrature(0.5)) < 1e-12
        assert abs(E - E_by_quadrature(0.5)) < 1e-12

    @pytest.mark.parametrize("m", [0.01, 0.2, 0.42, 0.7, 0.95])
    def test_quadrature_oracle_sweep(self, m):
        K, E = sf.elliptic_K_E(m)
        assert abs(K - K_by_quadrature(m)) < 2e-12 * K
        assert abs(E - E_by_quadrature(m)) < 2e-12 * E

    def test_domain_errors(self):
        for bad in (-0.1, 0.0, 1.0, 1.5):
            with pytest.raises(ValueError):
                sf.elliptic_K_E(bad)


class TestJacobi:
    def test_origin(self):
        sn, cn, dn = sf.jacobi(0.0, 0.3)
        assert (sn, cn, dn) == (0.0, 1.0, 1.0)

    def test_quarter_period(self):
        m = 0.42
        K = sf.elliptic_K(m)
        sn, cn, dn = sf.jacobi(K, m)
        assert abs(sn - 1.0) < 1e-12
        assert abs(cn) < 1e-12
        assert abs(dn - math.sqrt(1.0 - m)) < 1e-12

    def test_against_ode_integration(self):
        # Oracle: integrate sn' = cn dn, cn' = -sn dn, dn' = -m sn cn from 0.
        m, u = 0.42, 0.7

        def rhs(_, y):
            s, c, d = y
            return [c * d, -s * d, -m * s * c]

        sol = solve_ivp(rhs, [0.0, u], [0.0, 1.0, 1.0], rtol=1e-12, atol=1e-14, dense_output=True)
        sn, cn, dn = sf.jacobi(u, m)
        s, c, d = sol.y[:, -1]
        assert abs(sn - s) < 1e-10
        assert abs(cn - c) < 1e-10
        assert abs(dn - d) < 1e-10

    def test_periods(self):
        m = 0.3
        K = sf.elliptic_K(m)
        u = 0.9
        a = sf.jacobi(u, m)
        b = sf.jacobi(u + 4 * K, m)
        assert abs(a.sn - b.sn) < 1e-11 and abs(a.cn - b.cn) < 1e-11
        c = sf.jacobi(u + 2 * K, m)
        assert abs(a.dn - c.dn) < 1e-11

    def test_pythagorean_invariants_random(self):
        rng = np.random.default_rng(7)
        u = rng.uniform(-20, 20, 1000)
        m_draws = rng.uniform(0.02, 0.98, 1000)
        for ui, mi in zip(u, m_draws):
            sn, cn, dn = sf.jacobi(ui, mi)
            assert abs(sn * sn + cn * cn - 1.0) < 1e-12
            assert abs(dn * dn - (1.0 - mi * sn * sn)) < 1e-12

    def test_array_input(self):
        u = np.linspace(-3, 3, 11)
        sn, cn, dn = sf.jacobi(u, 0.5)
        assert sn.shape == u.shape
        assert np.allclose(sn**2 + cn**2, 1.0, atol=1e-13)

    def test_domain_error(self):
        with pytest.raises(ValueError):
            sf.jacobi(0.5, 1.2)


class TestTheta:
    def test_simple_zero_at_riemann_constant(self):
        H = -2.0 * math.pi
        K = 1j * math.pi + 0.5 * H
        assert abs(sf.theta(K, H)) < 1e-12
        assert abs(sf.theta_d1(K, H)) > 1e-3

    def test_automorphic_shift(self):
        z, H = 0.3 + 0.2j, -3.0
        lhs = sf.theta(z + H, H)
        rhs = np.exp(-H / 2) * np.exp(-z) * sf.theta(z, H)
        assert abs(lhs - rhs) < 1e-12 * abs(rhs)

    def test_even_and_periodic(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            z = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
            H = complex(-rng.uniform(0.5, 6), rng.uniform(-2, 2))
            assert abs(sf.theta(-z, H) - sf.theta(z, H)) < 1e-12
            assert abs(sf.theta(z + 2j * math.pi, H) - sf.theta(z, H)) < 1e-10

    def test_derivative_against_central_differences(self):
        z, H = 0.4 - 0.7j, -2.5 + 0.4j
        h = 1e-6
        fd = (sf.theta(z + h, H) - sf.theta(z - h, H)) / (2 * h)
        assert abs(sf.theta_d1(z, H) - fd) < 1e-8

    def test_domain_error(self):
        with pytest.raises(ValueError):
            sf.theta(0.1, 0.5)
        with pytest.raises(ValueError):
            sf.theta(0.1, 1j)


class TestPPeriodic:
    def test_zero_at_minus_K(self):
        m = 0.42
        K = sf.elliptic_K(m)
        assert abs(sf.p_periodic(-K, m)) < 1e-12

    def test_periodicity(self):
        m = 0.42
        K = sf.elliptic_K(m)
        assert abs(sf.p_periodic(0.4 + 2 * K, m) - sf.p_periodic(0.4, m)) < 1e-11

    def test_mean_constant_by_quadrature(self):
        m = 0.3
        K = sf.elliptic_K(m)
        val, _ = quad(lambda z: 1.0 / sf.jacobi(z, m).dn ** 2, 0, 2 * K, epsabs=1e-13, limit=200)
        assert abs(val / (2 * K) - sf.dn_inv_sq_mean(m)) < 1e-11

    def test_closed_form_oracle(self):
        # Oracle: int_0^x dn^-2 = (eps(x;m) - m sn cn / dn) / (1-m) with the
        # Jacobi epsilon function from scipy's incomplete second integral.
        from scipy.special import ellipeinc

        m = 0.42
        K = sf.elliptic_K(m)
        mean = sf.dn_inv_sq_mean(m)

        def p_oracle(w):
            r = math.fmod(w + K, 2 * K)
            if r < 0:
                r += 2 * K
            sn, cn, dn = sf.jacobi(r, m)
            phi = math.asin(max(-1.0, min(1.0, sn)))
            am = phi if r <= K else math.pi - phi
            integral = (ellipeinc(am, m) - m * sn * cn / dn) / (1.0 - m)
            return mean * r - integral

        for w in (-1.1, 0.0, 0.4, 2.0, 7.3):
            assert abs(sf.p_periodic(w, m) - p_oracle(w)) < 1e-10


class TestRhoAndJ:
    def test_rho_small_m_asymptote(self):
        m = 1e-4
        assert abs(sf.rho(m) / (math.sqrt(m) / 2.0) - 1.0) < 1e-2

    def test_pi_J_identity(self):
        e = -0.2
        m = 0.5 * (1 + e)
        K = sf.elliptic_K(m)
        assert abs(math.pi * sf.whitham_J(e) - 8 * K * math.sqrt(m * (1 - m)) * sf.rho(m)) < 1e-10

    def test_rho_monotone(self):
        grid = np.linspace(0.1, 0.9, 9)
        vals = [sf.rho(m) for m in grid]
        assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            sf.rho(0.0)
        with pytest.raises(ValueError):
            sf.whitham_J(1.0)


def test_identity_suite_passes():
    results = run_identity_suite(n_draws=24)
    failed = [r for r in results if not r.passed]
    assert not failed, f"identity suite failures: {failed}"
