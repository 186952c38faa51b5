"""Numeric identity suite over the special-function layer.

Each checker returns the absolute identity residual; `run_identity_suite`
draws random admissible parameters and reports (name, max residual,
tolerance, pass).  Used by both the test suite and the `selftest` CLI
command.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from . import specfun as sf


class IdentityResult(NamedTuple):
    name: str
    max_residual: float
    tolerance: float
    passed: bool
    draws: int


def legendre_relation(m: float) -> float:
    """E(m)K(1-m) + E(1-m)K(m) - K(m)K(1-m) = pi/2."""
    K, E = sf.elliptic_K_E(m)
    K1, E1 = sf.elliptic_K_E(1.0 - m)
    return abs(E * K1 + E1 * K - K * K1 - 0.5 * math.pi)


def jacobi_pythagorean(u: float, m: float) -> float:
    sn, cn, dn = sf.jacobi(u, m)
    return max(abs(sn * sn + cn * cn - 1.0), abs(dn * dn - (1.0 - m * sn * sn)))


def theta_zero_at_K(H: complex) -> float:
    """Theta(K; H) = 0 with K = i*pi + H/2 (simple zero)."""
    K = 1j * math.pi + 0.5 * H
    scale = abs(sf.theta(0.0, H))
    return abs(sf.theta(K, H)) / scale


def theta_prime_K(H: complex) -> float:
    """Theta'(K; H) = (1/2) Theta(H/2; H) Theta(0; H) Theta(i*pi; H)."""
    K = 1j * math.pi + 0.5 * H
    lhs = sf.theta_d1(K, H)
    rhs = 0.5 * sf.theta(0.5 * H, H) * sf.theta(0.0, H) * sf.theta(1j * math.pi, H)
    return abs(lhs - rhs) / max(1.0, abs(rhs))


def theta_double_argument(z: complex, H: complex) -> float:
    """Theta(z)^4 - e^{H/2} e^{2z} Theta(z + H/2)^4 = Theta(i*pi)^3 Theta(2z + i*pi).

    The right-hand argument carries the extra i*pi shift; the identity is
    equivalent to the classical theta3^4 - theta2^4 = theta4(2v) theta4(0)^3.
    """
    lhs = sf.theta(z, H) ** 4 - np.exp(0.5 * H) * np.exp(2.0 * z) * sf.theta(z + 0.5 * H, H) ** 4
    rhs = sf.theta(1j * math.pi, H) ** 3 * sf.theta(2.0 * z + 1j * math.pi, H)
    return abs(lhs - rhs) / max(1.0, abs(rhs))


def theta_parameter_shift(z: complex, H: complex) -> float:
    """Theta(z; H + 2*pi*i) = Theta(z + i*pi; H)."""
    lhs = sf.theta(z, H + 2j * math.pi)
    rhs = sf.theta(z + 1j * math.pi, H)
    return abs(lhs - rhs) / max(1.0, abs(rhs))


def theta_watson_addition(z1: complex, z2: complex, H: complex) -> float:
    """Watson-type addition relating parameters H and 2H."""
    lhs = sf.theta(z1, H) * sf.theta(z2, H)
    rhs = sf.theta(z1 + z2, 2 * H) * sf.theta(z1 - z2, 2 * H) + np.exp(0.5 * H) * np.exp(
        z1
    ) * sf.theta(z1 + z2 + H, 2 * H) * sf.theta(z1 - z2 + H, 2 * H)
    return abs(lhs - rhs) / max(1.0, abs(rhs))


def _H0(m: float) -> float:
    K, _ = sf.elliptic_K_E(m)
    K1, _ = sf.elliptic_K_E(1.0 - m)
    return -2.0 * math.pi * K1 / K


def theta_eliminate(m: float) -> float:
    """Theta0(0), Theta0(i*pi), Theta0(H0/2) against K(m) closed forms."""
    H0 = _H0(m)
    K, _ = sf.elliptic_K_E(m)
    c = math.sqrt(2.0 / math.pi) * math.sqrt(K)
    r0 = abs(sf.theta(0.0, H0) - c)
    r1 = abs(sf.theta(1j * math.pi, H0) - (1.0 - m) ** 0.25 * c)
    r2 = abs(sf.theta(0.5 * H0, H0) - m**0.25 * math.exp(-H0 / 8.0) * c)
    return max(r0, r1, r2) / c


def theta_fourth_final(m: float) -> float:
    """e^{-i*theta/2} Theta0(H0/4 - i*pi/2)^4 = 2 (m(1-m))^{1/4} e^{-H0/8} K(m)^2 / pi^2."""
    H0 = _H0(m)
    K, _ = sf.elliptic_K_E(m)
    ang = 2.0 * math.asin(math.sqrt(m))
    lhs = np.exp(-0.5j * ang) * sf.theta(0.25 * H0 - 0.5j * math.pi, H0) ** 4
    rhs = 2.0 * (m * (1.0 - m)) ** 0.25 * math.exp(-H0 / 8.0) * K * K / math.pi**2
    return abs(lhs - rhs) / abs(rhs)


def pi_J_identity(energy: float) -> float:
    """pi J(E) = 8 K(m) sqrt(m(1-m)) rho(m), m = (1+E)/2."""
    m = 0.5 * (1.0 + energy)
    K, _ = sf.elliptic_K_E(m)
    return abs(math.pi * sf.whitham_J(energy) - 8.0 * K * math.sqrt(m * (1.0 - m)) * sf.rho(m))


def p_periodic_derivative(w: float, m: float, h: float = 1e-5) -> float:
    """d/dw p(w; m) = <dn^-2> - dn(w + K; m)^-2 via central differences."""
    K, _ = sf.elliptic_K_E(m)
    fd = (sf.p_periodic(w + h, m) - sf.p_periodic(w - h, m)) / (2.0 * h)
    exact = sf.dn_inv_sq_mean(m) - 1.0 / sf.jacobi(w + K, m).dn ** 2
    return abs(fd - exact)


def run_identity_suite(n_draws: int = 24, seed: int = 20240211) -> list[IdentityResult]:
    """Run every identity at `n_draws` random admissible parameter draws."""
    rng = np.random.default_rng(seed)
    ms = rng.uniform(0.05, 0.95, n_draws)
    us = rng.uniform(-8.0, 8.0, n_draws)
    Hs = -rng.uniform(1.0, 8.0, n_draws) + 1j * rng.uniform(-2.0, 2.0, n_draws)
    zs = rng.uniform(-1.0, 1.0, n_draws) + 1j * rng.uniform(-1.0, 1.0, n_draws)
    z2s = rng.uniform(-1.0, 1.0, n_draws) + 1j * rng.uniform(-1.0, 1.0, n_draws)
    es = rng.uniform(-0.9, 0.9, n_draws)
    ws = rng.uniform(-6.0, 6.0, n_draws)

    checks = [
        ("legendre", 1e-12, [legendre_relation(m) for m in ms]),
        ("jacobi-pythagorean", 1e-12, [jacobi_pythagorean(u, m) for u, m in zip(us, ms)]),
        ("theta-zero-at-K", 1e-12, [theta_zero_at_K(H) for H in Hs]),
        ("theta-prime-K", 1e-10, [theta_prime_K(H) for H in Hs]),
        ("theta-double-argument", 1e-10, [theta_double_argument(z, H) for z, H in zip(zs, Hs)]),
        ("theta-parameter-shift", 1e-10, [theta_parameter_shift(z, H) for z, H in zip(zs, Hs)]),
        (
            "theta-watson-addition",
            1e-10,
            [theta_watson_addition(z1, z2, H) for z1, z2, H in zip(zs, z2s, Hs)],
        ),
        ("theta-eliminate-vs-K", 1e-10, [theta_eliminate(m) for m in ms]),
        ("theta-fourth-final", 1e-10, [theta_fourth_final(m) for m in ms]),
        ("pi-J-vs-rho", 1e-10, [pi_J_identity(e) for e in es]),
        ("p-periodic-derivative", 1e-6, [p_periodic_derivative(w, m) for w, m in zip(ws, ms)]),
    ]
    out = []
    for name, tol, residuals in checks:
        r = float(np.max(residuals))
        out.append(IdentityResult(name, r, tol, r < tol, len(residuals)))
    return out
