"""Self-contained real/complex special functions.

Complete elliptic integrals K(m), E(m) by the arithmetic-geometric mean,
Jacobi elliptic functions sn, cn, dn by the descending Landen transformation,
the genus-1 theta series Theta(z; H) with Re{H} < 0, the periodic (but not
elliptic) function p(w; m), and the scalar combinations rho(m) and J(E).

Parameter convention: m in (0, 1) throughout (m = k^2 in the modulus
convention).  All functions are pure; per-modulus constants are cached.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import NamedTuple

import numpy as np
from scipy.integrate import quad

__all__ = [
    "EllipticTriple",
    "elliptic_K_E",
    "elliptic_K",
    "elliptic_E",
    "jacobi",
    "jacobi_am",
    "theta",
    "theta_d1",
    "theta_trunc_bound",
    "dn_inv_sq_mean",
    "p_periodic",
    "rho",
    "whitham_J",
]

_AGM_DEPTH = 40  # quadratic convergence: ~8 sweeps suffice for any m in (0,1)


class EllipticTriple(NamedTuple):
    """Values (sn, cn, dn) of the Jacobi elliptic functions at one point."""

    sn: float
    cn: float
    dn: float


def _check_m(m: float) -> None:
    if not (0.0 < m < 1.0):
        raise ValueError(f"modulus parameter m must lie in (0,1), got {m}")


@lru_cache(maxsize=4096)
def _agm_sequence(m: float) -> tuple[tuple[float, ...], tuple[float, ...], tuple[float, ...]]:
    """AGM sequence (a_n, b_n, c_n) started from a0=1, b0=sqrt(1-m), c0=sqrt(m)."""
    a, b, c = 1.0, math.sqrt(1.0 - m), math.sqrt(m)
    aa, bb, cc = [a], [b], [c]
    for _ in range(_AGM_DEPTH):
        a, b, c = 0.5 * (a + b), math.sqrt(a * b), 0.5 * (a - b)
        aa.append(a)
        bb.append(b)
        cc.append(c)
        if abs(c) < 1e-16:
            break
    return tuple(aa), tuple(bb), tuple(cc)


@lru_cache(maxsize=4096)
def elliptic_K_E(m: float) -> tuple[float, float]:
    """Complete elliptic integrals (K(m), E(m)) by the AGM.

    K(m) = int_0^1 ds / sqrt((1-s^2)(1-m s^2)),
    E(m) = int_0^1 sqrt((1-m s^2)/(1-s^2)) ds.
    """
    _check_m(m)
    aa, _, cc = _agm_sequence(m)
    K = math.pi / (2.0 * aa[-1])
    s = 0.0
    for n, c in enumerate(cc):
        s += 0.5 * (2.0**n) * c * c
    E = K * (1.0 - s)
    return K, E


def elliptic_K(m: float) -> float:
    return elliptic_K_E(m)[0]


def elliptic_E(m: float) -> float:
    return elliptic_K_E(m)[1]


def jacobi_am(u, m: float):
    """Jacobi amplitude am(u; m), continued through multiples of pi.

    Descending Landen recursion on the AGM sequence (DLMF 22.20(ii)):
    phi_N = 2^N a_N u, then phi_{n-1} = (phi_n + asin((c_n/a_n) sin phi_n))/2.
    """
    _check_m(m)
    aa, _, cc = _agm_sequence(m)
    N = len(aa) - 1
    u = np.asarray(u, dtype=float)
    phi = (2.0**N) * aa[N] * u
    for n in range(N, 0, -1):
        arg = np.clip(cc[n] / aa[n] * np.sin(phi), -1.0, 1.0)
        phi = 0.5 * (phi + np.arcsin(arg))
    return phi


def jacobi(u, m: float):
    """Jacobi elliptic triple (sn(u;m), cn(u;m), dn(u;m)).

    Accepts scalar or array u.  Satisfies sn^2 + cn^2 = 1 exactly and
    dn = +sqrt(1 - m sn^2) (dn never vanishes for m < 1); periods 4K(m)
    for sn, cn and 2K(m) for dn.
    """
    phi0 = jacobi_am(u, m)
    sn = np.sin(phi0)
    cn = np.cos(phi0)
    dn = np.sqrt(1.0 - m * sn * sn)
    if np.ndim(sn) == 0:
        return EllipticTriple(float(sn), float(cn), float(dn))
    return EllipticTriple(sn, cn, dn)


def theta_trunc_bound(z, H) -> int:
    """Smallest summation half-width N* with tail terms below 1e-16.

    Terms are e^{Re{H} n^2/2 + n Re{z}}; N* solves the quadratic so that
    every |n| > N* term is < 1e-16 in magnitude.
    """
    h = -0.5 * np.real(H)
    R = float(np.max(np.abs(np.real(np.asarray(z)))))
    L = -math.log(1e-16)
    n_star = (R + math.sqrt(R * R + 4.0 * h * L)) / (2.0 * h)
    n = int(math.ceil(n_star)) + 2
    if n > 2_000_000:
        raise ValueError("theta series truncation width exceeds sane bound; |Re H| too small")
    return n


def _theta_terms(z, H):
    if np.real(H) >= 0:
        raise ValueError(f"theta parameter must satisfy Re(H) < 0, got Re(H) = {np.real(H)}")
    z = np.asarray(z, dtype=complex)
    n_star = theta_trunc_bound(z, H)
    n = np.arange(-n_star, n_star + 1)
    expo = 0.5 * H * n * n + np.multiply.outer(z, n)
    return n, np.exp(expo)

def theta(z, H):
    """Genus-1 theta series Theta(z; H) = sum_n e^{H n^2 / 2} e^{n z}, Re H < 0.

    Even and 2*pi*i periodic in z, with the automorphic shift
    Theta(z + H; H) = e^{-H/2} e^{-z} Theta(z; H); its only zeros sit on the
    shifted lattice through i*pi + H/2.
    """
    _, terms = _theta_terms(z, H)
    out = terms.sum(axis=-1)
    return complex(out) if out.ndim == 0 else out


def theta_d1(z, H):
    """First z-derivative of the theta series."""
    n, terms = _theta_terms(z, H)
    out = (n * terms).sum(axis=-1)
    return complex(out) if out.ndim == 0 else out


@lru_cache(maxsize=4096)
def dn_inv_sq_mean(m: float) -> float:
    """Mean of dn(.; m)^-2 over a period: E(m) / ((1-m) K(m))."""
    K, E = elliptic_K_E(m)
    return E / ((1.0 - m) * K)


def p_periodic(w, m: float):
    """The 2K(m)-periodic zero-mean antiderivative p(w; m).

    p(w; m) = int_0^{w+K} ( <dn^-2> - dn(zeta; m)^-2 ) dzeta, with the mean
    <dn^-2> = E/((1-m)K).  The integrand has zero mean, so the integral is
    reduced to the fundamental period before adaptive quadrature.
    """
    _check_m(m)
    K, _ = elliptic_K_E(m)
    mean = dn_inv_sq_mean(m)

    def integrand(z):
        return mean - 1.0 / jacobi(z, m).dn ** 2

    def one(wv: float) -> float:
        r = math.fmod(wv + K, 2.0 * K)
        if r < 0.0:
            r += 2.0 * K
        val, _err = quad(integrand, 0.0, r, epsabs=1e-12, epsrel=1e-12, limit=200)
        return val

    if np.ndim(w) == 0:
        return one(float(w))
    return np.array([one(float(wv)) for wv in np.ravel(w)]).reshape(np.shape(w))


def rho(m: float) -> float:
    """rho(m) = E(m)/(K(m) sqrt(m(1-m))) - sqrt((1-m)/m), positive on (0,1)."""
    _check_m(m)
    K, E = elliptic_K_E(m)
    return E / (K * math.sqrt(m * (1.0 - m))) - math.sqrt((1.0 - m) / m)


def whitham_J(energy: float) -> float:
    """J(E) = (8/pi) (E(m) + (m-1) K(m)) with m = (1+E)/2, for E in (-1,1).

    Satisfies pi*J(E) = 8 K(m) sqrt(m(1-m)) rho(m).
    """
    if not (-1.0 < energy < 1.0):
        raise ValueError(f"energy must lie in (-1,1), got {energy}")
    m = 0.5 * (1.0 + energy)
    K, E = elliptic_K_E(m)
    return (8.0 / math.pi) * (E + (m - 1.0) * K)
