"""Spectral-plane maps and phase integrals.

The maps E(w), D(w), Q(w; x, t) on the cut plane |arg(-w)| < pi, impulse
profiles G(x) with their phase integral Psi(lambda), the WKB parameter
epsilon_N, the composition theta0(w) = Psi(E(w)), and the Cauchy-type
functions L(w) and k(w) built from theta0 on the pole-accumulation arc.

Conventions: profiles are Schwartz-class, even, with -2 < G(0) < 0, so the
spectral band is the imaginary segment 0 < -i*lambda < -G(0)/4 and the pole
arc P_inf of the unit circle has half-opening mu = 2*asin(-G(0)/2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from numpy.polynomial.chebyshev import Chebyshev
from numpy.polynomial.legendre import leggauss
from scipy.integrate import quad
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

__all__ = [
    "BranchCutError",
    "sqrt_neg",
    "E_of",
    "D_of",
    "E_prime",
    "Q_of",
    "ImpulseProfile",
    "sech_profile",
    "gaussian_profile",
    "table_profile",
    "epsilon_N",
    "PhaseIntegralContext",
    "gauss_panels",
]


class BranchCutError(ValueError):
    """Evaluation requested on the positive real axis branch cut."""


def _guard_positive_axis(w) -> None:
    w = np.asarray(w, dtype=complex)
    on_cut = (np.imag(w) == 0.0) & (np.real(w) > 0.0)
    if np.any(on_cut):
        raise BranchCutError("E, D, Q are not defined on the branch cut w > 0")


def sqrt_neg(w):
    """Principal branch of sqrt(-w), analytic for w off [0, +inf)."""
    return np.sqrt(-np.asarray(w, dtype=complex))


def E_of(w):
    """E(w) = (i/4) (sqrt(-w) + 1/sqrt(-w)); satisfies E(1/w) = E(w)."""
    _guard_positive_axis(w)
    r = sqrt_neg(w)
    return 0.25j * (r + 1.0 / r)


def D_of(w):
    """D(w) = (i/4) (sqrt(-w) - 1/sqrt(-w))."""
    _guard_positive_axis(w)
    r = sqrt_neg(w)
    return 0.25j * (r - 1.0 / r)


def E_prime(w):
    """dE/dw = -(i/8) (1 + 1/w) / sqrt(-w)."""
    _guard_positive_axis(w)
    w = np.asarray(w, dtype=complex)
    return -0.125j * (1.0 + 1.0 / w) / sqrt_neg(w)


def Q_of(w, x: float, t: float):
    """Q(w; x, t) = E(w) x + D(w) t."""
    return E_of(w) * x + D_of(w) * t


def gauss_panels(edges, n: int):
    """Gauss-Legendre nodes/weights over consecutive panels [edges[i], edges[i+1]]."""
    xg, wg = leggauss(n)
    nodes, weights = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        h = 0.5 * (b - a)
        nodes.append(0.5 * (a + b) + h * xg)
        weights.append(h * wg)
    return np.concatenate(nodes), np.concatenate(weights)


@dataclass(frozen=True)
class ImpulseProfile:
    """Even Schwartz-class impulse profile G with -2 < G(0) < 0.

    `G_complex` (optional) is the analytic extension used for the phase
    integral above the band edge; `psi_closed`/`psi_prime_closed` (optional)
    are closed forms of Psi(lambda) and Psi'(lambda) as analytic functions.
    """

    name: str
    G: Callable[[np.ndarray], np.ndarray]
    integral_G: float
    support: float  # half-width beyond which |G| is negligible for quadrature
    G_complex: Optional[Callable] = None
    psi_closed: Optional[Callable] = None
    psi_prime_closed: Optional[Callable] = None

    def __post_init__(self):
        g0 = float(self.G(np.array(0.0)))
        if not (-2.0 < g0 < 0.0):
            raise ValueError(f"profile must satisfy -2 < G(0) < 0, got G(0) = {g0}")
        xs = np.linspace(0.1, 0.9 * self.support, 16)
        if np.max(np.abs(self.G(xs) - self.G(-xs))) > 1e-12:
            raise ValueError("profile must be even: G(-x) = G(x)")

    @property
    def G0(self) -> float:
        return float(self.G(np.array(0.0)))

    @property
    def v_max(self) -> float:
        return -0.25 * self.G0

    @property
    def mu(self) -> float:
        """Half-opening angle of the pole arc: E(e^{i mu}) = -i G(0)/4."""
        return 2.0 * math.asin(-0.5 * self.G0)


def sech_profile(amplitude: float = 0.25) -> ImpulseProfile:
    """G(x) = -4A sech(x), the family with entire phase integral
    Psi(lambda) = i pi lambda + pi A."""
    A = float(amplitude)
    if not (0.0 < A < 0.5):
        raise ValueError("sech amplitude must lie in (0, 1/2) for the breather-only sector")
    return ImpulseProfile(
        name=f"sech(A={A:g})",
        G=lambda x: -4.0 * A / np.cosh(x),
        integral_G=-4.0 * math.pi * A,
        support=50.0,
        G_complex=lambda z: -4.0 * A / np.cosh(z),
        psi_closed=lambda lam: 1j * math.pi * np.asarray(lam, dtype=complex) + math.pi * A,
        psi_prime_closed=lambda lam: 1j * math.pi * np.ones_like(np.asarray(lam, dtype=complex)),
    )


def gaussian_profile(depth: float = 1.0, width: float = 1.0) -> ImpulseProfile:
    """G(x) = -depth * exp(-(x/width)^2)."""
    d, s = float(depth), float(width)
    if not (0.0 < d < 2.0):
        raise ValueError("gaussian depth must lie in (0, 2)")
    return ImpulseProfile(
        name=f"gaussian(depth={d:g},width={s:g})",
        G=lambda x: -d * np.exp(-((x / s) ** 2)),
        integral_G=-d * s * math.sqrt(math.pi),
        support=9.0 * s,
        G_complex=lambda z: -d * np.exp(-((z / s) ** 2)),
    )


def table_profile(x: np.ndarray, g: np.ndarray, name: str = "table") -> ImpulseProfile:
    """Profile from tabulated samples (x >= 0 suffices; even extension applied)."""
    x = np.asarray(x, dtype=float)
    g = np.asarray(g, dtype=float)
    order = np.argsort(np.abs(x))
    xa, ga = np.abs(x)[order], g[order]
    xa, idx = np.unique(xa, return_index=True)
    ga = ga[idx]
    spline = CubicSpline(xa, ga, bc_type=((1, 0.0), "natural"))
    hi = float(xa[-1])

    def G(xx):
        xx = np.abs(np.asarray(xx, dtype=float))
        out = np.where(xx <= hi, spline(np.minimum(xx, hi)), 0.0)
        return out if out.ndim else float(out)

    integral = 2.0 * float(spline.integrate(0.0, hi))
    return ImpulseProfile(name=name, G=G, integral_G=integral, support=hi)


def epsilon_N(profile: ImpulseProfile, N: int) -> float:
    """epsilon_N = -(1/(4 pi N)) * integral of G, positive; linear in 1/N."""
    if N < 1:
        raise ValueError("N must be a positive integer")
    return -profile.integral_G / (4.0 * math.pi * N)


class PhaseIntegralContext:
    """Phase integral Psi and the derived contour functions for one profile.

    Psi(i v) = (1/4) int sqrt(G(s)^2 - 16 v^2) ds between the real turning
    points for 0 < v < v_max, continued across the band edge through the
    imaginary-s contour between the (conjugate) complex turning points for
    v > v_max.  Off-axis values come from the closed form when the profile
    carries one, else from a Chebyshev model of Psi(i v) evaluated at complex
    arguments.
    """

    def __init__(
        self,
        profile: ImpulseProfile,
        use_closed_psi: bool = True,
        n_gauss: int = 80,
        cheb_degree: int = 240,
    ):
        self.profile = profile
        self.use_closed = use_closed_psi and profile.psi_closed is not None
        self.n_gauss = n_gauss
        self.cheb_degree = cheb_degree
        self.v_max = profile.v_max
        self.mu = profile.mu
        self._theta = leggauss(n_gauss)
        self._cheb: Optional[Chebyshev] = None
        self._cheb_hi = 0.0
        self._arc_rule = None

    # -- turning points ----------------------------------------------------

    def turning_point(self, v: float) -> float:
        """Positive real root of |G(s)| = 4v, for 0 < v < v_max."""
        if not (0.0 < v < self.v_max):
            raise ValueError(f"turning point requires 0 < v < v_max = {self.v_max}, got {v}")
        G = self.profile.G
        f = lambda s: -float(G(np.array(s))) - 4.0 * v
        hi = self.profile.support
        if f(hi) > 0:
            raise ValueError("turning point search failed: profile support too small")
        return brentq(f, 0.0, hi, xtol=1e-15, rtol=8.9e-16)

    def turning_point_imag(self, v: float) -> float:
        """Positive sigma with -G(i sigma) = 4v, for v > v_max (analytic G)."""
        Gc = self.profile.G_complex
        if Gc is None:
            raise ValueError(
                "phase-integral continuation above the band edge needs an analytic profile"
            )
        f = lambda s: -float(np.real(Gc(1j * s))) - 4.0 * v
        # -G(i sigma) increases from -G(0) toward (possibly) a singularity;
        # march to the first sign change so a later pole of G(i s) is never crossed.
        lo, h = 0.0, 0.02
        for _ in range(200000):
            hi = lo + h
            fv = f(hi)
            if not math.isfinite(fv):
                raise ValueError("imaginary turning point search hit a singularity of G(i s)")
            if fv > 0:
                return brentq(f, lo, hi, xtol=1e-15, rtol=8.9e-16)
            lo = hi
        raise ValueError("imaginary turning point search failed")

    # -- Psi on and off the imaginary axis ---------------------------------

    def psi_v(self, v: float) -> float:
        """Psi(i v) for 0 < v < v_max (real, strictly decreasing)."""
        if self.use_closed:
            return float(np.real(self.profile.psi_closed(1j * v)))
        xp = self.turning_point(v)
        th, wt = self._theta
        theta = 0.25 * math.pi * (th + 1.0)
        s = xp * np.sin(theta)
        vals = np.sqrt(self.profile.G(s) ** 2 - 16.0 * v * v) * np.cos(theta)
        return 0.5 * xp * 0.25 * math.pi * float(np.dot(wt, vals))

    def psi_v_prime(self, v: float) -> float:
        """d/dv Psi(i v) = -8 v int_0^{x_+} ds / sqrt(G^2 - 16 v^2) (negative)."""
        if self.use_closed:
            h = 1e-6
            lam = 1j * v
            return float(np.real(1j * self.profile.psi_prime_closed(lam)))
        xp = self.turning_point(v)
        th, wt = self._theta
        theta = 0.25 * math.pi * (th + 1.0)
        s = xp * np.sin(theta)
        vals = np.cos(theta) / np.sqrt(self.profile.G(s) ** 2 - 16.0 * v * v)
        return -8.0 * v * xp * 0.25 * math.pi * float(np.dot(wt, vals))

    def psi_v_ext(self, v: float) -> float:
        """Continuation of Psi(i v) for v >= v_max via the imaginary-s contour."""
        if self.use_closed:
            return float(np.real(self.profile.psi_closed(1j * v)))
        if v == self.v_max:
            return 0.0
        s0 = self.turning_point_imag(v)
        th, wt = self._theta
        theta = 0.25 * math.pi * (th + 1.0)
        sig = s0 * np.sin(theta)
        g = np.real(self.profile.G_complex(1j * sig))
        vals = np.sqrt(16.0 * v * v - g * g) * np.cos(theta)
        return -0.5 * s0 * 0.25 * math.pi * float(np.dot(wt, vals))

    def psi_axis(self, v: float) -> float:
        """Psi(i v) on either side of the band edge."""
        return self.psi_v(v) if v < self.v_max else self.psi_v_ext(v)

    def _ensure_cheb(self, v_hi: float) -> Chebyshev:
        if self._cheb is not None and v_hi <= self._cheb_hi:
            return self._cheb
        hi = min(max(v_hi, 1.3 * self.v_max), 0.49999)
        lo = 0.01 * self.v_max
        f = np.vectorize(self.psi_axis)
        c = Chebyshev.interpolate(f, self.cheb_degree, domain=[lo, hi])
        # Zero coefficients at the rounding floor: keeping them would amplify
        # noise like T_n off the interval when evaluating at complex v.
        coef = c.coef.copy()
        floor = 1e-13 * np.max(np.abs(coef))
        coef[np.abs(coef) < floor] = 0.0
        self._cheb = Chebyshev(np.trim_zeros(coef, "b"), domain=c.domain)
        self._cheb_hi = hi
        return self._cheb

    def ensure_coverage(self, v_hi: float) -> None:
        if not self.use_closed:
            self._ensure_cheb(v_hi)

    def psi_lambda(self, lam):
        """Psi(lambda) for complex lambda near the band (analytic continuation)."""
        if self.use_closed:
            return self.profile.psi_closed(lam)
        c = self._ensure_cheb(self.v_max * 1.3)
        return c(np.asarray(lam, dtype=complex) / 1j)

    def psi_prime_lambda(self, lam):
        """Psi'(lambda) = -i * d/dv Psi(i v) at v = -i lambda."""
        if self.use_closed:
            return self.profile.psi_prime_closed(lam)
        c = self._ensure_cheb(self.v_max * 1.3)
        return c.deriv()(np.asarray(lam, dtype=complex) / 1j) / 1j

    # -- theta0 and the Cauchy-type functions -------------------------------

    def theta0(self, w):
        """theta0(w) = Psi(E(w))."""
        return self.psi_lambda(E_of(w))

    def theta0_prime(self, w):
        """theta0'(w) = Psi'(E(w)) E'(w)."""
        return self.psi_prime_lambda(E_of(w)) * E_prime(w)

    def _arc_quadrature(self):
        """Fixed panel rule on the arc angle psi in (0, mu], refined toward 1."""
        if self._arc_rule is None:
            edges = np.array([0.0, 1e-5, 1e-4, 1e-3, 1e-2, 0.05, 0.15, 0.4, 0.7, 1.0]) * self.mu
            nodes, weights = gauss_panels(edges, 24)
            theta0_vals = np.array([self.psi_axis(0.5 * math.sin(0.5 * p)) for p in nodes])
            self._arc_rule = (nodes, weights, theta0_vals)
        return self._arc_rule

    def L_of(self, w):
        """L(w) = (sqrt(-w)/pi) * int_{P_inf} theta0(y) dy / (sqrt(-y)(y - w)).

        Both arcs oriented toward w = 1; satisfies L(w*) = L(w)^*,
        L_+(w) + L_-(w) = 0 for w > 0, and L -> 0 as w -> -inf.
        """
        psi_n, wt, th0 = self._arc_quadrature()
        w = np.asarray(w, dtype=complex)
        up = np.exp(0.5j * psi_n) / (np.exp(1j * psi_n) - w[..., None])
        lo = np.exp(-0.5j * psi_n) / (np.exp(-1j * psi_n) - w[..., None])
        integral = np.sum(wt * th0 * (up + lo), axis=-1)
        out = sqrt_neg(w) / math.pi * integral
        return complex(out) if out.ndim == 0 else out

    def _arc_rule_near_one(self, d1: float):
        """Arc rule with leading panels scaled to the distance d1 from w = 1."""
        lead = min(0.3 * max(d1, 1e-12), 1e-2)
        edges = np.concatenate([[0.0], np.geomspace(lead, 0.4, 14), [0.7, 1.0]]) * self.mu
        nodes, wt = gauss_panels(edges, 24)
        th0 = np.array([self.psi_axis(0.5 * math.sin(0.5 * ps)) for ps in nodes])
        return nodes, wt, th0

    def L_prime(self, w):
        """dL/dw by differentiating the Cauchy representation.

        Within 0.05 of the arc terminus w = 1 the rule is refit per point so
        the nearly singular kernel stays resolved (L' is log-singular there).
        """
        w = np.atleast_1d(np.asarray(w, dtype=complex))
        out = np.empty_like(w)
        for i, wi in enumerate(w.ravel()):
            d1 = abs(wi - 1.0)
            if d1 < 0.05:
                psi_n, wt, th0 = self._arc_rule_near_one(d1)
            else:
                psi_n, wt, th0 = self._arc_quadrature()
            up = np.exp(0.5j * psi_n) / (np.exp(1j * psi_n) - wi)
            lo = np.exp(-0.5j * psi_n) / (np.exp(-1j * psi_n) - wi)
            up2 = np.exp(0.5j * psi_n) / (np.exp(1j * psi_n) - wi) ** 2
            lo2 = np.exp(-0.5j * psi_n) / (np.exp(-1j * psi_n) - wi) ** 2
            C = np.sum(wt * th0 * (up + lo)) / math.pi
            Cp = np.sum(wt * th0 * (up2 + lo2)) / math.pi
            out.ravel()[i] = -C / (2.0 * sqrt_neg(wi)) + sqrt_neg(wi) * Cp
        return out

    def D_prime(self, w):
        """dD/dw = -(i/8) (1 - 1/w) / sqrt(-w)."""
        w = np.asarray(w, dtype=complex)
        return -0.125j * (1.0 - 1.0 / w) / sqrt_neg(w)

    def k_of(self, w, x: float, t: float):
        """k(w) = 2i Q(w; x, t) + L(w) - i theta0(w)."""
        return 2j * Q_of(w, x, t) + self.L_of(w) - 1j * self.theta0(w)

    def k_prime(self, w, x: float, t: float):
        """k'(w) = 2i Q'(w) + L'(w) - i theta0'(w)."""
        Qp = E_prime(w) * x + self.D_prime(w) * t
        return 2j * Qp + self.L_prime(w) - 1j * self.theta0_prime(w)
