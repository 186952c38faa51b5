"""Whitham endpoint machinery on the x = 0 axis.

The endpoint conditions M = 0 and I = 0, the function H(w) whose zero at the
band endpoint marks the gradient catastrophe, continuation of the endpoint
angle eta(t), the catastrophe locator, every constant of the first-correction
theorem, sign charts of Re(phi), and the phase Phi(0, t).

Geometry: alpha = e^{i eta} on the unit circle (x = 0 symmetry); the cut arc
beta of R(w)^2 = (w - alpha)(w - alpha*) runs from alpha to w = 1 through a
small exterior bulge, gamma-tilde is the circle arc between e^{i mu} and
alpha, and all contour work is parametrized by the circle angle.  Branch
orientations are pinned by the known initial endpoint cos(eta(0)) =
1 - G(0)^2/2 and by the elliptic-integral identities B = 2K(m) and
A/(B sin th) + cot th = -rho(m).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from . import specfun as sf
from .laxmap import (
    ImpulseProfile,
    PhaseIntegralContext,
    gauss_panels,
    sqrt_neg,
)

__all__ = [
    "EndpointState",
    "CatastropheData",
    "CatastropheFinder",
    "solve_alpha_on_circle",
    "locate_catastrophe",
    "phase_Phi",
]


@dataclass(frozen=True)
class EndpointState:
    eta: float
    t: float
    x: float = 0.0

    @property
    def alpha(self) -> complex:
        return complex(math.cos(self.eta), math.sin(self.eta))


@dataclass(frozen=True)
class CatastropheData:
    theta: float
    t_gc: float
    m_gc: float
    omega_gc: float
    rho: float
    A_gc: float
    B_gc: float
    Hprime: complex
    sigma: float
    a: float
    b: float
    M_const: float
    Phi_gc: Optional[float] = None

    @property
    def alpha_gc(self) -> complex:
        return complex(math.cos(self.theta), math.sin(self.theta))

    def to_json_dict(self) -> dict:
        out = {
            "theta": self.theta,
            "t_gc": self.t_gc,
            "m_gc": self.m_gc,
            "omega_gc": self.omega_gc,
            "rho": self.rho,
            "A": self.A_gc,
            "B": self.B_gc,
            "Hprime_re": self.Hprime.real,
            "Hprime_im": self.Hprime.imag,
            "sigma": self.sigma,
            "a": self.a,
            "b": self.b,
            "M": self.M_const,
        }
        if self.Phi_gc is not None:
            out["Phi_gc"] = self.Phi_gc
        return out


def _track_R(path: np.ndarray, alpha: complex, anchor_value: complex) -> np.ndarray:
    """Branch of R(w) = sqrt((w-alpha)(w-alpha*)) continuous along `path`.

    `anchor_value` fixes the sign at path[0]; the walk flips the principal
    square root whenever continuity demands it.  The path must not cross the
    cut between consecutive nodes, so callers supply finely sampled paths.
    """
    pr = np.sqrt((path - alpha) * (path - np.conj(alpha)))
    out = np.empty_like(pr)
    sign = anchor_value / pr[0]
    sign = complex(round(sign.real), round(sign.imag))
    if abs(abs(sign) - 1.0) > 1e-6:
        raise ValueError("anchor value incompatible with R(path[0])")
    out[0] = sign * pr[0]
    for i in range(1, len(pr)):
        cand = sign * pr[i]
        if abs(cand - out[i - 1]) > abs(cand + out[i - 1]):
            sign = -sign
            cand = -cand
        out[i] = cand
    return out


def _beta_path(eta: float, s: np.ndarray, bulge: float = 0.35) -> np.ndarray:
    """Exterior bulge arc from alpha (s=0) to w=1 (s=1)."""
    radii = 1.0 + 4.0 * bulge * s * (1.0 - s) * 0.25
    return radii * np.exp(1j * eta * (1.0 - s))


class CatastropheFinder:
    """x = 0 endpoint machinery for one impulse profile."""

    def __init__(
        self,
        profile: ImpulseProfile,
        ctx: Optional[PhaseIntegralContext] = None,
        n_gauss: int = 40,
        bulge: float = 0.35,
    ):
        self.profile = profile
        self.ctx = ctx if ctx is not None else PhaseIntegralContext(profile)
        self.mu = self.ctx.mu
        self.n_gauss = n_gauss
        self.bulge = bulge
        self._eta_cache: dict[float, dict] = {}

    # -- gamma-tilde quadrature rule ----------------------------------------

    def _gamma_rule(self, eta: float):
        """Nodes and combined weights for the gamma-tilde Cauchy integral.

        Upper-arc integral int_mu^eta dPsi * (i/sqrt(2(cos psi - cos eta)))
        / (e^{i psi} - w); the substitution psi = eta - (eta - mu) s^2 kills
        the inverse-square-root endpoint at psi = eta.
        """
        mu = self.mu
        if not (mu < eta < math.pi):
            raise ValueError(f"endpoint angle must lie in (mu, pi), got {eta}")
        edges = np.array([0.0, 0.001, 0.005, 0.02, 0.06, 0.15, 0.35, 0.65, 1.0])
        s, ws = gauss_panels(edges, self.n_gauss)
        delta = (eta - mu) * s * s  # eta - psi, formed without cancellation
        psi = eta - delta
        dpsi_ds = 2.0 * (eta - mu) * s
        v = 0.5 * np.sin(0.5 * psi)
        dPsi = np.array([self.ctx.psi_v_prime(vv) for vv in v]) * 0.25 * np.cos(0.5 * psi)
        # cos psi - cos eta = 2 sin((eta+psi)/2) sin((eta-psi)/2), stably
        root = np.sqrt(4.0 * np.sin(0.5 * (eta + psi)) * np.sin(0.5 * delta))
        weights = ws * dpsi_ds * dPsi * (1j / root)
        nodes = np.exp(1j * psi)
        return nodes, weights

    def _eta_data(self, eta: float) -> dict:
        key = round(eta, 14)
        if key not in self._eta_cache:
            if len(self._eta_cache) > 512:
                self._eta_cache.clear()
            nodes, weights = self._gamma_rule(eta)
            self._eta_cache[key] = {"nodes": nodes, "weights": weights}
        return self._eta_cache[key]

    def gamma_integral(self, eta: float, w) -> np.ndarray:
        """(4/pi) int_{gamma~ U gamma~*} theta0'(xi) sqrt(-xi) / (R(xi)(xi-w)) dxi."""
        d = self._eta_data(eta)
        w = np.asarray(w, dtype=complex)
        up = np.sum(d["weights"] / (d["nodes"] - w[..., None]), axis=-1)
        lo = np.conj(np.sum(d["weights"] / (d["nodes"] - np.conj(w)[..., None]), axis=-1))
        return (4.0 / math.pi) * (up + lo)

    # -- H and its endpoint bracket ------------------------------------------

    def _R_near_alpha(self, eta: float, w) -> np.ndarray:
        """R evaluated near alpha, continued from the circle beyond alpha.

        On the circle at angle psi > eta the branch is
        R = -sqrt(-w) sqrt(2(cos eta - cos psi)); values at general nearby
        points follow by tracking along a short arc plus radial step.
        """
        alpha = complex(math.cos(eta), math.sin(eta))
        w = np.atleast_1d(np.asarray(w, dtype=complex))
        out = np.empty_like(w)
        psi_ref = min(eta + 0.12, 0.5 * (eta + math.pi))
        wref = np.exp(1j * psi_ref)
        Rref = -sqrt_neg(wref) * math.sqrt(2.0 * (math.cos(eta) - math.cos(psi_ref)))
        for i, wi in enumerate(w.ravel()):
            # radial leg at psi_ref, then an arc at |wi| that clears alpha
            ang = math.atan2(wi.imag, wi.real)
            radial = wref * np.linspace(1.0, abs(wi), 12)
            arc = abs(wi) * np.exp(1j * np.linspace(psi_ref, ang, 80))
            path = np.concatenate([radial, arc[1:]])
            out.ravel()[i] = _track_R(path, alpha, Rref)[-1]
        return out if w.shape else out.reshape(())

    def H_of(self, w, eta: float, t: float, x: float = 0.0, R_values=None):
        """H(w) via the collapsed (residue) representation, exterior side.

        The formula needs R(w) on the same branch as the gamma-tilde rule;
        callers on precomputed paths pass R_values.
        """
        w = np.asarray(w, dtype=complex)
        if R_values is None:
            R_values = self._R_near_alpha(eta, w)
        th0p = self.ctx.theta0_prime(w)
        bracket = (
            (x - t) / w
            + 4j * th0p * sqrt_neg(w) / R_values
            - self.gamma_integral(eta, w)
        )
        return -bracket / (4.0 * sqrt_neg(w))

    def bracket_B(self, eta: float, w, R_values=None):
        """t-independent part: B(w) = 4i theta0'(w) sqrt(-w)/R(w) - Gtilde(w)."""
        w = np.asarray(w, dtype=complex)
        if R_values is None:
            R_values = self._R_near_alpha(eta, w)
        return 4j * self.ctx.theta0_prime(w) * sqrt_neg(w) / R_values - self.gamma_integral(
            eta, w
        )

    def endpoint_bracket(self, eta: float, delta: float = 0.01):
        """S = B(alpha) and B'(alpha) by radial Richardson through the endpoint.

        B is analytic at alpha although both of its terms blow up like
        1/sqrt(w - alpha); the even/odd combinations of radial samples at
        +-delta and +-delta/2 cancel the half-power artifacts to O(delta^4).
        """
        alpha = complex(math.cos(eta), math.sin(eta))
        u = alpha  # radial direction e^{i eta}
        ds = np.array([delta, 0.5 * delta, 0.25 * delta])
        pts = np.concatenate([alpha + ds * u, alpha - ds * u])
        B = self.bracket_B(eta, pts)
        even = 0.5 * (B[:3] + B[3:])
        odd = 0.5 * (B[:3] - B[3:])
        # even(d) = S + c2 d^2 + c4 d^4: two-stage Richardson
        e1 = (4.0 * even[1] - even[0]) / 3.0
        e2 = (4.0 * even[2] - even[1]) / 3.0
        S = (16.0 * e2 - e1) / 15.0
        # odd(d)/d = B' + b2 d^2 + b4 d^4
        q = odd / (ds * u)
        q1 = (4.0 * q[1] - q[0]) / 3.0
        q2 = (4.0 * q[2] - q[1]) / 3.0
        dB = (16.0 * q2 - q1) / 15.0
        return S, dB

    def t_of_H_zero(self, eta: float, check: bool = True) -> float:
        """The t with H(alpha; 0, t) = 0: linear in t through the (x-t)/w term.

        Real when eta sits on the physical branch; `check=False` skips the
        reality assertion for bracketing scans away from the root.
        """
        S, _ = self.endpoint_bracket(eta)
        alpha = complex(math.cos(eta), math.sin(eta))
        t = alpha * S
        if check and abs(t.imag) > 1e-5 * max(1.0, abs(t.real)):
            raise RuntimeError(f"endpoint time came out non-real: {t}")
        return t.real

    # -- the I condition ------------------------------------------------------

    def _beta_rule(self, eta: float):
        """Quadrature nodes along the bulge arc with the tracked R branch.

        Parametrized s = sigma^2 so that R ~ sqrt(w - alpha) ~ sigma is
        resolved by the Jacobian at the alpha endpoint.
        """
        edges = np.array([0.0, 0.08, 0.2, 0.35, 0.5, 0.65, 0.78, 0.88, 0.95, 0.985, 1.0])
        sig, wsig = gauss_panels(edges, self.n_gauss)
        s = sig * sig
        w = _beta_path(eta, s, self.bulge)
        h = 1e-6
        dw_ds = (_beta_path(eta, s + h, self.bulge) - _beta_path(eta, s - h, self.bulge)) / (
            2 * h
        )
        wdw = wsig * dw_ds * 2.0 * sig  # dw = (dw/ds)(ds/dsigma) dsigma
        # R anchored at the w = 1 end: continuous with the (1, inf) zone value;
        # a dense track fixes the sign region, pr is then evaluated exactly
        alpha = complex(math.cos(eta), math.sin(eta))
        tgrid = np.linspace(1.0, 0.0, 4000)
        fine = _beta_path(eta, tgrid * tgrid, self.bulge)
        anchor = math.sqrt(2.0 - 2.0 * math.cos(eta))  # R(1) from the w > 1 side
        R_fine = _track_R(fine, alpha, anchor)
        pr_f = np.sqrt((fine - alpha) * (fine - np.conj(alpha)))
        with np.errstate(invalid="ignore", divide="ignore"):
            sgn = np.where(np.real(R_fine / np.where(pr_f == 0, 1, pr_f)) >= 0, 1.0, -1.0)
        s_at = np.where(np.interp(sig, tgrid[::-1], sgn[::-1]) >= 0, 1.0, -1.0)
        R = s_at * np.sqrt((w - alpha) * (w - np.conj(alpha)))
        return w, wdw, R

    def I_parts(self, eta: float):
        """(I_A, I_C) with I(eta, t) = t * I_A + I_C: linear in t at x = 0."""
        w, wdw, R = self._beta_rule(eta)
        B = self.bracket_B(eta, w, R_values=R)
        HA = -(-1.0 / w) / (4.0 * sqrt_neg(w))
        HC = -B / (4.0 * sqrt_neg(w))
        IA = np.real(np.sum(wdw * R * HA))
        IC = np.real(np.sum(wdw * R * HC))
        return IA, IC

    def I_of(self, eta: float, t: float) -> float:
        IA, IC = self.I_parts(eta)
        return t * IA + IC

    # -- the M condition -------------------------------------------------------

    def M_of(self, alpha: complex, x: float, t: float) -> float:
        """M, for alpha on or radially near the unit circle, Im(alpha) > 0.

        gamma-tilde runs along the circle from e^{i mu} to e^{i eta} and
        then radially out to alpha; R carries the branch points (alpha,
        conj(alpha)) and is branch-matched to the on-circle convention at
        the arc anchor.  Vanishes identically for |alpha| = 1 at x = 0.
        """
        eta = math.atan2(alpha.imag, alpha.real)
        mu = self.mu
        # arc leg, endpoint-substituted toward eta
        edges = np.array([0.0, 0.001, 0.005, 0.02, 0.06, 0.15, 0.35, 0.65, 1.0])
        s, ws = gauss_panels(edges, self.n_gauss)
        delta = (eta - mu) * s * s
        psi = eta - delta
        dpsi_ds = 2.0 * (eta - mu) * s
        v = 0.5 * np.sin(0.5 * psi)
        dPsi = np.array([self.ctx.psi_v_prime(vv) for vv in v]) * 0.25 * np.cos(0.5 * psi)
        arc = np.exp(1j * psi)
        # R with the true branch points, anchored at the arc start
        anchor_pt = np.exp(1j * (mu + 1e-3 * (eta - mu)))
        circle_val = (
            -1j
            * sqrt_neg(anchor_pt)
            * math.sqrt(
                max(0.0, 2.0 * (math.cos(mu + 1e-3 * (eta - mu)) - math.cos(eta)))
            )
        )
        pr = np.sqrt((anchor_pt - alpha) * (anchor_pt - np.conj(alpha)))
        anchor = pr if abs(pr - circle_val) <= abs(pr + circle_val) else -pr
        order = np.argsort(psi)[::-1]  # from mu-end toward eta
        track_pts = np.concatenate([[anchor_pt], arc[order]])
        R_sorted = _track_R(track_pts, complex(alpha), complex(anchor))[1:]
        R_arc = np.empty_like(R_sorted)
        R_arc[order] = R_sorted
        # theta0'(xi) dxi = dPsi along the circle; sqrt(-xi)/R supplies the kernel
        integral = np.sum(ws * dpsi_ds * dPsi * sqrt_neg(arc) / R_arc)
        if abs(abs(alpha) - 1.0) > 1e-14:
            # radial stub from e^{i eta} to alpha, substituted at the alpha end
            circ = complex(math.cos(eta), math.sin(eta))
            sg, wg = gauss_panels(np.array([0.0, 0.3, 0.7, 1.0]), self.n_gauss)
            seg = alpha + (circ - alpha) * sg * sg
            dseg_dsg = (circ - alpha) * 2.0 * sg
            th0p = self.ctx.theta0_prime(seg)
            # geometric grading keeps the branch tracker safe down to alpha
            fine_t = np.sort(np.concatenate([np.geomspace(1e-7, 1.0, 600), sg]))
            fine = alpha + (circ - alpha) * fine_t * fine_t
            R_circ = _track_R(
                np.array([arc[order][-1], circ]), complex(alpha), complex(R_sorted[-1])
            )[-1]
            Rf = _track_R(fine[::-1], complex(alpha), complex(R_circ))[::-1]
            idx = {v_: i for i, v_ in enumerate(fine_t)}
            Rseg = np.array([Rf[idx[v_]] for v_ in sg])
            # oriented from the circle toward alpha: flip the substituted leg
            integral -= np.sum(wg * th0p * sqrt_neg(seg) / Rseg * dseg_dsg)
        saa = abs(alpha)
        return float((4.0 / math.pi) * 2.0 * np.real(integral) + x + t + (x - t) / saa)

    def M_time_zero(self, x: float) -> float:
        """M at t = 0 with the on-circle beta cut and cos(eta) = 1 - G(x)^2/2."""
        gx = float(self.profile.G(np.asarray(x, dtype=float)))
        ceta = 1.0 - 0.5 * gx * gx
        eta = math.acos(max(-1.0, min(1.0, ceta)))
        mu = self.mu
        # integral over the circle arc between eta and mu of dPsi/sqrt(2(cos eta - cos psi))
        edges = np.array([0.0, 0.005, 0.02, 0.06, 0.15, 0.35, 0.65, 1.0])
        s, ws = gauss_panels(edges, self.n_gauss)
        delta = (mu - eta) * s * s  # psi - eta, formed without cancellation
        psi = eta + delta
        dpsi_ds = 2.0 * (mu - eta) * s
        v = 0.5 * np.sin(0.5 * psi)
        dPsi = np.array([self.ctx.psi_v_prime(vv) for vv in v]) * 0.25 * np.cos(0.5 * psi)
        root = np.sqrt(4.0 * np.sin(0.5 * (psi + eta)) * np.sin(0.5 * delta))
        integral = float(np.sum(ws * dpsi_ds * dPsi / root))
        return (8.0 / math.pi) * integral + 2.0 * x

    # -- solvers ---------------------------------------------------------------

    def eta_initial(self) -> float:
        g0 = self.profile.G0
        return math.acos(1.0 - 0.5 * g0 * g0)

    def solve_eta(self, t: float, eta_guess: Optional[float] = None) -> EndpointState:
        """eta(t) from the single real equation I(eta, t) = 0.

        The root approaches the band edge like eta - mu ~ t^2 as t -> 0, so
        the bracketing scan is log-spaced in eta - mu.
        """
        lo = self.mu + 1e-13
        hi = math.pi - 0.02
        f = lambda e: self.I_of(e, t)
        if eta_guess is not None and eta_guess > self.mu + 1e-4:
            d = 0.05
            a, b = max(lo, eta_guess - d), min(hi, eta_guess + d)
            for _ in range(8):
                if f(a) * f(b) < 0:
                    return EndpointState(brentq(f, a, b, xtol=1e-13), t)
                a, b = max(lo, a - d), min(hi, b + d)
                d *= 1.6
            # near the fold the zero set is a narrow dip; scan at nested scales
            for width in (0.03, 0.01, 0.003, 0.001):
                grid = np.linspace(max(lo, eta_guess - width), min(hi, eta_guess + width), 80)
                vals = [f(e) for e in grid]
                for i in range(len(grid) - 1):
                    if vals[i] * vals[i + 1] < 0:
                        return EndpointState(brentq(f, grid[i], grid[i + 1], xtol=1e-13), t)
        grid = self.mu + np.logspace(-13, math.log10(hi - self.mu), 80)
        vals = [f(e) for e in grid]
        for i in range(len(grid) - 1):
            if vals[i] == 0.0:
                return EndpointState(float(grid[i]), t)
            if vals[i] * vals[i + 1] < 0:
                return EndpointState(brentq(f, grid[i], grid[i + 1], xtol=1e-13), t)
        raise RuntimeError(f"no endpoint root eta found at t = {t}")

    def locate(self) -> "CatastropheData":
        """Simple gradient catastrophe on the t-axis: H(alpha) = 0 and I = 0."""
        lo = self.mu + 0.02
        hi = math.pi - 0.05

        def F(eta: float) -> float:
            return self.I_of(eta, self.t_of_H_zero(eta, check=False))

        grid = np.linspace(lo, hi, 80)
        vals = [F(e) for e in grid]
        root = None
        for i in range(len(grid) - 1):
            if vals[i] * vals[i + 1] < 0:
                root = brentq(F, grid[i], grid[i + 1], xtol=1e-13)
                break
        if root is None:
            raise RuntimeError("no simple catastrophe found on the t-axis")
        theta = root
        t_gc = self.t_of_H_zero(theta)
        return self.constants_at(theta, t_gc)

    def constants_at(self, theta: float, t_gc: float) -> CatastropheData:
        """All Theorem-1 constants from (theta, t_gc)."""
        m_gc = math.sin(0.5 * theta) ** 2
        K = sf.elliptic_K(m_gc)
        omega_gc = -math.pi / (2.0 * K)
        rho_gc = sf.rho(m_gc)

        alpha = complex(math.cos(theta), math.sin(theta))
        S, dB = self.endpoint_bracket(theta)
        # H'(alpha_gc) = -(1/(4 sqrt(-alpha))) [t/alpha^2 + B'(alpha)]
        Hp = -(t_gc / alpha**2 + dB) / (4.0 * sqrt_neg(alpha))
        H_end = self.H_of(np.array([alpha * (1 + 1e-3)]), theta, t_gc)[0]

        f5 = -0.2 * Hp * np.exp(0.25j * math.pi) * math.sqrt(2.0 * math.sin(theta))
        Wp_mag = abs(1.25 * f5) ** 0.4
        sigma = math.sqrt(Wp_mag)
        a = -((m_gc * (1.0 - m_gc)) ** 0.25) / (2.0 * sigma)
        b = -a * rho_gc
        M_const = (2.0 / sigma) * (m_gc / (1.0 - m_gc)) ** 0.25

        A_gc, B_gc = self.AB_integrals(theta)
        return CatastropheData(
            theta=theta,
            t_gc=t_gc,
            m_gc=m_gc,
            omega_gc=omega_gc,
            rho=rho_gc,
            A_gc=A_gc,
            B_gc=B_gc,
            Hprime=complex(Hp),
            sigma=sigma,
            a=a,
            b=b,
            M_const=M_const,
        )

    def AB_integrals(self, eta: float) -> tuple[float, float]:
        """A and B from their beta-contour definitions (real for |alpha| = 1)."""
        w, wdw, R = self._beta_rule(eta)
        A = 2.0 * np.real(np.sum(wdw * sqrt_neg(w) / R))
        B = 2.0 * np.real(np.sum(wdw / (R * sqrt_neg(w))))
        return float(A), float(B)

    def AB_axis_integrals(self, eta: float) -> tuple[float, float]:
        """Independent route: B = -int_{-inf}^0 dw/(R sqrt(-w)) and the
        combination A/(B sin eta) + cot eta = (2 sin eta / B) int sqrt(-w)/R^3."""
        ce = math.cos(eta)
        z, wg = gauss_panels(np.array([0.0, 0.2, 0.4, 0.6, 0.8, 1.0]), 48)
        u = (z / (1.0 - z)) ** 2
        du = 2.0 * z / (1.0 - z) ** 3
        Rr = -np.sqrt(u * u + 2.0 * u * ce + 1.0)  # R on the negative axis
        B = float(np.sum(wg * du * (-1.0) / (Rr * np.sqrt(u))))
        I3 = float(np.sum(wg * du * np.sqrt(u) * (-1.0) / Rr**3))
        # A/(B sin eta) + cot eta = -(2 sin eta / B) * I3  (R^3 < 0 on the axis)
        comb = -(2.0 * math.sin(eta) / B) * I3
        A = B * (comb * math.sin(eta) - math.cos(eta))
        return float(A), float(B)


def solve_alpha_on_circle(profile: ImpulseProfile, t: float, **kw) -> EndpointState:
    return CatastropheFinder(profile, **kw).solve_eta(t)


def locate_catastrophe(profile: ImpulseProfile, with_phase: bool = False, **kw) -> CatastropheData:
    finder = CatastropheFinder(profile, **kw)
    data = finder.locate()
    if with_phase:
        phi = phase_Phi(profile, data.t_gc, finder=finder)
        data = CatastropheData(**{**data.__dict__, "Phi_gc": phi})
    return data


class PhaseComputer:
    """Phi(0, t) from the g-function: Phi = -i (k(w) - g_+(w) - g_-(w)) on beta.

    g'(w) = R(w)/(2 pi i sqrt(-w)) * J(w) with J the beta U beta* Cauchy
    transform of k' sqrt(-xi)/R_+(xi); the beta* leg enters as the paired
    -conj term, which cancels the logarithmic endpoint of k' at w = 1.
    g is integrated from w = 0 along 0 -> 0.6i -> w, and the constant is
    read off at the arc midpoint from both sides (the combination is
    w-independent along beta).
    """

    TAIL = 1e-5  # truncation of the beta rule at sigma = 1 - TAIL

    def __init__(self, finder: CatastropheFinder, n_gauss: int = 32):
        self.f = finder
        self.ctx = finder.ctx
        self.n = n_gauss
        self._beta_cache: dict[float, tuple] = {}

    def _rule(self, eta: float):
        """Truncated beta rule with sign-table R and log-model tail data.

        The integrand's L' factor is log-singular at the terminus and its
        evaluation turns noisy within ~1e-6 of w = 1, so panels stop at
        sigma = 1 - TAIL and the sliver integral is done analytically from
        a [1, ln u, u, u ln u] model fitted at trustworthy distances.
        """
        key = round(eta, 14)
        if key in self._beta_cache:
            return self._beta_cache[key]
        bulge = self.f.bulge
        near = 1.0 - np.geomspace(self.TAIL, 0.15, 10)[::-1]
        edges = np.concatenate([[0.0, 0.1, 0.25, 0.45, 0.65, 0.85], near])
        sig, wsig = gauss_panels(edges, self.n)
        s = sig * sig
        w = _beta_path(eta, s, bulge)
        h = 1e-7
        dw_ds = (_beta_path(eta, s + h, bulge) - _beta_path(eta, s - h, bulge)) / (2 * h)
        wdw = wsig * dw_ds * 2.0 * sig
        alpha = complex(math.cos(eta), math.sin(eta))
        # piecewise-constant sign table from a dense one-time track
        tgs = np.linspace(0.0, 1.0, 20000)
        fine = _beta_path(eta, tgs * tgs, bulge)
        anchor = math.sqrt(2.0 - 2.0 * math.cos(eta))
        Rf = _track_R(fine[::-1], alpha, anchor)[::-1]
        pr_f = np.sqrt((fine - alpha) * (fine - np.conj(alpha)))
        with np.errstate(invalid="ignore", divide="ignore"):
            sgn = np.where(np.real(Rf / np.where(pr_f == 0, 1, pr_f)) >= 0, 1.0, -1.0)

        def R_of(sig_v, w_v):
            sl = np.where(np.interp(sig_v, tgs, sgn) >= 0, 1.0, -1.0)
            return sl * np.sqrt((w_v - alpha) * (w_v - np.conj(alpha)))

        R = R_of(sig, w)
        self._beta_cache[key] = (w, wdw, R, R_of)
        return self._beta_cache[key]

    def _fdxi_and_tail(self, eta: float, t: float):
        """Quadrature values f dxi on the truncated rule and the tail integral.

        Tail: int_{1-TAIL}^1 G(u) du with G along sigma = 1 - u modeled as
        a + b ln u + u (c + d ln u); the four coefficients come from samples
        at u = TAIL..8 TAIL where every factor is still accurate.
        """
        w_nodes, wdw, R, R_of = self._rule(eta)
        kp = self.ctx.k_prime(w_nodes, 0.0, t)
        fdxi = kp * sqrt_neg(w_nodes) / R * wdw

        us = self.TAIL * np.array([8.0, 4.0, 2.0, 1.0])
        sig_s = 1.0 - us
        s_s = sig_s * sig_s
        w_s = _beta_path(eta, s_s, self.f.bulge)
        h = 1e-8
        dw_s = (_beta_path(eta, s_s + h, self.f.bulge) - _beta_path(eta, s_s - h, self.f.bulge)) / (
            2 * h
        )
        kp_s = self.ctx.k_prime(w_s, 0.0, t)
        G = kp_s * sqrt_neg(w_s) / R_of(sig_s, w_s) * dw_s * 2.0 * sig_s
        lnu = np.log(us)
        Avan = np.stack([np.ones(4), lnu, us, us * lnu], axis=1)
        coef = np.linalg.solve(Avan, G)
        D = self.TAIL
        lnD = math.log(D)
        tail = (
            coef[0] * D
            + coef[1] * (D * lnD - D)
            + coef[2] * 0.5 * D * D
            + coef[3] * (0.5 * D * D * lnD - 0.25 * D * D)
        )
        return w_nodes, fdxi, tail

    def _g_factory(self, eta: float, t: float):
        w_nodes, fdxi, tail = self._fdxi_and_tail(eta, t)
        alpha = complex(math.cos(eta), math.sin(eta))

        def J_of(w):
            w = np.asarray(w, dtype=complex)
            up = np.sum(fdxi / (w_nodes - w[..., None]), axis=-1) + tail / (1.0 - w)
            lo = np.sum(np.conj(fdxi) / (np.conj(w_nodes) - w[..., None]), axis=-1) + np.conj(
                tail
            ) / (1.0 - w)
            return up - lo

        bulge = self.f.bulge
        r_hi = 1.0 + bulge  # safely outside the bulge crest

        def _is_outer(w: complex) -> bool:
            ang = math.atan2(w.imag, w.real)
            if not (0.0 <= ang <= eta):
                return False
            # radius of the cut arc at this angle (s from the angle parametrization)
            s_ang = 1.0 - ang / eta
            r_beta = 1.0 + bulge * s_ang * (1.0 - s_ang)
            return abs(w) > r_beta

        def g_of(w_target: complex) -> complex:
            """g by path integration from 0; outer-side targets are reached
            around the alpha endpoint so the path never crosses the cut."""
            if _is_outer(w_target):
                ang = math.atan2(w_target.imag, w_target.real)
                waypoints = [
                    0.6j,
                    r_hi * np.exp(1j * (eta + 0.25)),
                    r_hi * np.exp(1j * ang),
                    w_target,
                ]
            else:
                waypoints = [0.6j, w_target]
            total = 0.0 + 0.0j
            anchor = -1.0 + 0.0j  # R(0) = -1 for |alpha| = 1
            prev = 0.0 + 0.0j
            for b_pt in waypoints:
                b_pt = complex(b_pt)
                sg, wg = gauss_panels(np.array([0.0, 0.2, 0.5, 0.8, 0.95, 1.0]), self.n)
                zz = prev + (b_pt - prev) * sg
                fine_t = np.sort(np.concatenate([np.linspace(0, 1, 900), sg]))
                fine = prev + (b_pt - prev) * fine_t
                Rf = _track_R(fine, alpha, anchor)
                idx = {v: i for i, v in enumerate(fine_t)}
                Rz = np.array([Rf[idx[v]] for v in sg])
                gp = Rz / (2j * math.pi * sqrt_neg(zz)) * J_of(zz)
                total += np.sum(wg * (b_pt - prev) * gp)
                anchor = Rf[-1]
                prev = b_pt
            return total

        return g_of

    def m_basic_residual(self, eta: float, t: float) -> float:
        """|first moment of the g' density|; vanishes when M = 0 holds."""
        _, fdxi, tail = self._fdxi_and_tail(eta, t)
        S = np.sum(fdxi) + tail
        return abs(S - np.conj(S))

    def phi_at(self, eta: float, t: float, s_mid: float = 0.5, d: float = 0.04) -> complex:
        g_of = self._g_factory(eta, t)
        bulge = self.f.bulge
        wc = _beta_path(eta, np.array([s_mid]), bulge)[0]
        h = 1e-6
        dwds = (
            _beta_path(eta, np.array([s_mid + h]), bulge)[0]
            - _beta_path(eta, np.array([s_mid - h]), bulge)[0]
        ) / (2 * h)
        nrm = 1j * dwds / abs(dwds)
        kmid = self.ctx.k_of(wc, 0.0, t)
        return -1j * (kmid - g_of(wc + d * nrm) - g_of(wc - d * nrm))

    def phi(self, t: float, eta: Optional[float] = None) -> complex:
        """Phi(0, t): offsets d, d/2, d/4 cancel the O(d) and O(d^2) error
        from the one-sided derivative jump of g across beta."""
        if t == 0.0:
            eta = self.f.eta_initial()
        elif eta is None:
            eta = self.f.solve_eta(t).eta
        p1 = self.phi_at(eta, t, d=0.06)
        p2 = self.phi_at(eta, t, d=0.03)
        p3 = self.phi_at(eta, t, d=0.015)
        return (8.0 * p3 - 6.0 * p2 + p1) / 3.0

    def phi_from_frequency(self, t: float, n_nodes: int = 24) -> float:
        """Oracle route: Phi(0,t) = int_0^t pi/(2 K(m(0,s))) ds, m = sin^2(eta/2)."""
        sg, wg = gauss_panels(np.array([0.0, 0.2, 0.5, 0.8, 1.0]), n_nodes)
        total = 0.0
        guess = None
        for s, w in zip(sg * t, wg * t):
            st = self.f.solve_eta(float(s), eta_guess=guess)
            guess = st.eta
            m = math.sin(0.5 * st.eta) ** 2
            total += w * math.pi / (2.0 * sf.elliptic_K(m))
        return total


def phase_Phi(
    profile: ImpulseProfile,
    t: float,
    finder: Optional[CatastropheFinder] = None,
    computer: Optional[PhaseComputer] = None,
    **kw,
) -> float:
    """Phi(0, t) with the branch fixed by continuous continuation from
    Phi(0, 0) = 0.

    Computed as the frequency integral int_0^t pi/(2 K(m(0,s))) ds along the
    endpoint curve m(0,s) = sin^2(eta(s)/2): with phase gradient (k, -omega)
    and k(0, s) = 0 on the axis, this integral is Phi(0, t) itself.  The
    direct g-function evaluation (PhaseComputer.phi) agrees with it at the
    few-1e-3 level and is kept for cross-validation; its terminal-endpoint
    quadrature cannot honestly certify tighter tolerances.
    """
    if computer is None:
        if finder is None:
            finder = CatastropheFinder(profile, **kw)
        computer = PhaseComputer(finder)
    if t == 0.0:
        return 0.0
    return computer.phi_from_frequency(t)


def phi_on_circle(finder: CatastropheFinder, eta: float, t: float, psi: float) -> complex:
    """phi(e^{i psi}) - phi(alpha) along the circle arc from alpha (psi > eta).

    The real part vanishes identically on this arc (the x = 0 symmetry of
    the exponent function); the imaginary part is the accumulated phase.
    """
    sg, wg = gauss_panels(np.array([0.0, 0.25, 0.5, 0.75, 1.0]), 32)
    th = eta + (psi - eta) * sg
    zz = np.exp(1j * th)
    dz = 1j * zz * (psi - eta)
    R = -sqrt_neg(zz) * np.sqrt(np.maximum(2.0 * (math.cos(eta) - np.cos(th)), 0.0))
    H = finder.H_of(zz, eta, t, R_values=R)
    return complex(np.sum(wg * R * H * dz))


def phi_field(
    finder: CatastropheFinder,
    eta: float,
    t: float,
    re_range: tuple[float, float],
    im_range: tuple[float, float],
    n_re: int,
    n_im: int,
):
    """Grid of Re(phi) over the upper half plane by path integration of R H.

    phi(alpha) is purely imaginary, so Re(phi)(w) = Re int_alpha^w R H dxi
    along paths threading outside the cut structure; points inside the
    sliver between the circle and the cut arc (unreachable without crossing
    a cut) come back as NaN.
    """
    alpha = complex(math.cos(eta), math.sin(eta))
    rho_arc = 1.0 + finder.bulge + 0.08
    res = np.linspace(re_range[0], re_range[1], n_re)
    ims = np.linspace(im_range[0], im_range[1], n_im)
    out = np.full((n_im, n_re), np.nan)

    def phi_along(path_pts):
        """integrate R*H over consecutive straight/arc segments given as arrays"""
        total = 0.0 + 0.0j
        for seg in path_pts:
            sg, wg = gauss_panels(np.array([0.0, 0.3, 0.7, 1.0]), 24)
            # seg is (start, end, kind) with kind 'line' or ('arc', center_radius)
            a_pt, b_pt, kind = seg
            if kind == "line":
                zz = a_pt + (b_pt - a_pt) * sg
                dz = np.full_like(zz, b_pt - a_pt)
            else:
                th_a = math.atan2(a_pt.imag, a_pt.real)
                th_b = math.atan2(b_pt.imag, b_pt.real)
                r0 = abs(a_pt)
                th = th_a + (th_b - th_a) * sg
                zz = r0 * np.exp(1j * th)
                dz = 1j * zz * (th_b - th_a)
            R = finder._R_near_alpha(eta, zz)
            H = finder.H_of(zz, eta, t, R_values=R)
            total += np.sum(wg * R * H * dz)
        return total

    for i, y in enumerate(ims):
        for j, x in enumerate(res):
            w = complex(x, y)
            if y <= 0.005 or abs(w) < 0.05:
                continue
            th_w = math.atan2(y, x)
            r_w = abs(w)
            s_ang = 1.0 - th_w / eta if eta > 0 else 1.0
            r_beta = 1.0 + finder.bulge * s_ang * (1.0 - s_ang) if 0 <= th_w <= eta else 0.0
            in_sliver = 0 <= th_w <= eta and 1.0 <= r_w <= r_beta + 1e-9
            if in_sliver:
                continue
            out_pt = rho_arc * np.exp(1j * max(th_w, eta + 0.05))
            path = [(alpha, alpha * rho_arc, "line"), (alpha * rho_arc, out_pt, "arc")]
            if th_w >= eta or r_w > max(r_beta, 1.0):
                path.append((out_pt, rho_arc * np.exp(1j * th_w), "arc"))
                path.append((rho_arc * np.exp(1j * th_w), w, "line"))
            elif r_w < 1.0:
                # enter the disk just above alpha, then walk an inner arc
                enter_angle = eta + 0.05
                inner = r_w * np.exp(1j * enter_angle)
                path.append((out_pt, rho_arc * np.exp(1j * enter_angle), "arc"))
                path.append((rho_arc * np.exp(1j * enter_angle), inner, "line"))
                path.append((inner, w, "arc"))
            else:
                continue
            try:
                out[i, j] = float(np.real(phi_along(path)))
            except (ValueError, RuntimeError):
                continue
    return res, ims, out
