"""Assembly and comparison of the two universal limits.

Theorem-1 side: leading elliptic background frozen at the catastrophe plus
the eps^(1/5) correction proportional to Re h(tau) with the linear map
tau = (i a x + b (t - t_gc)) / eps^(4/5).  Theorem-2 side: the closed-form
defect U(X, T; m_gc, Omega) near the image of each tritronquee pole.  Both
are compared against the exact condensate across N.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import condensate as cd
from . import defect as df
from . import painleve1 as p1
from . import specfun as sf
from .gfunction import CatastropheData
from .laxmap import ImpulseProfile, epsilon_N

__all__ = [
    "ComparisonReport",
    "theorem1_approx",
    "pole_to_xt",
    "theorem2_predict",
    "compare",
]


@dataclass
class ComparisonReport:
    mode: str
    N: list
    epsilon: list
    sup_error: list
    fitted_phase: list
    exponent: Optional[float] = None
    exponent_residual: Optional[float] = None
    excluded_points: int = 0
    extras: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "mode": self.mode,
            "N": list(self.N),
            "epsilon": [float(e) for e in self.epsilon],
            "sup_error": [float(s) for s in self.sup_error],
            "fitted_phase": [None if p is None else float(p) for p in self.fitted_phase],
            "exponent": self.exponent,
            "exponent_residual": self.exponent_residual,
            "excluded_points": self.excluded_points,
            **self.extras,
        }

    def write(self, path: str) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def _background(data: CatastropheData, t, eps: float, Phi: float):
    """Frozen-modulus leading terms and the cn factor at linearized phase."""
    K = sf.elliptic_K(data.m_gc)
    phi_l = Phi - (np.asarray(t) - data.t_gc) * data.omega_gc
    arg = 2.0 * phi_l * K / (math.pi * eps)
    sn, cn, dn = sf.jacobi(arg, data.m_gc)
    Cdot = dn
    Sdot = -math.sqrt(data.m_gc) * sn
    return Cdot, Sdot, cn


def theorem1_approx(x, t, data: CatastropheData, eps: float, Phi: float, h_values):
    """First-correction formula; h_values = h(tau) at tau = (iax + b dt)/eps^{4/5}.

    cos(u/2) ~ C - M eps^{1/5} Re{h} cn * S,  sin(u/2) ~ S + M eps^{1/5} Re{h} cn * C.
    """
    Cdot, Sdot, cn = _background(data, t, eps, Phi)
    corr = data.M_const * eps**0.2 * np.real(h_values) * cn
    return Cdot - corr * Sdot, Sdot + corr * Cdot


def tau_of_xt(x, t, data: CatastropheData, eps: float):
    return (1j * data.a * np.asarray(x) + data.b * (np.asarray(t) - data.t_gc)) / eps**0.8


def pole_to_xt(tau_p: complex, data: CatastropheData, eps: float):
    """(x_p, t_p) with i a x_p + b (t_p - t_gc) = eps^{4/5} tau_p."""
    x_p = eps**0.8 * tau_p.imag / data.a
    t_p = data.t_gc + eps**0.8 * tau_p.real / data.b
    return x_p, t_p


def omega_pN(tau_p: complex, data: CatastropheData, eps: float) -> float:
    """Omega_{p,N} = (Phi_gc - (t_p - t_gc) omega_gc)/eps, reduced mod 2 pi."""
    if data.Phi_gc is None:
        raise ValueError("computed Omega needs Phi_gc in the catastrophe data")
    _, t_p = pole_to_xt(tau_p, data, eps)
    return ((data.Phi_gc - (t_p - data.t_gc) * data.omega_gc) / eps) % (2.0 * math.pi)


def theorem2_predict(X, T, tau_p: complex, data: CatastropheData, eps: float, Omega):
    """Defect prediction near the pole image; Omega a number (radians)."""
    params = df.DefectParams(m=data.m_gc, Omega=float(Omega))
    X = np.atleast_1d(np.asarray(X, dtype=float))
    T = np.atleast_1d(np.asarray(T, dtype=float))
    ch = np.empty(X.shape)
    sh = np.empty(X.shape)
    for i in range(X.size):
        s = df.cos_sin_U(float(X.ravel()[i]), float(T.ravel()[i]), params)
        ch.ravel()[i] = s.cos_half
        sh.ravel()[i] = s.sin_half
    return ch, sh


def _golden_min(f, lo: float, hi: float, tol: float = 1e-6, coarse: int = 48):
    """Coarse scan then golden-section refinement on the best bracket."""
    xs = np.linspace(lo, hi, coarse)
    vals = [f(x) for x in xs]
    i = int(np.argmin(vals))
    a = xs[max(0, i - 1)]
    b = xs[min(coarse - 1, i + 1)]
    gr = (math.sqrt(5.0) - 1.0) / 2.0
    c, d = b - gr * (b - a), a + gr * (b - a)
    fc, fd = f(c), f(d)
    while abs(b - a) > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - gr * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + gr * (b - a)
            fd = f(d)
    return 0.5 * (a + b), min(fc, fd)


def _thm1_points(data: CatastropheData, poles, tau_radius: float, n_side: int, excl: float):
    """tau samples in the disk with pole-exclusion disks removed."""
    g = np.linspace(-tau_radius, tau_radius, n_side)
    TR, TI = np.meshgrid(g, g)
    tau = (TR + 1j * TI).ravel()
    keep = np.abs(tau) <= tau_radius
    for p in poles:
        keep &= np.abs(tau - p.tau_p) >= excl
    return tau[keep]


def compare(
    mode: str,
    profile: ImpulseProfile,
    N_list: Sequence[int],
    window: float = 8.0,
    data: Optional[CatastropheData] = None,
    poles: Optional[list] = None,
    tau_radius: float = 3.0,
    n_side: int = 21,
    pole_exclusion: float = 0.3,
    phase: str = "computed",
    n_grid_thm2: int = 41,
) -> ComparisonReport:
    """Desk-scale check of the two limit theorems against the condensate.

    mode "thm1": sup error of the first-correction formula over the
    pole-excluded tau disk, per N, with a log-log exponent estimate.
    mode "thm2": sup difference against the defect prediction near the
    closest real pole, per N, with the phase fitted or computed.
    """
    from .gfunction import locate_catastrophe

    if mode not in ("thm1", "thm2"):
        raise ValueError(f"unknown comparison mode {mode!r}")
    if data is None:
        data = locate_catastrophe(profile, with_phase=(phase == "computed"))
    if poles is None:
        poles = p1.pole_field(radius=max(tau_radius + 1.0, 4.0))
    evaluator = p1.TritronqueeEvaluator(poles=poles)

    eps_list = [epsilon_N(profile, N) for N in N_list]
    sup_err, phases = [], []
    excluded = 0
    extras = {}

    if mode == "thm1":
        tau = _thm1_points(data, poles, tau_radius, n_side, pole_exclusion)
        h_tau = evaluator.h_many(tau)
        for N, eps in zip(N_list, eps_list):
            sd = cd.bohr_sommerfeld(profile, N)
            xs = eps**0.8 * tau.imag / data.a
            ts = data.t_gc + eps**0.8 * tau.real / data.b
            ch_ex, sh_ex, _ = cd.evaluate_batch(sd, xs, ts)
            good = np.isfinite(ch_ex)
            excluded += int(np.sum(~good))

            def sup_at(Phi):
                ch_ap, sh_ap = theorem1_approx(xs[good], ts[good], data, eps, Phi, h_tau[good])
                return float(
                    np.max(np.hypot(ch_ap - ch_ex[good], sh_ap - sh_ex[good]))
                )

            if phase == "computed":
                phi = data.Phi_gc
                if phi is None:
                    raise ValueError("phase='computed' needs Phi_gc")
                phases.append(phi)
                sup_err.append(sup_at(phi))
            else:
                # leading terms are 2*pi*eps periodic in Phi
                phi0 = data.Phi_gc if data.Phi_gc is not None else 0.0
                best, val = _golden_min(
                    sup_at, phi0 - math.pi * eps, phi0 + math.pi * eps, tol=1e-7 * eps
                )
                phases.append(best)
                sup_err.append(val)
        x = np.log(eps_list)
        y = np.log(sup_err)
        A = np.stack([x, np.ones_like(x)], axis=1)
        coef, res, *_ = np.linalg.lstsq(A, y, rcond=None)
        exponent = float(coef[0])
        resid = float(np.sqrt(np.mean((A @ coef - y) ** 2)))
        extras["tau_radius"] = tau_radius
        extras["n_tau_points"] = int(tau.size)
        return ComparisonReport(
            mode, list(N_list), eps_list, sup_err, phases, exponent, resid, excluded, extras
        )

    # thm2
    tau1 = min((p for p in poles if abs(p.tau_p.imag) < 1e-9), key=lambda p: abs(p.tau_p))
    extras["tau_pole"] = [tau1.tau_p.real, tau1.tau_p.imag]
    g = np.linspace(-window, window, n_grid_thm2)
    XX, TT = np.meshgrid(g, g)
    for N, eps in zip(N_list, eps_list):
        sd = cd.bohr_sommerfeld(profile, N)
        x_p, t_p = pole_to_xt(tau1.tau_p, data, eps)
        xs = (x_p + eps * XX).ravel()
        ts = (t_p + eps * TT).ravel()
        ch_ex, sh_ex, _ = cd.evaluate_batch(sd, xs, ts)
        good = np.isfinite(ch_ex)
        excluded += int(np.sum(~good))

        params_m = data.m_gc

        def sup_at(Om):
            chp, shp = _defect_grid_fast(params_m, Om, g, g)
            d1 = np.abs(chp.ravel()[good] - ch_ex[good])
            d2 = np.abs(shp.ravel()[good] - sh_ex[good])
            return float(np.max(np.hypot(d1, d2)))

        if phase == "computed":
            Om = omega_pN(tau1.tau_p, data, eps)
            phases.append(Om)
            sup_err.append(sup_at(Om))
        else:
            Om, val = _golden_min(sup_at, 0.0, 2.0 * math.pi, tol=1e-5)
            phases.append(Om)
            sup_err.append(val)
    return ComparisonReport(
        mode, list(N_list), eps_list, sup_err, phases, None, None, excluded, extras
    )


def _defect_grid_fast(m: float, Omega: float, Xs: np.ndarray, Ts: np.ndarray):
    params = df.DefectParams(m=m, Omega=float(Omega))
    return df._field_arrays(params, np.asarray(Xs, dtype=float), np.asarray(Ts, dtype=float))
