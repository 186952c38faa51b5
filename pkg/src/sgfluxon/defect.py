"""Closed-form two-parameter defect solutions U(X, T; m, Omega).

The space-time localized defects on an elliptic background: a rotation
matrix built from two polynomial-in-elliptic-function quantities q, r acts
on the background pair (dn, -sqrt(m) sn).  All elliptic arguments are
shifted by w = 2 K(m) Omega / pi + T and p denotes the periodic zero-mean
antiderivative from the special-function layer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import specfun as sf

__all__ = [
    "DefectParams",
    "DefectSample",
    "q_r",
    "rotation",
    "cos_sin_U",
    "defect_grid",
    "pde_residual",
]


@dataclass(frozen=True)
class DefectParams:
    m: float
    Omega: float

    def __post_init__(self):
        if not (0.0 < self.m < 1.0):
            raise ValueError(f"modulus m must lie in (0,1), got {self.m}")

    @property
    def shift(self) -> float:
        """Elliptic argument shift 2 K(m) Omega / pi."""
        return 2.0 * sf.elliptic_K(self.m) * self.Omega / math.pi


class DefectSample(NamedTuple):
    cos_half: float
    sin_half: float
    q: float
    r: float
    R: np.ndarray  # 2x2 rotation


def _background(params: DefectParams, T):
    """sn, cn, dn and p at the shifted argument w = 2K(m)Omega/pi + T."""
    w = params.shift + np.asarray(T, dtype=float)
    sn, cn, dn = sf.jacobi(w, params.m)
    p = sf.p_periodic(w, params.m)
    return sn, cn, dn, p


def q_r(X, T, params: DefectParams):
    """The pair (q, r); q is independent of X, r is quadratic in X.

    q = -(sn dn + P cn) / (2 sqrt(1-m)),
    r = (m - dn^2 - m(1-m) X^2 - P^2) / (4 sqrt(m(1-m))),
    with P = (1-m) p - sqrt(m(1-m)) rho(m) T.
    """
    m = params.m
    sn, cn, dn, p = _background(params, T)
    P = (1.0 - m) * p - math.sqrt(m * (1.0 - m)) * sf.rho(m) * np.asarray(T, dtype=float)
    q = -(sn * dn + P * cn) / (2.0 * math.sqrt(1.0 - m))
    r = (m - dn**2 - m * (1.0 - m) * np.asarray(X, dtype=float) ** 2 - P**2) / (
        4.0 * math.sqrt(m * (1.0 - m))
    )
    return q, r


def rotation(q, r):
    """Rotation with R11 = R22 = (r^2-q^2)/(q^2+r^2), R21 = -R12 = 2qr/(q^2+r^2)."""
    q = np.asarray(q, dtype=float)
    r = np.asarray(r, dtype=float)
    den = q * q + r * r
    c = (r * r - q * q) / den
    s = 2.0 * q * r / den
    return c, s  # R = [[c, -s], [s, c]]


def cos_sin_U(X, T, params: DefectParams):
    """DefectSample at one point: (cos(U/2), sin(U/2)) = R (dn, -sqrt(m) sn)."""
    m = params.m
    sn, cn, dn, p = _background(params, T)
    q, r = q_r(X, T, params)
    c, s = rotation(q, r)
    Cdot = dn
    Sdot = -math.sqrt(m) * sn
    ch = c * Cdot - s * Sdot
    sh = s * Cdot + c * Sdot
    R = np.array([[c, -s], [s, c]], dtype=float)
    return DefectSample(float(ch), float(sh), float(q), float(r), R)


def _field_arrays(params: DefectParams, Xs: np.ndarray, Ts: np.ndarray):
    """(nt, nx) arrays of cos(U/2), sin(U/2); background quantities per row."""
    m = params.m
    ch = np.empty((Ts.size, Xs.size))
    sh = np.empty((Ts.size, Xs.size))
    rho_m = sf.rho(m)
    sqm1 = math.sqrt(m * (1.0 - m))
    for i, T in enumerate(Ts):
        sn, cn, dn, p = _background(params, float(T))
        P = (1.0 - m) * p - sqm1 * rho_m * T
        q = -(sn * dn + P * cn) / (2.0 * math.sqrt(1.0 - m))
        r = (m - dn**2 - m * (1.0 - m) * Xs**2 - P**2) / (4.0 * sqm1)
        den = q * q + r * r
        c = (r * r - q * q) / den
        s = 2.0 * q * r / den
        Cdot = dn
        Sdot = -math.sqrt(m) * sn
        ch[i] = c * Cdot - s * Sdot
        sh[i] = s * Cdot + c * Sdot
    return ch, sh


def defect_grid(params: DefectParams, x_range, t_range, nx: int, nt: int):
    """FieldGrid of the defect over (X, T); CSV schema X,T,cos_half,sin_half,cos_u."""
    from .condensate import FieldGrid

    Xs = np.linspace(x_range[0], x_range[1], nx)
    Ts = np.linspace(t_range[0], t_range[1], nt)
    ch, sh = _field_arrays(params, Xs, Ts)
    meta = {
        "m": params.m,
        "Omega": params.Omega,
        "x_range": [float(x_range[0]), float(x_range[1])],
        "t_range": [float(t_range[0]), float(t_range[1])],
        "nx": int(nx),
        "nt": int(nt),
        "kind": "defect",
    }
    return FieldGrid(x=Xs, t=Ts, cos_half=ch, sin_half=sh, meta=meta)


def reconstruct_angle(cos_half: np.ndarray, sin_half: np.ndarray) -> np.ndarray:
    """U over a grid by marching unwrap of the half-angle (2 pi jump detection)."""
    theta = np.arctan2(sin_half, cos_half)
    theta = np.unwrap(theta, axis=0)
    theta = np.unwrap(theta, axis=1)
    return 2.0 * theta


def pde_residual(params: DefectParams, half_width: float, h: float, center=(0.0, 0.0)):
    """Max residual of U_TT - U_XX + sin U over the grid, second-order stencils.

    The grid covers center + [-half_width, half_width]^2 at spacing h; U is
    reconstructed by angle unwrapping.  The residual decays as O(h^2).
    """
    n = int(round(2 * half_width / h)) + 1
    Xs = center[0] + np.linspace(-half_width, half_width, n)
    Ts = center[1] + np.linspace(-half_width, half_width, n)
    hx = Xs[1] - Xs[0]
    ch, sh = _field_arrays(params, Xs, Ts)
    U = reconstruct_angle(ch, sh)
    utt = (U[2:, 1:-1] - 2 * U[1:-1, 1:-1] + U[:-2, 1:-1]) / hx**2
    uxx = (U[1:-1, 2:] - 2 * U[1:-1, 1:-1] + U[1:-1, :-2]) / hx**2
    res = utt - uxx + np.sin(U[1:-1, 1:-1])
    return float(np.max(np.abs(res)))
