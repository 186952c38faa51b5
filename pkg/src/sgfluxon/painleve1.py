"""Real tritronquee solution of y'' = 6 y^2 + tau and its Hamiltonian.

Evaluation of (y, y', h) along paths in the complex plane by high-order
Taylor stepping, pole location by Newton iteration on 1/h, the pole field in
the sector |arg tau| < pi/5, and grids of Re h for the zero-level-set plots.

The Hamiltonian h = -y'^2/2 + 2y^3 + tau*y satisfies h' = y and the sigma
form h''^2 + 2h - 4h'^3 - 2 tau h' = 0; at every pole of y it has a simple
pole of residue -1.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

__all__ = [
    "PIState",
    "PoleRecord",
    "PoleProximityError",
    "SECTOR_HALF_ANGLE",
    "tritronquee_init",
    "taylor_step",
    "continue_path",
    "locate_pole",
    "pole_field",
    "h_grid",
    "TritronqueeEvaluator",
]

SECTOR_HALF_ANGLE = 0.8 * math.pi  # poles satisfy |arg(-tau)| >= 4 pi/5
_U1 = 1.0 / (8.0 * math.sqrt(6.0))  # first asymptotic correction coefficient
_U2 = -49.0 / 768.0                 # second correction coefficient


class PoleProximityError(RuntimeError):
    """Taylor step radius collapsed; carries the nearest-pole estimate."""

    def __init__(self, tau: complex, estimate: complex):
        super().__init__(f"step collapse at tau = {tau:.6g}; pole estimate {estimate:.6g}")
        self.tau = tau
        self.estimate = estimate


@dataclass(frozen=True)
class PIState:
    tau: complex
    y: complex
    yprime: complex
    h: complex  # transported Hamiltonian (integrated h' = y)

    @property
    def h_algebraic(self) -> complex:
        return -0.5 * self.yprime**2 + 2.0 * self.y**3 + self.tau * self.y

    @property
    def sigma_residual(self) -> float:
        """|h''^2 + 2h - 4h'^3 - 2 tau h'| / scale with (h', h'') = (y, y')."""
        r = self.yprime**2 + 2.0 * self.h - 4.0 * self.y**3 - 2.0 * self.tau * self.y
        scale = max(1.0, abs(self.yprime) ** 2, 4.0 * abs(self.y) ** 3)
        return abs(r) / scale


@dataclass(frozen=True)
class PoleRecord:
    tau_p: complex
    h0: complex
    residue_check: float  # |residue + 1|


def tritronquee_init(tau0: complex, r_min: float = 300.0, sector_margin: float = 0.02) -> PIState:
    """Seed state from the large-|tau| expansion in the pole-free sector.

    y = -(s/6)^(1/2) (1 + u1 s^(-5/2) + u2 s^(-5)), s = -tau, through the
    first two correction orders; the downstream sigma-form residual
    certifies the truncation.
    """
    tau0 = complex(tau0)
    if abs(tau0) < r_min:
        raise ValueError(f"initialization needs |tau0| >= {r_min}")
    if abs(cmath.phase(-tau0)) > SECTOR_HALF_ANGLE - sector_margin:
        raise ValueError("tau0 outside the tritronquee sector |arg(-tau)| <= 4pi/5 - delta")
    s = -tau0
    rs = cmath.sqrt(s)
    f = 1.0 + _U1 * s**-2.5 + _U2 * s**-5.0
    fp = -2.5 * _U1 * s**-3.5 - 5.0 * _U2 * s**-6.0
    y = -rs / math.sqrt(6.0) * f
    # y'(tau) = -d y/d s = (1/sqrt6) (f/(2 sqrt s) + sqrt s f')
    yp = (f / (2.0 * rs) + rs * fp) / math.sqrt(6.0)
    h = -0.5 * yp**2 + 2.0 * y**3 + tau0 * y
    return PIState(tau0, y, yp, h)


def _taylor_coeffs(state: PIState, order: int) -> np.ndarray:
    a = np.zeros(order + 1, dtype=complex)
    a[0], a[1] = state.y, state.yprime
    tau0 = state.tau
    for n in range(order - 1):
        conv = np.dot(a[: n + 1], a[n::-1])
        rhs = 6.0 * conv
        if n == 0:
            rhs += tau0
        elif n == 1:
            rhs += 1.0
        a[n + 2] = rhs / ((n + 1) * (n + 2))
    return a


def _radius_estimate(a: np.ndarray) -> float:
    # ratio/root test over the series tail
    n = len(a) - 1
    vals = []
    for k in range(max(4, n - 8), n + 1):
        m = abs(a[k])
        if m > 0:
            vals.append(m ** (-1.0 / k))
    return min(vals) if vals else math.inf


def taylor_step(state: PIState, direction: complex, max_step: float, order: int = 34):
    """One Taylor step of length <= max_step toward `direction` (unit)."""
    a = _taylor_coeffs(state, order)
    r = _radius_estimate(a)
    step = min(0.42 * r, max_step)
    d = direction * step
    # Horner evaluation of y, y', h
    y = a[-1]
    for c in a[-2::-1]:
        y = y * d + c
    ap = a[1:] * np.arange(1, len(a))
    yp = ap[-1]
    for c in ap[-2::-1]:
        yp = yp * d + c
    hcoef = np.zeros(len(a) + 1, dtype=complex)
    hcoef[0] = state.h
    hcoef[1:] = a / np.arange(1, len(a) + 1)
    h = hcoef[-1]
    for c in hcoef[-2::-1]:
        h = h * d + c
    return PIState(state.tau + d, y, yp, h), step, r


def continue_path(
    state: PIState,
    path,
    order: int = 34,
    min_radius: float = 5e-3,
    detect_radius: float = 0.0,
    collect_residual: bool = True,
):
    """Continue a state along a polyline; raises PoleProximityError on collapse.

    `detect_radius` > 0 also raises whenever the estimated radius of
    convergence sinks below it (used by the pole search to notice poles off
    the marching line).  Returns (endpoint state, max sigma-form residual).
    """
    max_res = state.sigma_residual if collect_residual else 0.0
    for target in path:
        target = complex(target)
        while abs(target - state.tau) > 1e-14:
            gap = target - state.tau
            direction = gap / abs(gap)
            state, step, r = taylor_step(state, direction, abs(gap), order=order)
            if collect_residual:
                max_res = max(max_res, state.sigma_residual)
            if r < detect_radius:
                estimate = state.tau + 2.0 * state.y / state.yprime
                raise PoleProximityError(state.tau, estimate)
            if step < min_radius and abs(target - state.tau) > 1e-12:
                estimate = state.tau + 2.0 * state.y / state.yprime
                raise PoleProximityError(state.tau, estimate)
    return state, max_res


_BASE_TAU = -3.0


def _base_state(order: int = 30) -> PIState:
    st = tritronquee_init(-360.0)
    st, _ = continue_path(st, [_BASE_TAU], order=order)
    return st


def _reach(base: PIState, target: complex, tries: int = 4) -> PIState:
    """Continue base -> target, bending around poles met on the way."""
    offsets = [0.0, 0.8j, -0.8j, 1.6j, -1.6j]
    last: Optional[PoleProximityError] = None
    for off in offsets[: tries + 1]:
        path = [target] if off == 0.0 else [base.tau + off, target + off, target]
        try:
            st, _ = continue_path(base, path)
            return st
        except PoleProximityError as e:
            last = e
    raise last


def locate_pole(seed: complex, base: Optional[PIState] = None, ring_radius: float = 0.12):
    """Pole of y refined from a nearby seed.

    Two approach-to-collapse passes: the collapse estimate tau + 2y/y' has
    error O(d^5) at stopping distance d, so walking straight at the current
    estimate with a tiny minimum step pins the pole essentially exactly.
    The Laurent constant h0 and the contour-integral residue check come from
    a small ring average (the residue of h must be -1).
    """
    if base is None:
        base = _base_state()

    anchor_radius = 0.5
    u0 = cmath.exp(1j * cmath.phase(base.tau - seed))

    tau = complex(seed)
    # staged approach: each pass stops at the detection distance and recenters
    # on the collapse estimate (error O(d^5)), so the final pass hits head-on
    for detect in (0.3, 0.1, 0.02):
        start = _reach(base, tau + anchor_radius * u0)
        try:
            continue_path(start, [tau - 0.2 * u0], min_radius=1e-8, detect_radius=detect)
        except PoleProximityError as e:
            tau = e.estimate
    start = _reach(base, tau + anchor_radius * u0)
    try:
        # walk through the estimate and a bit beyond to guarantee collapse
        continue_path(start, [tau - 0.2 * u0], min_radius=1e-8)
    except PoleProximityError as e:
        tau = e.estimate
    else:
        raise RuntimeError(f"no pole found near seed {seed:.6g}")
    if abs(tau.imag) < 1e-7:
        tau = complex(tau.real, 0.0)  # Schwarz symmetry pins axis poles to the axis

    def state_near(anchor: PIState, center: complex, z: complex) -> PIState:
        """Walk along the anchor ring to arg(z - center), then radially inward."""
        th0 = cmath.phase(anchor.tau - center)
        th1 = cmath.phase(z - center)
        dth = (th1 - th0 + math.pi) % (2 * math.pi) - math.pi
        arcs = [
            center + anchor_radius * cmath.exp(1j * (th0 + dth * s))
            for s in np.linspace(0.25, 1.0, 4)
        ]
        st, _ = continue_path(anchor, arcs, min_radius=1e-9)
        st, _ = continue_path(st, [z], min_radius=1e-9)
        return st

    anchor = _reach(base, tau + anchor_radius * u0)
    M = 16
    h0_acc = 0.0 + 0.0j
    res_acc = 0.0 + 0.0j
    for k in range(M):
        z = tau + ring_radius * cmath.exp(2j * math.pi * k / M)
        st = state_near(anchor, tau, z)
        h0_acc += st.h + 1.0 / (z - tau)
        res_acc += st.h * (z - tau)
    h0 = h0_acc / M
    residue = res_acc / M
    rec = PoleRecord(tau_p=tau, h0=h0, residue_check=abs(residue + 1.0))
    if rec.residue_check > 1e-4:
        raise RuntimeError(
            f"residue check failed at {tau:.6g}: |residue + 1| = {rec.residue_check:.3g}"
        )
    return rec


def pole_field(
    radius: float = 8.0,
    max_radius: float = 20.0,
    line_spacing: float = 0.6,
    detect_radius: float = 0.45,
):
    """All poles with |tau_p| <= radius, closed under conjugation.

    Seeds come from radius-collapse events while marching horizontal lines
    y = const through the sector |arg tau| < pi/5 (upper half plus axis);
    each seed is refined by Newton on 1/h, deduplicated, and mirrored.
    Warns if a collapse event ends up matching no returned pole.
    """
    if radius > max_radius:
        raise ValueError(f"pole field radius {radius} exceeds configured max {max_radius}")
    base = _base_state()
    seeds: list[complex] = []
    y_top = radius * math.sin(math.pi / 5.0) + 0.4
    n_lines = int(y_top / line_spacing) + 1
    for iy in range(n_lines):
        y0 = iy * line_spacing
        x = 0.5
        try:
            st, _ = continue_path(
                base, [complex(0.0, y0), complex(x, y0)], detect_radius=detect_radius
            )
        except PoleProximityError as e:
            seeds.append(e.estimate)
            continue
        guard = 0
        while x < radius + 0.4 and guard < 200:
            guard += 1
            x_next = min(x + 0.4, radius + 0.4)
            try:
                st, _ = continue_path(st, [complex(x_next, y0)], detect_radius=detect_radius)
                x = x_next
            except PoleProximityError as e:
                est = e.estimate
                seeds.append(est)
                # hop past the pole with a local detour on the opposite side
                side = -1.0 if est.imag >= y0 else 1.0
                x_resume = max(est.real, e.tau.real) + 0.8
                resumed = False
                for dy in (0.9, 1.5):
                    yd = y0 + side * dy
                    try:
                        st, _ = continue_path(
                            st,
                            [
                                complex(st.tau.real, yd),
                                complex(x_resume, yd),
                                complex(x_resume, y0),
                            ],
                            detect_radius=detect_radius,
                        )
                        x = x_resume
                        resumed = True
                        break
                    except PoleProximityError as e2:
                        seeds.append(e2.estimate)
                if not resumed:
                    break

    records: list[PoleRecord] = []
    unmatched = 0
    for s in seeds:
        try:
            rec = locate_pole(s, base=base)
        except (RuntimeError, PoleProximityError):
            unmatched += 1
            continue
        if abs(rec.tau_p - s) > 1.5:
            unmatched += 1
            continue
        if abs(cmath.phase(-rec.tau_p)) < SECTOR_HALF_ANGLE - 1e-9:
            raise RuntimeError(f"pole {rec.tau_p} violates the pole-free sector")
        if abs(rec.tau_p) <= radius and all(
            abs(rec.tau_p - r.tau_p) > 1e-6 for r in records
        ):
            records.append(rec)
    if unmatched:
        import warnings

        warnings.warn(
            f"{unmatched} step-collapse event(s) matched no returned pole; "
            "the search grid may be too coarse",
            RuntimeWarning,
        )
    # close under conjugation
    for rec in list(records):
        if abs(rec.tau_p.imag) > 1e-10:
            conj = PoleRecord(rec.tau_p.conjugate(), rec.h0.conjugate(), rec.residue_check)
            if all(abs(conj.tau_p - r.tau_p) > 1e-6 for r in records):
                records.append(conj)
    records.sort(key=lambda r: (abs(r.tau_p), r.tau_p.imag))
    return records


def h_grid(
    re_range: tuple[float, float],
    im_range: tuple[float, float],
    n_re: int,
    n_im: int,
    poles: Optional[list[PoleRecord]] = None,
    exclusion: float = 0.18,
):
    """Grid of h over a rectangle, NaN inside pole-exclusion disks."""
    if poles is None:
        span = max(abs(re_range[0]), abs(re_range[1]), abs(im_range[0]), abs(im_range[1]))
        poles = pole_field(radius=span * math.sqrt(2.0) + 1.0)
    taus_re = np.linspace(re_range[0], re_range[1], n_re)
    taus_im = np.linspace(im_range[0], im_range[1], n_im)
    out = np.full((n_im, n_re), np.nan, dtype=complex)
    ev = TritronqueeEvaluator(poles=poles)
    for i, ti in enumerate(taus_im):
        for j, tr in enumerate(taus_re):
            tau = complex(tr, ti)
            if any(abs(tau - p.tau_p) < exclusion for p in poles):
                continue
            out[i, j] = ev.h(tau)
    return taus_re, taus_im, out


class TritronqueeEvaluator:
    """Memoized evaluation of (y, h) with pole-avoiding path planning."""

    def __init__(self, poles: Optional[list[PoleRecord]] = None, safe_distance: float = 0.3):
        self.base = _base_state()
        self.poles = [p.tau_p for p in poles] if poles else []
        self.safe = safe_distance
        self._cache: dict[complex, PIState] = {}

    def _path_to(self, tau: complex) -> list[complex]:
        """Straight path from the base, bent around known poles."""
        src = self.base.tau
        pts = [tau]
        for p in self.poles:
            # distance from segment src->tau to pole p
            d = tau - src
            L = abs(d)
            if L == 0:
                continue
            tproj = max(0.0, min(1.0, ((p - src) / d).real))
            closest = src + tproj * d
            if abs(closest - p) < self.safe and 0.0 < tproj < 1.0:
                n = 1j * d / L
                if ((p - src) / d).imag > 0:
                    n = -n
                pts = [closest + n * 2.0 * self.safe, tau]
                break
        return pts

    def state(self, tau: complex) -> PIState:
        tau = complex(tau)
        key = complex(round(tau.real, 12), round(tau.imag, 12))
        if key in self._cache:
            return self._cache[key]
        st, _ = continue_path(self.base, self._path_to(tau))
        if len(self._cache) < 200000:
            self._cache[key] = st
        return st

    def h(self, tau: complex) -> complex:
        return self.state(tau).h

    def h_many(self, taus) -> np.ndarray:
        """Vector of h over arbitrary points (sorted internally for reuse)."""
        taus = np.asarray(taus, dtype=complex).ravel()
        order = np.lexsort((taus.real, taus.imag))
        out = np.empty(taus.size, dtype=complex)
        for idx in order:
            out[idx] = self.h(complex(taus[idx]))
        return out
