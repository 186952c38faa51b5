"""Double-double (compensated) complex linear solve.

Partially pivoted LU over ~31-digit double-double scalars, vectorized with
numpy along matrix rows.  Used as a fallback when the condensate system is
too ill-conditioned for a plain float64 elimination: the assembled matrix is
normwise ill-conditioned while the underlying solution map is tame, so an
extended-precision elimination of the exact double-precision entries
recovers the answer.  Fixed precision throughout (no arbitrary-precision
arithmetic).
"""

from __future__ import annotations

import numpy as np

_SPLITTER = 134217729.0  # 2^27 + 1, Dekker splitting constant


def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _quick_two_sum(a, b):
    s = a + b
    return s, b - (s - a)


def _two_prod(a, b):
    p = a * b
    t = _SPLITTER * a
    ah = t - (t - a)
    al = a - ah
    t = _SPLITTER * b
    bh = t - (t - b)
    bl = b - bh
    e = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, e


def dd_add(xh, xl, yh, yl):
    sh, sl = _two_sum(xh, yh)
    th, tl = _two_sum(xl, yl)
    sl = sl + th
    sh, sl = _quick_two_sum(sh, sl)
    sl = sl + tl
    return _quick_two_sum(sh, sl)


def dd_neg(xh, xl):
    return -xh, -xl


def dd_mul(xh, xl, yh, yl):
    ph, pl = _two_prod(xh, yh)
    pl = pl + (xh * yl + xl * yh)
    return _quick_two_sum(ph, pl)


def dd_div(xh, xl, yh, yl):
    q1 = xh / yh
    th, tl = dd_mul(q1, np.zeros_like(q1), yh, yl)
    rh, rl = dd_add(xh, xl, -th, -tl)
    q2 = rh / yh
    th, tl = dd_mul(q2, np.zeros_like(q2), yh, yl)
    rh, rl = dd_add(rh, rl, -th, -tl)
    q3 = rh / yh
    qh, ql = _quick_two_sum(q1, q2)
    return dd_add(qh, ql, q3, np.zeros_like(q3))


class CDD:
    """Complex double-double tensor: four float64 arrays (re/im, hi/lo)."""

    __slots__ = ("rh", "rl", "ih", "il")

    def __init__(self, rh, rl, ih, il):
        self.rh, self.rl, self.ih, self.il = rh, rl, ih, il

    @classmethod
    def from_complex(cls, z):
        z = np.asarray(z, dtype=complex)
        zero = np.zeros_like(z.real)
        return cls(z.real.copy(), zero.copy(), z.imag.copy(), zero.copy())

    @classmethod
    def zeros(cls, shape):
        return cls(np.zeros(shape), np.zeros(shape), np.zeros(shape), np.zeros(shape))

    def to_complex(self):
        return (self.rh + self.rl) + 1j * (self.ih + self.il)

    def copy(self):
        return CDD(self.rh.copy(), self.rl.copy(), self.ih.copy(), self.il.copy())

    def __getitem__(self, idx):
        return CDD(self.rh[idx], self.rl[idx], self.ih[idx], self.il[idx])

    def __setitem__(self, idx, v):
        self.rh[idx], self.rl[idx] = v.rh, v.rl
        self.ih[idx], self.il[idx] = v.ih, v.il

    def magnitude(self):
        return np.abs(self.rh) + np.abs(self.ih)


def _cadd(a: CDD, b: CDD) -> CDD:
    rh, rl = dd_add(a.rh, a.rl, b.rh, b.rl)
    ih, il = dd_add(a.ih, a.il, b.ih, b.il)
    return CDD(rh, rl, ih, il)


def _csub(a: CDD, b: CDD) -> CDD:
    rh, rl = dd_add(a.rh, a.rl, -b.rh, -b.rl)
    ih, il = dd_add(a.ih, a.il, -b.ih, -b.il)
    return CDD(rh, rl, ih, il)


def _cmul(a: CDD, b: CDD) -> CDD:
    t1h, t1l = dd_mul(a.rh, a.rl, b.rh, b.rl)
    t2h, t2l = dd_mul(a.ih, a.il, b.ih, b.il)
    rh, rl = dd_add(t1h, t1l, -t2h, -t2l)
    t3h, t3l = dd_mul(a.rh, a.rl, b.ih, b.il)
    t4h, t4l = dd_mul(a.ih, a.il, b.rh, b.rl)
    ih, il = dd_add(t3h, t3l, t4h, t4l)
    return CDD(rh, rl, ih, il)


def _cdiv(a: CDD, b: CDD) -> CDD:
    # a / b = a * conj(b) / |b|^2
    d1h, d1l = dd_mul(b.rh, b.rl, b.rh, b.rl)
    d2h, d2l = dd_mul(b.ih, b.il, b.ih, b.il)
    dh, dl = dd_add(d1h, d1l, d2h, d2l)
    bc = CDD(b.rh, b.rl, -b.ih, -b.il)
    num = _cmul(a, bc)
    rh, rl = dd_div(num.rh, num.rl, dh, dl)
    ih, il = dd_div(num.ih, num.il, dh, dl)
    return CDD(rh, rl, ih, il)


def solve_dd(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve A x = b in double-double precision; A (n,n), b (n,) complex128."""
    return solve_dd_core(CDD.from_complex(A), CDD.from_complex(b)).to_complex()


def solve_dd_core(M: CDD, x: CDD) -> CDD:
    """In-place double-double LU with partial pivoting; returns the solution."""
    n = M.rh.shape[0]

    for k in range(n):
        col = M[np.s_[k:, k]]
        piv = k + int(np.argmax(col.magnitude()))
        if piv != k:
            for arr in (M.rh, M.rl, M.ih, M.il):
                arr[[k, piv], :] = arr[[piv, k], :]
            for arr in (x.rh, x.rl, x.ih, x.il):
                arr[[k, piv]] = arr[[piv, k]]
        pivot = M[np.s_[k], np.s_[k]] if False else M[(k, k)]
        if pivot.magnitude() == 0.0:
            raise np.linalg.LinAlgError("singular matrix in double-double solve")
        if k + 1 < n:
            lcol = _cdiv(M[(np.s_[k + 1 :], k)], _bcast(pivot, n - k - 1))
            M[(np.s_[k + 1 :], k)] = lcol
            # trailing update: A[i, j] -= l[i] * A[k, j]
            urow = M[(k, np.s_[k + 1 :])]
            li = CDD(
                lcol.rh[:, None], lcol.rl[:, None], lcol.ih[:, None], lcol.il[:, None]
            )
            uj = CDD(
                urow.rh[None, :], urow.rl[None, :], urow.ih[None, :], urow.il[None, :]
            )
            M[(np.s_[k + 1 :], np.s_[k + 1 :])] = _csub(
                M[(np.s_[k + 1 :], np.s_[k + 1 :])], _cmul(li, uj)
            )
            # forward substitution on the rhs
            bk = x[(k,)]
            bk_b = _bcast(bk, n - k - 1)
            x[(np.s_[k + 1 :],)] = _csub(x[(np.s_[k + 1 :],)], _cmul(lcol, bk_b))

    # back substitution
    for k in range(n - 1, -1, -1):
        if k + 1 < n:
            row = M[(k, np.s_[k + 1 :])]
            xs = x[(np.s_[k + 1 :],)]
            x[(k,)] = _csub(x[(k,)], _csum(_cmul(row, xs)))
        x[(k,)] = _cdiv(x[(k,)], M[(k, k)])
    return x


def _csum(v: CDD) -> CDD:
    """Pairwise tree sum along the last axis."""
    while v.rh.shape[-1] > 1:
        m = v.rh.shape[-1]
        half = m // 2
        head = v[(np.s_[: 2 * half : 2],)]
        tail = v[(np.s_[1 : 2 * half : 2],)]
        folded = _cadd(head, tail)
        if m % 2:
            folded = _cadd(folded[(np.s_[:],)], _pad_like(v[(np.s_[-1:],)], half))
        v = folded
    return v[(0,)]


def _pad_like(last: CDD, half: int) -> CDD:
    z = np.zeros(half)
    rh, rl, ih, il = z.copy(), z.copy(), z.copy(), z.copy()
    rh[0], rl[0], ih[0], il[0] = last.rh[0], last.rl[0], last.ih[0], last.il[0]
    return CDD(rh, rl, ih, il)


def _bcast(scal: CDD, n: int) -> CDD:
    return CDD(
        np.broadcast_to(scal.rh, (n,)),
        np.broadcast_to(scal.rl, (n,)),
        np.broadcast_to(scal.ih, (n,)),
        np.broadcast_to(scal.il, (n,)),
    )
