"""Figure regeneration from emitted CSV/JSON artifacts.

Density panels of cos(u) over (x, t) or (X, T) grids, Re(h) fields in the
tau plane with the red zero level curve and pole markers, and the tiled
defect catalog sheets.  Read-only over inputs; the color scale is pinned to
[-1, 1] so panels stay comparable across N, and rendering is deterministic
(identical inputs give identical bytes).
"""

from __future__ import annotations

import json
import os
import warnings

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

SAVE_KW = dict(metadata={"Software": None}, dpi=150)


class SchemaError(ValueError):
    """Input files disagree with their sidecar metadata."""


def load_field_csv(csv_path: str, sidecar_path: str):
    """Field grid CSV (x,t,cos_half,sin_half,cos_u schema) plus sidecar."""
    with open(sidecar_path) as fh:
        meta = json.load(fh)
    data = np.loadtxt(csv_path, delimiter=",", skiprows=1)
    nx, nt = int(meta["nx"]), int(meta["nt"])
    if data.shape[0] != nx * nt:
        raise SchemaError(
            f"sidecar says {nx}x{nt} = {nx*nt} rows, CSV has {data.shape[0]}"
        )
    cols = {
        "x": data[:, 0].reshape(nt, nx),
        "t": data[:, 1].reshape(nt, nx),
        "cos_half": data[:, 2].reshape(nt, nx),
        "sin_half": data[:, 3].reshape(nt, nx),
        "cos_u": data[:, 4].reshape(nt, nx),
    }
    return cols, meta


def load_h_grid_csv(csv_path: str):
    """h-grid CSV (re_tau,im_tau,re_h,im_h), rectangular row-major."""
    data = np.loadtxt(csv_path, delimiter=",", skiprows=1)
    re = np.unique(data[:, 0])
    im = np.unique(data[:, 1])
    if re.size * im.size != data.shape[0]:
        raise SchemaError("h grid is not rectangular")
    H = (data[:, 2] + 1j * data[:, 3]).reshape(im.size, re.size)
    return re, im, H


def load_poles_csv(csv_path: str):
    data = np.loadtxt(csv_path, delimiter=",", skiprows=1, ndmin=2)
    return data[:, 0] + 1j * data[:, 1]


def _extent(meta):
    return [
        meta["x_range"][0],
        meta["x_range"][1],
        meta["t_range"][0],
        meta["t_range"][1],
    ]


def render_density(
    csv_path: str,
    sidecar_path: str,
    out_path: str,
    field: str = "cos_u",
    poles_csv: str | None = None,
    pole_map: dict | None = None,
    zero_contour: bool = False,
):
    """One density panel with the fixed [-1, 1] grayscale.

    `pole_map`, when given, must carry {a, b, t_gc, epsilon}; pole positions
    from the tau-plane CSV are then placed at x = eps^{4/5} Im(tau)/a,
    t = t_gc + eps^{4/5} Re(tau)/b (a linear change of coordinates only).
    """
    cols, meta = load_field_csv(csv_path, sidecar_path)
    z = cols[field]
    fig, ax = plt.subplots(figsize=(5.0, 5.0), dpi=150)
    ax.imshow(
        z, origin="lower", extent=_extent(meta), aspect="auto",
        vmin=-1.0, vmax=1.0, cmap="gray",
    )
    if zero_contour:
        ax.contour(cols["x"], cols["t"], z, levels=[0.0], colors="red", linewidths=0.8)
    if poles_csv is not None:
        taus = load_poles_csv(poles_csv)
        if pole_map is not None:
            eps = float(pole_map["epsilon"])
            s = eps**0.8
            xs = s * taus.imag / float(pole_map["a"])
            ts = float(pole_map["t_gc"]) + s * taus.real / float(pole_map["b"])
        else:
            xs, ts = taus.real, taus.imag
        ax.plot(xs, ts, "o", color="limegreen", markersize=4)
        xs2 = -xs[np.abs(xs) > 0]
        ts2 = ts[np.abs(xs) > 0]
        if pole_map is not None and xs2.size:
            ax.plot(xs2, ts2, "o", color="limegreen", markersize=4)
    ax.set_xlabel("x")
    ax.set_ylabel("t")
    title = meta.get("profile", meta.get("kind", ""))
    if "N" in meta:
        title += f"  N={meta['N']}"
    if "m" in meta:
        title = f"m={meta['m']:g}  Omega={meta.get('Omega', 0):g}"
    ax.set_title(title, fontsize=9)
    fig.tight_layout()
    fig.savefig(out_path, **SAVE_KW)
    plt.close(fig)
    return out_path


def render_h_field(
    csv_path: str,
    out_path: str,
    poles_csv: str | None = None,
    squash: float = 10.0,
):
    """Re(h) field in the tau plane: tanh(Re h / squash) density, red zero
    level curve, and green disks at the poles."""
    re, im, H = load_h_grid_csv(csv_path)
    z = np.tanh(np.real(H) / squash)
    fig, ax = plt.subplots(figsize=(5.5, 5.0), dpi=150)
    ax.imshow(
        z, origin="lower", extent=[re[0], re[-1], im[0], im[-1]],
        aspect="auto", vmin=-1.0, vmax=1.0, cmap="gray",
    )
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # NaN pole disks
        ax.contour(re, im, np.real(H), levels=[0.0], colors="red", linewidths=0.9)
    if poles_csv is not None:
        taus = load_poles_csv(poles_csv)
        ax.plot(taus.real, taus.imag, "o", color="limegreen", markersize=5)
    ax.set_xlabel("Re tau")
    ax.set_ylabel("Im tau")
    fig.tight_layout()
    fig.savefig(out_path, **SAVE_KW)
    plt.close(fig)
    return out_path


def render_catalog(tiles: list, out_path: str, n_cols: int | None = None):
    """Tiled defect sheet: one column per Omega, cos row above sin row.

    `tiles` is a list of (csv_path, sidecar_path); a missing tile leaves a
    blank placeholder and emits a warning.
    """
    n = len(tiles)
    n_cols = n_cols or n
    fig, axes = plt.subplots(2, n_cols, figsize=(2.6 * n_cols, 5.2), dpi=150, squeeze=False)
    for j in range(n_cols):
        for row, field in enumerate(("cos_u", "sin_u")):
            ax = axes[row][j]
            ax.set_xticks([])
            ax.set_yticks([])
            if j >= n or tiles[j] is None:
                warnings.warn(f"missing catalog tile {j}; placeholder left blank")
                ax.set_facecolor("white")
                continue
            csv_path, sidecar_path = tiles[j]
            try:
                cols, meta = load_field_csv(csv_path, sidecar_path)
            except (OSError, SchemaError) as exc:
                warnings.warn(f"tile {j} unreadable ({exc}); placeholder left blank")
                ax.set_facecolor("white")
                continue
            if field == "sin_u":
                z = 2.0 * cols["sin_half"] * cols["cos_half"]
            else:
                z = cols["cos_u"]
            ax.imshow(
                z, origin="lower", extent=_extent(meta), aspect="auto",
                vmin=-1.0, vmax=1.0, cmap="gray",
            )
            if row == 0:
                ax.set_title(f"Omega={meta.get('Omega', 0):.4g}", fontsize=8)
    axes[0][0].set_ylabel("cos u")
    axes[1][0].set_ylabel("sin u")
    fig.tight_layout()
    fig.savefig(out_path, **SAVE_KW)
    plt.close(fig)
    return out_path
