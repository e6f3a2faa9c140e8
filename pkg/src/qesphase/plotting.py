"""Static figures for sweep results.

Figures are drawn on an explicit ``Figure`` with the Agg canvas, so nothing
touches pyplot's global state and rendering is safe from worker threads.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

_AXIS_LABELS = {
    "theta": r"input phase $\theta$ (rad)",
    "alpha_mag": r"coherent amplitude $|\alpha|$",
}


def axis_label(variable: str) -> str:
    if variable in _AXIS_LABELS:
        return _AXIS_LABELS[variable]
    name, idx = variable.rstrip("]").split("[")
    return rf"$A_{{{idx}}}$" if name == "A_s" else rf"$\epsilon_{{{idx}}}$"


def plot_sweep(rows: list[dict], variable: str, path: str | Path, fit: dict | None = None) -> Path:
    """Two stacked panels: beta (closed form, quadrature, coherent) and the
    cyclicity defect against the swept value. A cosine fit, if given, is
    overlaid on the top panel."""
    x = np.array([r["swept_value"] for r in rows], dtype=float)
    fig = Figure(figsize=(6.4, 6.0))
    FigureCanvasAgg(fig)
    ax_beta, ax_def = fig.subplots(2, 1, sharex=True, gridspec_kw={"height_ratios": [3, 1]})

    ax_beta.plot(x, [r["beta_closed"] for r in rows], "o-", ms=4, label=r"$\beta$ closed form")
    ax_beta.plot(x, [r["beta_quadrature"] for r in rows], "x", ms=6, label=r"$\beta$ quadrature")
    coh = [r["beta_coherent"] for r in rows]
    if all(v is not None for v in coh):
        ax_beta.plot(x, coh, "+", ms=8, label=r"$\beta$ coherent formula")
    if fit is not None:
        xf = np.linspace(x.min(), x.max(), 400)
        ax_beta.plot(
            xf, fit["c0"] + fit["c1"] * np.cos(2.0 * xf), "k--", lw=1,
            label=rf"$c_0 + c_1\cos 2\theta$, $c_1/\pi$ = {fit['c1'] / math.pi:.6g}",
        )
    ax_beta.set_ylabel(r"geometric phase $\beta$ (rad)")
    ax_beta.legend(fontsize=8, frameon=False)

    ax_def.plot(x, [r["cyclicity_defect"] for r in rows], "s-", ms=3, color="C3")
    ax_def.set_ylabel("cyclicity defect")
    ax_def.set_xlabel(axis_label(variable))
    fig.tight_layout()

    path = Path(path)
    fig.savefig(path, dpi=120, metadata={"Software": None})
    return path
