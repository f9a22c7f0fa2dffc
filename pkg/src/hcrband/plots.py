"""Figure rendering for the report path.

Everything draws through the Agg backend so report generation works
headless; figures land next to the CSV tables as PNG files.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .model import EnvelopeBand

FIG_DPI = 150


def render_band_figure(path: str, band_global: EnvelopeBand, band_partial: EnvelopeBand):
    """Envelope band in u-coordinates plus band width on a log scale."""
    p = band_global.params
    fig, (ax_u, ax_w) = plt.subplots(1, 2, figsize=(10.0, 4.0))

    xu = np.linspace(0.0, 1.0, 801)
    ax_u.plot(xu, band_global.u_upper(xu), label="global upper", color="tab:red")
    ax_u.plot(xu, band_global.u_lower(xu), label="global lower", color="tab:blue")
    xu_p = np.linspace(0.0, 1.0 - band_partial.x_valid_min, 801)
    ax_u.plot(xu_p, band_partial.u_upper(xu_p), "--", label="partial upper", color="tab:orange")
    ax_u.plot(xu_p, band_partial.u_lower(xu_p), "--", label="partial lower", color="tab:cyan")
    ax_u.set_xlabel("x")
    ax_u.set_ylabel("u")
    ax_u.set_title(f"envelopes, b={p.b:g}, t={p.t:g}")
    ax_u.legend(fontsize=8)

    xs = np.linspace(band_partial.x_valid_min, 1.0, 801)
    ax_w.semilogy(xs, np.maximum(band_global.width_y(xs), 1e-18), label="global")
    ax_w.semilogy(xs, np.maximum(band_partial.width_y(xs), 1e-18), "--", label="partial")
    ax_w.set_xlabel("x")
    ax_w.set_ylabel("band width in y")
    ax_w.legend(fontsize=8)

    fig.tight_layout()
    fig.savefig(path, dpi=FIG_DPI)
    plt.close(fig)


def render_bracket_figure(path: str, upper, lower):
    """The two bracketing trajectories and their pointwise gap."""
    fig, (ax_y, ax_e) = plt.subplots(1, 2, figsize=(10.0, 4.0))

    ax_y.plot(upper.xs, upper.ys, label="delta = 0", color="tab:red")
    ax_y.plot(lower.xs, lower.ys, label="delta = cap", color="tab:blue")
    ax_y.set_xlabel("x")
    ax_y.set_ylabel("y")
    ax_y.set_title(f"bracket runs, delta cap {lower.delta:.3g}")
    ax_y.legend(fontsize=8)

    gap = np.maximum(upper.ys - lower.ys, 1e-18)
    ax_e.semilogy(upper.xs, gap)
    ax_e.set_xlabel("x")
    ax_e.set_ylabel("y gap")

    fig.tight_layout()
    fig.savefig(path, dpi=FIG_DPI)
    plt.close(fig)


def render_limit_figure(path: str, b: float, samples_above, samples_below, u0p):
    """Exponent-bracket runs of the limiting problem against the closed form."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))

    xs = np.array([s[0] for s in samples_above])
    ax.plot(xs, u0p, label="closed-form upper", color="tab:green")
    ax.plot(xs, [s[1] for s in samples_above], "--", label="run above", color="tab:red")
    ax.plot(xs, [s[1] for s in samples_below], ":", label="run below", color="tab:blue")
    ax.set_xlabel("x")
    ax.set_ylabel("w")
    ax.set_title(f"limiting problem, b={b:g}")
    ax.legend(fontsize=8)

    fig.tight_layout()
    fig.savefig(path, dpi=FIG_DPI)
    plt.close(fig)
