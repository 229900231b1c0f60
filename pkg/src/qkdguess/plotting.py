"""Figure rendering for scatter samples and critical-rate tables.

Figures are written straight to files (Agg backend) so the command-line
report path can drop a plot next to its CSV output.
"""

from __future__ import annotations

from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .analysis import CriticalReport, ScatterPoint, symmetric_pe_star_curve
from .protocol import ProtocolConfig, is_standard_bb84


def save_scatter_figure(points: Sequence[ScatterPoint], config: ProtocolConfig,
                        path: str) -> None:
    """P_B-versus-P_E scatter with the analytic maximum curve and P_B = P_E line.

    Points in the shaded region below the diagonal have an eavesdropper
    guessing probability smaller than Bob's hit rate.
    """
    fig, ax = plt.subplots(figsize=(4.8, 4.4))
    ax.plot([p.p_b for p in points], [p.p_e for p in points],
            ".", ms=2.5, color="tab:blue", alpha=0.55, label="random samples")
    pb_grid = np.linspace(0.5, 1.0, 400)
    curve = [symmetric_pe_star_curve(config, 1.0 - pb) for pb in pb_grid]
    ax.plot(pb_grid, curve, "-", color="tab:red", lw=1.6, label=r"$P_E^\ast$")
    ax.plot([0.5, 1.0], [0.5, 1.0], "--", color="gray", lw=1.0, label=r"$P_B=P_E$")
    ax.fill_between(pb_grid, 0.45, pb_grid, color="gray", alpha=0.12, lw=0)
    label = "BB84" if is_standard_bb84(config) else "six-state"
    ax.set_xlabel(r"$P_B$")
    ax.set_ylabel(r"$P_E$")
    ax.set_xlim(0.5, 1.0)
    ax.set_ylim(0.45, 1.02)
    ax.set_title(f"{label}: guessing probability vs. Bob's hit rate")
    ax.legend(loc="lower right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_critical_scan_figure(reports: Sequence[CriticalReport], path: str) -> None:
    """Critical error rates of both criteria versus the scanned angle."""
    phi = [r.phi1 if r.phi1 is not None else 0.0 for r in reports]
    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    ax.plot(phi, [100 * r.eps_cr for r in reports], "o-", color="tab:red",
            label=r"$\varepsilon_{cr}$ ($P_B = P_E^\ast$)")
    ax.plot(phi, [100 * r.eps_tilde_cr for r in reports], "s--", color="tab:blue",
            label=r"$\tilde\varepsilon_{cr}$ ($R = 0$)")
    ax.set_xlabel(r"$\varphi_1$ (rad)")
    ax.set_ylabel("critical error rate (%)")
    ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
