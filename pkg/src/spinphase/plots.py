"""Figure rendering for the command line report path.

Each CLI command can drop a PNG next to its delimited output. Undefined
phases arrive as NaN and break the plotted line, so singular neighborhoods
show as gaps instead of interpolated segments.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def render_curves(path: str, blocks: list[tuple[str, np.ndarray, np.ndarray, np.ndarray]]) -> None:
    """Phase and visibility vs precession angle, one series per theta.

    ``blocks`` entries are (label, phi_deg, phase_deg possibly NaN, visibility).
    """
    fig, (ax_phase, ax_vis) = plt.subplots(2, 1, sharex=True, figsize=(7, 6))
    for label, phi, phase, vis in blocks:
        ax_phase.plot(phi, phase, label=label)
        ax_vis.plot(phi, vis, label=label)
    ax_phase.set_ylabel("noncyclic phase (deg)")
    ax_phase.legend(fontsize=8)
    ax_phase.grid(alpha=0.3)
    ax_vis.set_ylabel("visibility")
    ax_vis.set_xlabel("precession angle (deg)")
    ax_vis.set_ylim(-0.05, 1.05)
    ax_vis.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_critique(
    path: str,
    theta_deg: float,
    phi: np.ndarray,
    diff: np.ndarray,
    mirror: np.ndarray,
    total: np.ndarray,
) -> None:
    """The difference observable, its mirror, and their pointwise sum."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(phi, diff, label=f"difference, theta={theta_deg:g} deg")
    ax.plot(phi, mirror, label=f"mirror, theta={180 - theta_deg:g} deg")
    ax.plot(phi, total, label="pointwise sum", linestyle="--")
    ax.set_xlabel("precession angle (deg)")
    ax.set_ylabel("phase difference (deg)")
    ax.grid(alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_locus(path: str, items: list[tuple[float, list[float]]], phi_span_deg: tuple[float, float]) -> None:
    """Singular points in the (phi, theta) plane."""
    fig, ax = plt.subplots(figsize=(7, 4))
    drew_any = False
    for theta_deg, phis_deg in items:
        if phis_deg:
            ax.plot(phis_deg, [theta_deg] * len(phis_deg), "rx", markersize=9)
            drew_any = True
    ax.axhline(90.0, color="gray", linewidth=0.6, linestyle=":")
    ax.set_xlim(*phi_span_deg)
    ax.set_xlabel("precession angle (deg)")
    ax.set_ylabel("theta (deg)")
    title = "phase singularities" if drew_any else "phase singularities (none in range)"
    ax.set_title(title, fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_residuals(path: str, groups: list[tuple[str, np.ndarray, np.ndarray]]) -> None:
    """Conversion-law residual vs precession angle, one series per (theta, p)."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for label, phi, residual in groups:
        ax.plot(phi, residual, label=label)
    ax.set_xlabel("precession angle (deg)")
    ax.set_ylabel("residual (rad)")
    ax.grid(alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_experiment(
    path: str,
    theta_deg: float,
    phi: np.ndarray,
    phase: np.ndarray,
    phase_err: np.ndarray,
    singular_phi: np.ndarray,
) -> None:
    """Fitted phase with error bars; singular settings marked on the axis."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.errorbar(phi, phase, yerr=phase_err, fmt=".", markersize=4, linewidth=1, capsize=2)
    for x in singular_phi:
        ax.axvline(x, color="red", alpha=0.4, linewidth=0.8)
    ax.set_xlabel("precession angle (deg)")
    ax.set_ylabel("fitted phase (deg)")
    ax.set_title(f"fitted curve, theta={theta_deg:g} deg", fontsize=10)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
