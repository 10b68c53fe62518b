"""Figures written next to the delimited/text outputs of the CLI."""
from __future__ import annotations

import math
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .schedule import EnergyTrace, RunReport  # noqa: E402

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _figure(width: float = 6.0):
    return plt.subplots(figsize=(width, width * GOLDEN))


def plot_schedules(trace: EnergyTrace, reports: Sequence[RunReport], path: str | Path) -> Path:
    """Step plot of transmit power against time, one line per report, arrivals marked."""
    fig, ax = _figure()
    for rep in reports:
        if not rep.schedule.segments:
            continue
        xs = [s.start for s in rep.schedule] + [rep.schedule.end]
        ys = [s.power for s in rep.schedule] + [rep.schedule.segments[-1].power]
        ax.step(xs, ys, where="post", label=f"{rep.algorithm} ({rep.completion_time:.2f} s)")
    for t in trace.times:
        ax.axvline(t, color="0.8", lw=0.8, zorder=0)
    ax.set_xlabel("time (s)")
    ax.set_ylabel("power")
    if trace.label:
        ax.set_title(trace.label)
    ax.legend(frameon=False)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path)
    plt.close(fig)
    return path


def plot_ratio_curve(curve: Sequence[tuple[float, float]], alpha_star: float, r_lower: float,
                     path: str | Path, title: str = "") -> Path:
    fig, ax = _figure()
    pts = [(a, r) for a, r in curve if math.isfinite(r)]
    ax.plot([a for a, _ in pts], [r for _, r in pts], lw=1.5)
    ax.plot([alpha_star], [r_lower], "o", color="C3")
    ax.annotate(f"alpha={alpha_star:.3f}, r={r_lower:.4f}", (alpha_star, r_lower),
                textcoords="offset points", xytext=(8, 8))
    ax.set_xlabel("alpha")
    ax.set_ylabel("max completion ratio")
    ax.set_xlim(0.0, 1.0)
    if pts:
        ax.set_ylim(min(r for _, r in pts) * 0.95, min(max(r for _, r in pts), 5.0))
    if title:
        ax.set_title(title)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path)
    plt.close(fig)
    return path
