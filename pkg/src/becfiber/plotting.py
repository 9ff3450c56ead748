"""Figure output for scan tables.

Figures go through matplotlib's non-interactive Agg canvas and are written
next to the delimited data. The file type follows the path suffix (SVG by
default).
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .tables import ScanTable  # noqa: E402

_STYLE = {
    "font.size": 10,
    "axes.labelsize": 11,
    "legend.fontsize": 9,
    "xtick.labelsize": 9,
    "ytick.labelsize": 9,
    "lines.linewidth": 1.5,
    # Stable element ids so identical data give identical SVG files.
    "svg.hashsalt": "becfiber",
}


def _figure(width: float = 5.0):
    golden = (math.sqrt(5) - 1.0) / 2.0
    return plt.subplots(figsize=(width, width * golden))


def _save(fig, path: str | Path) -> Path:
    path = Path(path)
    fig.tight_layout()
    meta = {"Date": None} if path.suffix.lower() == ".svg" else None
    fig.savefig(path, metadata=meta)
    plt.close(fig)
    return path


def plot_theta_scan(table: ScanTable, path: str | Path, *, degrees: bool = False) -> Path:
    """|xi0(theta)|^2 as a line with xi/N as a dashed horizontal reference."""
    with plt.rc_context(_STYLE):
        fig, ax = _figure()
        theta = table.column("theta")
        if degrees:
            theta = [math.degrees(t) for t in theta]
        ax.plot(theta, table.column("xi0_sq"), color="C0", label=r"$|\xi_0(\theta)|^2$")
        xi_n = table.column("xi_over_n")
        if xi_n:
            ax.axhline(xi_n[0], color="C1", linestyle="--", label=r"$\xi/N$")
        ax.set_xlabel(r"$\theta$ (deg)" if degrees else r"$\theta$ (rad)")
        ax.set_ylabel("geometric factor")
        ax.set_xlim(min(theta), max(theta))
        ax.set_ylim(bottom=0.0)
        ax.legend(frameon=False)
        return _save(fig, path)


def plot_n_sweep(table: ScanTable, path: str | Path, *, degrees: bool = False) -> Path:
    """Critical angle against atom number on a log axis; absent rows are skipped."""
    with plt.rc_context(_STYLE):
        fig, ax = _figure()
        pts = [(n, t) for n, t, found in table.rows if found]
        if pts:
            ns, ts = zip(*pts)
            if degrees:
                ts = [math.degrees(t) for t in ts]
            ax.plot(ns, ts, marker="o", color="C0")
        ax.set_xscale("log")
        ax.set_xlabel(r"$N$")
        ax.set_ylabel(r"$\theta^*$ (deg)" if degrees else r"$\theta^*$ (rad)")
        return _save(fig, path)


def plot_epsilon(table: ScanTable, path: str | Path) -> Path:
    with plt.rc_context(_STYLE):
        fig, ax = _figure()
        ax.plot(table.column("t"), table.column("abs2"), color="C0")
        ax.set_xlabel(r"$t$")
        ax.set_ylabel(r"$|\epsilon(t)|^2$")
        return _save(fig, path)
