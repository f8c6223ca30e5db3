"""Render report tables to PNG figures alongside the CSV output.

Figures are derived purely from the already-serialized report dictionary,
so they never influence report.json.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["render_figures"]


def _finite(values):
    out = []
    for v in values:
        out.append(float(v) if isinstance(v, (int, float)) else np.nan)
    return np.asarray(out, dtype=float)


def _fig_bounds(report, outdir):
    runs = report["runs"]
    ladder = [run["truncation"] for run in runs]
    lower = [run["frame"]["bounds"]["lower"] for run in runs]
    upper = [run["frame"]["bounds"]["upper"] for run in runs]
    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    ax.plot(ladder, lower, "o-", label="lower bound")
    ax.plot(ladder, upper, "s-", label="upper bound")
    ax.set_xlabel("truncation M")
    ax.set_ylabel("frame bound")
    ax.set_xscale("log", base=2)
    ax.legend()
    ax.grid(alpha=0.3)
    fig.tight_layout()
    path = outdir / "fig_bounds.png"
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def _fig_localization(report, outdir):
    runs = report["runs"]
    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    plotted = False
    for run in runs:
        m = run["truncation"]
        for key, style in (("polynomial", "o-"), ("dual_polynomial", "s--")):
            loc = run["localization"].get(key)
            if not loc:
                continue
            orders = [e["order"] for e in loc["constants"]]
            consts = _finite([e["constant"] for e in loc["constants"]])
            ax.plot(orders, consts, style, label=f"{key} M={m}")
            plotted = True
    if not plotted:
        plt.close(fig)
        return None
    ax.set_xlabel("envelope order s")
    ax.set_ylabel("constant C_s")
    ax.set_yscale("log")
    ax.legend(fontsize=7)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    path = outdir / "fig_localization.png"
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def _fig_decay(report, outdir):
    top = report["runs"][-1]
    functions = top["expansion"]["extras"]["functions"]
    fig, ax = plt.subplots(figsize=(5.6, 3.6))
    for label, result in functions.items():
        profile = _finite(result["coeff_profile"]["hermite"])
        live = profile > 0
        if not np.any(live):
            continue
        n = np.arange(1, profile.size + 1)
        ax.semilogy(n[live], profile[live], lw=0.9, label=label)
    ax.set_xlabel("index n")
    ax.set_ylabel("|coefficient|")
    ax.set_ylim(bottom=1e-18)
    ax.legend(fontsize=6, ncol=2)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    path = outdir / "fig_decay.png"
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def _fig_reconstruction(report, outdir):
    top = report["runs"][-1]
    expansion = top["expansion"]
    errors = expansion.get("errors_by_grade")
    if not errors:
        return None
    ladder = expansion["ladder"]
    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    for grade, values in sorted(errors.items(), key=lambda kv: int(kv[0])):
        vals = np.maximum(_finite(values), 1e-18)
        ax.semilogy(ladder, vals, "o-", label=f"grade {grade}")
    ax.set_xlabel("expansion cutoff")
    ax.set_ylabel("worst graded expansion tail norm")
    ax.legend(fontsize=7)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    path = outdir / "fig_reconstruction.png"
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_figures(report, outdir) -> list:
    """Write the standard figure set; returns the created paths."""
    outdir = Path(outdir)
    files = []
    for renderer in (_fig_bounds, _fig_localization, _fig_decay, _fig_reconstruction):
        path = renderer(report, outdir)
        if path is not None:
            files.append(path)
    return files
