"""Report figures written to files (Agg backend, no display needed)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .benchmark import BenchmarkReport  # noqa: E402
from .models import MaterialModel, ss_stress, ut_stress  # noqa: E402

RC = {
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 7,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "savefig.dpi": 150,
}


def _save(fig, path: Path) -> Path:
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def stress_strain(truth: MaterialModel, found: MaterialModel, data=None, protocol=None,
                  path: str | Path = "stress_strain.png") -> Path:
    """Uniaxial and shear curves of the true and discovered models."""
    lam = np.linspace(1.0, 1.5, 100)
    gam = np.linspace(0.0, 0.5, 100)
    inc = [m if not m.compressible else None for m in (truth, found)]
    with plt.rc_context(RC):
        fig, (a, b) = plt.subplots(1, 2, figsize=(6.4, 2.6))
        for m, style, label in zip(inc, ("-", "--"), ("true", "discovered")):
            if m is None:
                continue
            a.plot(lam, ut_stress(m, lam), style, label=label)
            b.plot(gam, ss_stress(m, gam), style, label=label)
        if data is not None and protocol is not None:
            n = protocol.n_ut
            a.plot(protocol.ut_stretches, data[:n], "k.", ms=3, label="data")
            b.plot(protocol.ss_shears, data[n:], "k.", ms=3, label="data")
        a.set(xlabel="stretch", ylabel="P11")
        b.set(xlabel="shear", ylabel="P12")
        a.legend(frameon=False)
        fig.suptitle(found.describe(), fontsize=8)
        return _save(fig, Path(path))


def error_distributions(report: BenchmarkReport, path: str | Path = "errors.png") -> Path:
    """Box plots of E_incompr per benchmark and noise level (log scale)."""
    summary = report.summary()
    names = list(dict.fromkeys(s["benchmark"] for s in summary))
    levels = sorted({s["noise"] for s in summary if s["noise"] > 0})
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(6.4, 2.8))
        width = 0.8 / max(len(levels), 1)
        for j, lvl in enumerate(levels):
            vals = [[max(r.e_incompr, 1e-16) for r in report.select(n, lvl) if not r.error] or [np.nan]
                    for n in names]
            pos = np.arange(len(names)) + (j - (len(levels) - 1) / 2) * width
            bp = ax.boxplot(vals, positions=pos, widths=0.9 * width, patch_artist=True, showfliers=False)
            for box in bp["boxes"]:
                box.set_facecolor(f"C{j}")
                box.set_alpha(0.6)
            ax.plot([], [], "s", color=f"C{j}", label=f"{100 * lvl:g}% noise")
        ax.set_xticks(np.arange(len(names)), names, rotation=15)
        ax.set_yscale("log")
        ax.set_ylabel("E_incompr")
        ax.legend(frameon=False)
        return _save(fig, Path(path))


def family_rates(report: BenchmarkReport, path: str | Path = "family_rates.png") -> Path:
    summary = [s for s in report.summary() if s["noise"] > 0]
    names = list(dict.fromkeys(s["benchmark"] for s in summary))
    levels = sorted({s["noise"] for s in summary})
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(6.4, 2.4))
        width = 0.8 / max(len(levels), 1)
        for j, lvl in enumerate(levels):
            rates = [next((s["family_rate"] for s in summary if s["benchmark"] == n and s["noise"] == lvl), 0)
                     for n in names]
            ax.bar(np.arange(len(names)) + (j - (len(levels) - 1) / 2) * width, rates, width,
                   label=f"{100 * lvl:g}% noise")
        ax.set_xticks(np.arange(len(names)), names, rotation=15)
        ax.set_ylim(0, 1.05)
        ax.set_ylabel("correct family rate")
        ax.legend(frameon=False)
        return _save(fig, Path(path))


def plate_response(solutions: dict, angles, path: str | Path = "plate_response.png") -> Path:
    """Probe displacements at the last step and reaction-force curves."""
    with plt.rc_context(RC):
        fig, (a, b) = plt.subplots(1, 2, figsize=(6.4, 2.6))
        for k, (label, sol) in enumerate(solutions.items()):
            u = sol.probe_displacements[-1]
            a.plot(angles, u[0], "-o", color=f"C{k}", ms=3, label=f"{label} u1")
            a.plot(angles, u[1], "--s", color=f"C{k}", ms=3, label=f"{label} u2")
            b.plot(sol.deltas, sol.reactions[:, 0], "-", color=f"C{k}", label=f"{label} R1")
            b.plot(sol.deltas, sol.reactions[:, 1], "--", color=f"C{k}", label=f"{label} R2")
        a.set(xlabel="probe angle [deg]", ylabel="displacement")
        b.set(xlabel="delta", ylabel="reaction force")
        a.legend(frameon=False)
        b.legend(frameon=False)
        return _save(fig, Path(path))
