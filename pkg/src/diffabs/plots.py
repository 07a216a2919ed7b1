"""Static SVG figures for profiles, sweeps and solution snapshots."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .kernels import eval_U, eval_Utilde  # noqa: E402

__all__ = ["profile_figure", "sweep_figure", "snapshot_figure", "save_svg"]


def save_svg(fig, path):
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


def profile_figure(profiles):
    """Decaying profiles f(eta) with the Gaussian envelope for reference."""
    fig, (ax, ax2) = plt.subplots(1, 2, figsize=(9, 3.6))
    for p in profiles:
        ax.plot(p.eta, p.f, label=f"$\\ell$={p.ell:g}, N={p.N}")
        ax2.semilogy(p.eta, np.maximum(p.f, 1e-300), lw=1)
    eta = profiles[0].eta
    env = (eta**2 + 1.0) * np.exp(-(eta**2) / 4.0)
    ax2.semilogy(eta, env, "k--", lw=0.8, label="envelope")
    ax.set_xlabel(r"$\eta$")
    ax.set_ylabel(r"$f(\eta)$")
    ax.legend(fontsize=8)
    ax2.set_xlabel(r"$\eta$")
    ax2.set_ylim(1e-18, 2)
    ax2.legend(fontsize=8)
    fig.tight_layout()
    return fig


def sweep_figure(table):
    """Probe value against ladder mass, with the supersolution level."""
    fig, ax = plt.subplots(figsize=(5.2, 3.8))
    for j, (x0, t0) in enumerate(table.probes):
        ax.loglog(table.ks, np.maximum(table.values[:, j], 1e-300), "o-",
                  label=f"x={x0:g}, t={t0:g}")
        sup = table.supersolution[j]
        if np.isfinite(sup) and sup > 0:
            ax.axhline(sup, ls="--", lw=0.8, color=f"C{j}")
    ax.set_xlabel("k")
    ax.set_ylabel("probe value")
    ax.legend(fontsize=8)
    fig.tight_layout()
    return fig


def snapshot_figure(result):
    """Stored radial snapshots with the flat supersolution markers."""
    fig, ax = plt.subplots(figsize=(5.2, 3.8))
    spec = result.spec
    for t, u in zip(result.times, result.fields):
        ax.plot(result.grid.r, u, lw=1, label=f"t={t:g}")
        try:
            sup = (eval_Utilde(spec, float(t)) if spec.variant == "exponential"
                   else eval_U(spec, float(t)))
        except Exception:
            sup = np.inf
        if np.isfinite(sup):
            ax.axhline(sup, ls=":", lw=0.7, color="gray")
    ax.set_xlabel("r")
    ax.set_ylabel("u")
    ax.legend(fontsize=8)
    fig.tight_layout()
    return fig
