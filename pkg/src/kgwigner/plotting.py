"""Figure output for the dispersion curve (non-interactive backend)."""

from __future__ import annotations

import numpy as np


def plot_fig2(rows, path, threshold=None):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    sig = np.array([r.sigma_p for r in rows])
    corrected = np.array([r.dx2_corrected for r in rows])
    reference = np.array([r.reference_dx2 for r in rows])
    usual = np.array([r.dx2_usual for r in rows])

    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    ax.plot(sig, np.sqrt(reference), "k--", zorder=3, label=r"$1/(2\Delta p)$")
    ax.plot(sig, np.sqrt(np.clip(usual, 0, None)), color="0.6", label="usual term only")
    pos = corrected > 0
    ax.plot(sig[pos], np.sqrt(corrected[pos]), "C0", lw=2, label=r"$\Delta x$ (corrected)")
    if threshold is not None:
        ax.axvline(threshold, color="C3", lw=1, ls=":", label=rf"$\Delta x^2=0$ at {threshold:.4f}")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel(r"$\Delta p$  ($mc$)")
    ax.set_ylabel(r"$\Delta x$  ($\hbar/mc$)")
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    # fixed metadata keeps the PNG byte-stable
    fig.savefig(path, dpi=120, metadata={"Software": None})
    plt.close(fig)
