"""Figures for sweep results. The CSV files stay the primary output."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

LABELS = {
    "onebit_both_csit": "one-bit ADCs and DACs",
    "onebit_adc_inf_dac": "one-bit ADCs, unquantized DACs",
    "siso_csir_only": "one-bit ADCs and DACs, CSIR only",
}

STYLE = {
    "font.size": 10,
    "axes.labelsize": 10,
    "legend.fontsize": 8,
    "xtick.labelsize": 9,
    "ytick.labelsize": 9,
    "lines.linewidth": 1.4,
    "lines.markersize": 4,
    "axes.grid": True,
    "grid.alpha": 0.3,
}


def new_figure(width=5.0, height=None):
    golden = (5**0.5 - 1) / 2
    return plt.subplots(figsize=(width, height or width * golden))


def _finish(fig, ax, path, title):
    ax.set_xlabel("SNR [dB]")
    ax.set_ylabel("rate [bits/channel use]")
    ax.set_ylim(0, 2.1)
    if title:
        ax.set_title(title)
    ax.legend(loc="lower right")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)


@plt.rc_context(STYLE)
def plot_sweep(result, path, title=None):
    """Ergodic capacity versus SNR, one line per variant, with 3-sigma bands."""
    fig, ax = new_figure()
    snr = result.snr_db
    for v in result.config.variants:
        mean, se = result.mean[v], result.stderr[v]
        (line,) = ax.plot(snr, mean, marker="o", label=LABELS.get(v, v))
        ax.fill_between(snr, mean - 3 * se, mean + 3 * se, color=line.get_color(), alpha=0.15)
    return _finish(fig, ax, path, title or f"M = {result.config.M}")


@plt.rc_context(STYLE)
def plot_training(result, path, title=None):
    """Achieved rate of each training mode against the capacity curve."""
    fig, ax = new_figure()
    cfg = result.config
    ax.plot(cfg.snr_grid_db, result.capacity_mean, "k-", label="capacity")
    markers = {"full": "s", "dominant": "o"}
    for mode in cfg.modes:
        for L in cfg.Ls:
            ax.plot(
                cfg.snr_grid_db,
                result.mean(mode, L),
                linestyle="--",
                marker=markers.get(mode, "x"),
                label=f"{mode} training, L = {L}",
            )
    return _finish(fig, ax, path, title or f"M = {cfg.M}")
