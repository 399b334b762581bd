"""Render sweep results to figure files alongside the CSV output."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .harness import SweepResult

METHOD_STYLES = {
    "sadce": dict(color="tab:blue", marker="o"),
    "ls": dict(color="tab:orange", marker="s"),
    "music3d": dict(color="tab:green", marker="^"),
}
_RMSE_PANELS = (
    ("rmse_u", "RMSE of u"),
    ("rmse_v", "RMSE of v"),
    ("rmse_r_m", "RMSE of range (m)"),
)


def _series(result: SweepResult, method: str, x_key: str, y_key: str):
    xs, ys = [], []
    for row in result.rows:
        if row["method"] != method:
            continue
        y = row[y_key]
        if y is None or (isinstance(y, float) and not np.isfinite(y)):
            continue
        xs.append(row[x_key])
        ys.append(y)
    return xs, ys


def render_sweep_figure(result: SweepResult, out_path) -> Path:
    """One figure per sweep: 2x2 accuracy panels vs SNR, or NMSE vs pilot length."""
    out_path = Path(out_path)
    pilot_lens = {row["pilot_len"] for row in result.rows}
    pilot_sweep = len(pilot_lens) > 1

    if pilot_sweep:
        fig, ax = plt.subplots(figsize=(5.0, 3.6))
        for method in result.methods:
            xs, ys = _series(result, method, "pilot_len", "nmse_db")
            if xs:
                ax.plot(xs, ys, label=method, **METHOD_STYLES.get(method, {}))
        ax.set_xscale("log", base=2)
        ax.set_xticks(sorted(pilot_lens))
        ax.set_xticklabels([str(int(x)) for x in sorted(pilot_lens)])
        ax.set_xlabel("pilot length L")
        ax.set_ylabel("channel NMSE (dB)")
        ax.grid(True, alpha=0.4)
        ax.legend()
    else:
        fig, axes = plt.subplots(2, 2, figsize=(9.0, 6.4))
        for (key, label), ax in zip(_RMSE_PANELS, axes.flat):
            for method in result.methods:
                xs, ys = _series(result, method, "snr_db", key)
                if xs:
                    ax.semilogy(xs, ys, label=method, **METHOD_STYLES.get(method, {}))
            ax.set_xlabel("SNR (dB)")
            ax.set_ylabel(label)
            ax.grid(True, which="both", alpha=0.4)
            ax.legend()
        ax = axes.flat[3]
        for method in result.methods:
            xs, ys = _series(result, method, "snr_db", "nmse_db")
            if xs:
                ax.plot(xs, ys, label=method, **METHOD_STYLES.get(method, {}))
        ax.set_xlabel("SNR (dB)")
        ax.set_ylabel("channel NMSE (dB)")
        ax.grid(True, alpha=0.4)
        ax.legend()

    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path
