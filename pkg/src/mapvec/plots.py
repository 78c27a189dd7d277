"""Headless figure rendering for evaluation reports and jitter sweeps.

Figures are rendered with the Agg backend at fixed size/dpi and saved
without a Software tag so the PNG bytes are reproducible run to run.
"""

from __future__ import annotations

from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .evaluation import CHAMFER_THRESHOLDS, EvalReport

_SAVE_KWARGS = {"dpi": 110, "metadata": {"Software": None}}


def render_eval_figure(report: EvalReport, path: str) -> None:
    """Grouped AP bars per class and threshold, with the mAP line."""
    labels = list(report.class_ap.keys())
    x = np.arange(len(labels))
    width = 0.8 / (len(CHAMFER_THRESHOLDS) + 1)

    fig, ax = plt.subplots(figsize=(7.0, 4.0))
    for t_idx, tau in enumerate(CHAMFER_THRESHOLDS):
        values = [
            report.class_ap_by_threshold[label][tau] or 0.0 for label in labels
        ]
        ax.bar(x + t_idx * width, values, width, label=f"AP@{tau:g}m")
    means = [report.class_ap[label] or 0.0 for label in labels]
    ax.bar(
        x + len(CHAMFER_THRESHOLDS) * width,
        means,
        width,
        label="class mean",
        color="0.3",
    )
    ax.axhline(report.mean_ap, color="crimson", linestyle="--", linewidth=1.0)
    ax.set_xticks(x + 1.5 * width)
    ax.set_xticklabels(labels, fontsize=9)
    ax.set_ylim(0.0, 1.05)
    ax.set_ylabel("average precision")
    acd_txt = "n/a" if report.acd is None else f"{report.acd:.3f} m"
    ax.set_title(f"mAP = {report.mean_ap:.4f}   ACD = {acd_txt}")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KWARGS)
    plt.close(fig)


def render_sweep_figure(rows: Sequence, path: str) -> None:
    """Loss and detection metrics as functions of the jitter amplitude."""
    sigmas = [r.sigma for r in rows]
    fig, (ax_loss, ax_det) = plt.subplots(1, 2, figsize=(9.0, 4.0))

    ax_loss.plot(sigmas, [r.mean_vddl for r in rows], marker="o", color="tab:blue")
    ax_loss.set_xlabel("jitter sigma (m)")
    ax_loss.set_ylabel("mean direction loss")
    ax_loss.grid(True, alpha=0.3)

    ax_det.plot(
        sigmas, [r.mean_map for r in rows], marker="o", color="tab:green", label="mAP"
    )
    acd_pts = [(r.sigma, r.mean_acd) for r in rows if r.mean_acd is not None]
    if acd_pts:
        ax_acd = ax_det.twinx()
        ax_acd.plot(
            [p[0] for p in acd_pts],
            [p[1] for p in acd_pts],
            marker="s",
            color="tab:orange",
            label="ACD",
        )
        ax_acd.set_ylabel("ACD (m)")
    ax_det.set_xlabel("jitter sigma (m)")
    ax_det.set_ylabel("mAP")
    ax_det.set_ylim(-0.05, 1.05)
    ax_det.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KWARGS)
    plt.close(fig)
