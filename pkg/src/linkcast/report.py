"""Render training diagnostics as figures plus matching delimited tables.

Every figure written here has a tab-separated sibling carrying the same
numbers, so reports stay diffable and scriptable.  Rendering uses the Agg
backend; no display is required.
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .gbdt import GBDTModel
from .metrics import ScoredPairs

_TOP_FEATURES = 25
_HIST_BINS = 40


def write_feature_importance(model: GBDTModel, out_dir) -> list[str]:
    """Total-gain importances, descending; full table, top-N bar chart."""
    order = np.argsort(model.feature_importance, kind="stable")[::-1]
    tsv = os.path.join(out_dir, "feature_importance.tsv")
    with open(tsv, "w", encoding="utf-8") as fh:
        fh.write("feature\timportance\n")
        for j in order:
            fh.write(f"{model.column_names[j]}\t{model.feature_importance[j]:.12g}\n")

    top = order[: _TOP_FEATURES][::-1]  # horizontal bars read bottom-up
    fig, ax = plt.subplots(figsize=(8, max(3, 0.3 * top.size)))
    ax.barh(np.arange(top.size), model.feature_importance[top])
    ax.set_yticks(np.arange(top.size))
    ax.set_yticklabels([model.column_names[j] for j in top], fontsize=7)
    ax.set_xlabel("total split gain")
    ax.set_title("feature importance")
    fig.tight_layout()
    png = os.path.join(out_dir, "feature_importance.png")
    fig.savefig(png, dpi=120)
    plt.close(fig)
    return [tsv, png]


def write_training_curve(model: GBDTModel, out_dir) -> list[str]:
    """Per-round training logloss and, when present, validation AUC."""
    rounds = np.arange(1, len(model.train_logloss) + 1)
    has_valid = model.valid_auc is not None
    tsv = os.path.join(out_dir, "training_curve.tsv")
    with open(tsv, "w", encoding="utf-8") as fh:
        fh.write("round\ttrain_logloss" + ("\tvalid_auc\n" if has_valid else "\n"))
        for i, r in enumerate(rounds):
            row = f"{r}\t{model.train_logloss[i]:.12g}"
            if has_valid:
                row += f"\t{model.valid_auc[i]:.12g}"
            fh.write(row + "\n")

    fig, ax = plt.subplots(figsize=(8, 4.5))
    ax.plot(rounds, model.train_logloss, label="train logloss")
    ax.set_xlabel("round")
    ax.set_ylabel("logloss")
    if has_valid:
        ax2 = ax.twinx()
        ax2.plot(rounds, model.valid_auc, color="tab:orange", label="valid AUC")
        ax2.set_ylabel("AUC")
        ax2.axvline(model.best_round, color="tab:gray", linestyle=":", linewidth=1)
    ax.set_title(f"training curve (best round {model.best_round})")
    fig.legend(loc="lower center", ncol=2, frameon=False)
    fig.tight_layout(rect=(0, 0.06, 1, 1))
    png = os.path.join(out_dir, "training_curve.png")
    fig.savefig(png, dpi=120)
    plt.close(fig)
    return [tsv, png]


def write_score_histogram(scored: ScoredPairs, labels, out_dir) -> list[str]:
    """Score distribution; with labels, one histogram per class."""
    edges = np.linspace(0.0, 1.0, _HIST_BINS + 1)
    scores = scored.scores
    if labels is not None:
        labels = np.asarray(labels)
        groups = [("positive", scores[labels == 1]), ("negative", scores[labels == 0])]
    else:
        groups = [("all", scores)]
    counts = {name: np.histogram(vals, bins=edges)[0] for name, vals in groups}

    tsv = os.path.join(out_dir, "score_histogram.tsv")
    with open(tsv, "w", encoding="utf-8") as fh:
        fh.write("bin_lo\tbin_hi\t" + "\t".join(counts) + "\n")
        for b in range(_HIST_BINS):
            row = f"{edges[b]:.6g}\t{edges[b + 1]:.6g}"
            for name in counts:
                row += f"\t{counts[name][b]}"
            fh.write(row + "\n")

    fig, ax = plt.subplots(figsize=(8, 4.5))
    centers = (edges[:-1] + edges[1:]) / 2
    for name, _ in groups:
        ax.step(centers, counts[name], where="mid", label=name)
    ax.set_xlabel("score")
    ax.set_ylabel("pairs")
    ax.set_title("score distribution")
    ax.legend(frameon=False)
    fig.tight_layout()
    png = os.path.join(out_dir, "score_histogram.png")
    fig.savefig(png, dpi=120)
    plt.close(fig)
    return [tsv, png]


def generate_report(model: GBDTModel, out_dir, scored=None, labels=None) -> list[str]:
    """Write all applicable report artifacts into ``out_dir``; returns the
    written paths."""
    os.makedirs(out_dir, exist_ok=True)
    written = write_feature_importance(model, out_dir)
    written += write_training_curve(model, out_dir)
    if scored is not None:
        written += write_score_histogram(scored, labels, out_dir)
    return written
