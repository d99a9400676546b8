"""Figures for the report subcommands, rendered straight to image files."""

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def _save(fig, path):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    fig.tight_layout()
    # no version stamp, so identical data gives identical bytes
    fig.savefig(path, dpi=120, format="png", metadata={"Software": None})
    plt.close(fig)
    return path


def loss_curves(histories, path, title="Training curves"):
    """``histories`` maps a label to ``(train_losses, dev_losses)``."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for k, (label, (tr, dev)) in enumerate(histories.items()):
        color = f"C{k}"
        epochs = np.arange(1, len(tr) + 1)
        ax.plot(epochs, tr, color=color, label=f"{label} train")
        ax.plot(epochs, dev, color=color, linestyle="--", label=f"{label} dev")
    ax.set_xlabel("epoch")
    ax.set_ylabel("mean CRF negative log-likelihood")
    ax.set_title(title)
    ax.legend(fontsize=8)
    return _save(fig, path)


def strategy_f1(results, path, labels=None):
    """Grouped bars of F1 per fusion strategy and test set."""
    labels = labels or {}
    test_names = list(results[0].scores)
    width = 0.8 / len(test_names)
    x = np.arange(len(results))
    fig, ax = plt.subplots(figsize=(6, 4))
    for j, name in enumerate(test_names):
        ax.bar(x + j * width, [100 * r.scores[name].f1 for r in results], width, label=name)
    ax.set_xticks(x + width * (len(test_names) - 1) / 2)
    ax.set_xticklabels([labels.get(r.strategy, r.strategy) for r in results])
    ax.set_ylabel("F1 (%)")
    ax.set_ylim(0, 100)
    ax.legend()
    return _save(fig, path)


def trend_recall(rows, path):
    """Per-seed recall on the substituted test set, pure semantic vs fused."""
    seeds = [r.seed for r in rows]
    x = np.arange(len(rows))
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(x - 0.2, [100 * r.pure.recall for r in rows], 0.4, label="semantic only")
    ax.bar(x + 0.2, [100 * r.mfe.recall for r in rows], 0.4, label="semantic + glyph + phonetic")
    ax.set_xticks(x)
    ax.set_xticklabels([str(s) for s in seeds])
    ax.set_xlabel("seed")
    ax.set_ylabel("recall on substituted test (%)")
    ax.set_ylim(0, 100)
    ax.legend()
    return _save(fig, path)
