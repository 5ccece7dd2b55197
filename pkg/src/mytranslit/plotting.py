"""Figures for evaluation reports, written to files with the Agg backend."""

from __future__ import annotations

from collections import Counter
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .corpus import Report  # noqa: E402

STYLE = {
    "font.size": 9,
    "axes.titlesize": 10,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "savefig.dpi": 120,
    "svg.hashsalt": "mytranslit",
}


def _save(fig, path: Path) -> Path:
    # fixed metadata keeps repeated runs byte-identical
    fig.savefig(path, metadata={"Date": None, "Creator": None} if path.suffix == ".svg" else {"Software": None})
    plt.close(fig)
    return path


def plot_accuracy(report: Report, path) -> Path:
    """Grouped bars of top-1 and top-k accuracy per language and overall."""
    path = Path(path)
    groups = sorted(report.per_lang) + ["all"]
    top1, topk = [], []
    for g in groups:
        if g == "all":
            top1.append(report.top1 or 0.0)
            topk.append(report.topk or 0.0)
        else:
            st = report.per_lang[g]
            top1.append(st.top1 / st.n if st.n else 0.0)
            topk.append(st.topk / st.n if st.n else 0.0)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(4.5, 3))
        xs = range(len(groups))
        ax.bar([x - 0.2 for x in xs], top1, width=0.4, label="top-1", color="#4c72b0")
        ax.bar([x + 0.2 for x in xs], topk, width=0.4, label=f"top-{report.k}", color="#dd8452")
        ax.axhline(0.8, color="grey", lw=0.8, ls="--")
        ax.set_xticks(list(xs))
        ax.set_xticklabels(groups)
        ax.set_ylim(0, 1.2)
        ax.set_ylabel("accuracy")
        ax.set_title(f"Corpus accuracy (n={report.n})")
        ax.legend(frameon=False, loc="upper left", ncol=2)
        fig.tight_layout()
        return _save(fig, path)


def plot_rule_blame(report: Report, path, top: int = 12) -> Path:
    """Horizontal bars counting how often each rule appears in failure traces."""
    path = Path(path)
    counts: Counter = Counter()
    for f in report.failures:
        counts.update({r.rpartition("#")[0] for r in f.divergent_rules})
    items = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))[:top]
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(6.5, 0.3 * max(len(items), 3) + 1))
        if items:
            labels = [name if len(name) < 48 else name[:45] + "..." for name, _ in items][::-1]
            ax.barh(range(len(items)), [c for _, c in items][::-1], color="#55a868")
            ax.set_yticks(range(len(items)))
            ax.set_yticklabels(labels, fontsize=7)
            ax.set_xlabel("failures citing the rule")
        else:
            ax.text(0.5, 0.5, "no failures", ha="center", va="center", transform=ax.transAxes)
            ax.set_axis_off()
        ax.set_title("Rules on diverging derivations")
        fig.tight_layout()
        return _save(fig, path)


def write_figures(report: Report, directory) -> list[Path]:
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    return [
        plot_accuracy(report, out / "accuracy.png"),
        plot_rule_blame(report, out / "rule_blame.png"),
    ]
