"""Matplotlib rendering of derivation trees and check-report summaries."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .engine import DerivationTree
from .verifier import CheckReport

_LEAF_COLORS = {
    "SUCCESS": "#2e7d32",
    "FAIL": "#c62828",
    "FLOUNDER": "#ef6c00",
    "CUTOFF": "#6a1b9a",
    None: "#37474f",
}


def tree_figure(tree: DerivationTree, max_label: int = 40):
    """Draw the derivation tree: one box per node, edges labelled by rule."""
    positions = _layout(tree)
    fig_w = max(6.0, 2.2 * (max(x for x, _ in positions.values()) + 1))
    fig_h = max(4.0, 1.1 * (max(n.depth for n in tree.nodes) + 1))
    fig, ax = plt.subplots(figsize=(min(fig_w, 40), min(fig_h, 30)))
    ax.axis("off")
    for node in tree.nodes:
        x, y = positions[node.node_id]
        for edge in node.edges:
            if edge.child is None:
                continue
            cx, cy = positions[edge.child]
            ax.plot([x, cx], [y, cy], color="#90a4ae", zorder=1, linewidth=0.8)
            ax.annotate(
                edge.rule_label,
                ((x + cx) / 2, (y + cy) / 2),
                fontsize=6,
                color="#546e7a",
                ha="center",
            )
    for node in tree.nodes:
        x, y = positions[node.node_id]
        label = ", ".join(str(q) for q in node.query) or "(empty)"
        if len(label) > max_label:
            label = label[: max_label - 3] + "..."
        if node.leaf:
            label += "\n" + node.leaf
        ax.annotate(
            label,
            (x, y),
            fontsize=7,
            ha="center",
            va="center",
            zorder=2,
            bbox=dict(
                boxstyle="round,pad=0.25",
                fc="white",
                ec=_LEAF_COLORS.get(node.leaf, "#37474f"),
                linewidth=1.0,
            ),
        )
    ax.set_title("derivation tree: %s" % ", ".join(str(q) for q in tree.root), fontsize=9)
    fig.tight_layout()
    return fig


def _layout(tree: DerivationTree) -> dict:
    children = {
        n.node_id: [e.child for e in n.edges if e.child is not None] for n in tree.nodes
    }
    positions: dict = {}
    next_x = 0.0
    if not tree.nodes:
        return positions
    # post-order with an explicit stack: leaves take successive x slots,
    # inner nodes center over their children
    stack = [(tree.nodes[0].node_id, 0, False)]
    while stack:
        node_id, depth, expanded = stack.pop()
        kids = children.get(node_id, [])
        if not kids:
            positions[node_id] = (next_x, -depth)
            next_x += 1.0
            continue
        if expanded:
            xs = [positions[k][0] for k in kids]
            positions[node_id] = (sum(xs) / len(xs), -depth)
        else:
            stack.append((node_id, depth, True))
            stack.extend((k, depth + 1, False) for k in reversed(kids))
    return positions


def save_tree_png(tree: DerivationTree, path: str):
    fig = tree_figure(tree)
    fig.savefig(path, dpi=150)
    plt.close(fig)


def report_figure(report: CheckReport):
    """Summarize a check report: witness counts grouped by rule/predicate."""
    groups: dict = {}
    for w in report.witnesses:
        key = getattr(w, "rule_label", None) or getattr(w, "functor", "witness")
        groups[key] = groups.get(key, 0) + 1
    fig, ax = plt.subplots(figsize=(7, 4))
    if groups:
        keys = sorted(groups)
        ax.bar(range(len(keys)), [groups[k] for k in keys], color="#c62828")
        ax.set_xticks(range(len(keys)))
        ax.set_xticklabels(keys, rotation=30, ha="right", fontsize=8)
        ax.set_ylabel("witnesses")
    else:
        ax.text(0.5, 0.5, "no witnesses", ha="center", va="center", fontsize=12)
        ax.set_xticks(())
        ax.set_yticks(())
    checked = report.stats.get("instances_checked", 0)
    ax.set_title(
        "%s %s: %s (bound %d, %d checked)"
        % (report.check, report.subject, report.verdict, report.bound, checked),
        fontsize=9,
    )
    fig.tight_layout()
    return fig


def save_report_png(report: CheckReport, path: str):
    fig = report_figure(report)
    fig.savefig(path, dpi=150)
    plt.close(fig)
