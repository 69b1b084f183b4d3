"""Report figures: description-length traces and ablation comparisons."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def save_dl_trace(trace: list[float], path: str, title: str = "") -> None:
    """Render the total description length after each accepted change."""
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.step(range(len(trace)), trace, where="post", color="#1f77b4")
    ax.scatter(range(len(trace)), trace, s=12, color="#1f77b4")
    ax.set_xlabel("accepted changes")
    ax.set_ylabel("total description length (bits)")
    if title:
        ax.set_title(title)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_variant_chart(rows: list[dict[str, object]], path: str) -> None:
    """Grouped bars: compression and runtime per mining variant.

    rows are bench report rows; one group per dataset shape, one bar
    per variant.
    """
    variants = []
    for row in rows:
        name = str(row.get("variant", "?"))
        if name not in variants:
            variants.append(name)
    shapes = []
    for row in rows:
        shape = f"{row.get('|S|')}x{row.get('|s|')}x{row.get('|A|')}x{row.get('|V|')}"
        if shape not in shapes:
            shapes.append(shape)

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.8))
    width = 0.8 / max(1, len(variants))
    for vi, variant in enumerate(variants):
        xs, dl, t = [], [], []
        for si, shape in enumerate(shapes):
            for row in rows:
                row_shape = (
                    f"{row.get('|S|')}x{row.get('|s|')}x"
                    f"{row.get('|A|')}x{row.get('|V|')}"
                )
                if row.get("variant") == variant and row_shape == shape:
                    xs.append(si + vi * width)
                    dl.append(float(row.get("dL%", 0.0)))
                    t.append(float(row.get("t(s)", 0.0)))
        ax1.bar(xs, dl, width=width, label=variant)
        ax2.bar(xs, t, width=width, label=variant)
    offset = 0.4 - width / 2
    for ax, ylabel in ((ax1, "compression (dL%)"), (ax2, "runtime (s)")):
        ax.set_xticks([i + offset for i in range(len(shapes))])
        ax.set_xticklabels(shapes, rotation=20, fontsize=8)
        ax.set_ylabel(ylabel)
        ax.grid(True, axis="y", alpha=0.3)
    ax1.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
