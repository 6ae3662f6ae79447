"""Scatter plots of Betti multisets on the grade grid."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .grid_module import BettiTable  # noqa: E402

# one marker/colour per homological degree; offsets keep coincident grades apart
STYLES = (
    ("o", "#2b8cbe", (-0.15, 0.0)),
    ("s", "#e34a33", (0.15, 0.0)),
    ("^", "#31a354", (0.0, 0.15)),
)

RC = {
    "font.size": 8,
    "axes.labelsize": 9,
    "legend.fontsize": 7,
    "figure.figsize": (3.4, 3.4),
    "lines.markersize": 6,
    "svg.hashsalt": "betti2p",
    "svg.fonttype": "none",
}


def plot_betti(table: BettiTable, path: str, title: str = "", box: tuple[int, int] | None = None) -> None:
    """Write a scatter of xi_0, xi_1, xi_2 to ``path`` (format from the extension).

    Multiplicities above one are printed next to the marker.  Output is
    reproducible: no timestamps and a fixed id salt.
    """
    with plt.rc_context(RC):
        fig, ax = plt.subplots()
        xmax = ymax = 1
        for j, (marker, colour, (dx, dy)) in enumerate(STYLES):
            items = table[j].items()
            if not items:
                continue
            xs = [g.x + dx for g, _ in items]
            ys = [g.y + dy for g, _ in items]
            ax.scatter(xs, ys, marker=marker, color=colour, label=f"$\\xi_{j}$", zorder=3)
            for (g, k), x, y in zip(items, xs, ys):
                if k > 1:
                    ax.annotate(str(k), (x, y), textcoords="offset points", xytext=(3, 3), fontsize=6)
            xmax = max(xmax, max(g.x for g, _ in items))
            ymax = max(ymax, max(g.y for g, _ in items))
        if box is not None:
            xmax, ymax = max(xmax, box[0]), max(ymax, box[1])
        ax.set_xlim(-0.6, xmax + 0.6)
        ax.set_ylim(-0.6, ymax + 0.6)
        ax.set_xticks(range(xmax + 1))
        ax.set_yticks(range(ymax + 1))
        ax.set_aspect("equal")
        ax.grid(True, color="#dddddd", linewidth=0.5, zorder=0)
        ax.set_xlabel("$x$")
        ax.set_ylabel("$y$")
        if title:
            ax.set_title(title)
        if any(table[j] for j in range(3)):
            ax.legend(loc="upper right")
        fig.tight_layout()
        fig.savefig(path, metadata={"Date": None} if str(path).endswith(".svg") else None)
        plt.close(fig)
