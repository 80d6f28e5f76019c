"""Figure rendering for sweep reports.

One figure: y_th/sqrt(q) against q, one line per band count N, with the
closed-form prediction overlaid as dashed guides.  Rendering is headless
(Agg) so sweeps can run on batch machines.
"""

from __future__ import annotations

import math
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)


def render_sweep_figure(rows, path: str | os.PathLike, title: str | None = None) -> None:
    """Render sweep rows to an image file (format from the extension)."""
    rows = sorted(rows, key=lambda r: (r.n_bands, r.q))
    groups: dict[int, list] = {}
    for row in rows:
        groups.setdefault(row.n_bands, []).append(row)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for n_bands, cells in sorted(groups.items()):
        qs = [c.q for c in cells]
        ax.plot(
            qs,
            [c.y_th_over_sqrt_q for c in cells],
            marker="o",
            label=f"N = {n_bands}",
        )
        ax.plot(
            qs,
            [c.prediction / math.sqrt(c.q) for c in cells],
            linestyle="--",
            linewidth=0.9,
            color=ax.lines[-1].get_color(),
            alpha=0.6,
        )
    ax.set_xlabel("collapse parameter q")
    ax.set_ylabel(r"$|y|_{th} / \sqrt{q}$  [V]")
    ax.set_xticks(sorted({r.q for r in rows}))
    ax.grid(True, alpha=0.3)
    ax.legend(title="solid: Monte Carlo\ndashed: prediction", fontsize=9)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
