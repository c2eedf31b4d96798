"""
SVG line chart of cost vs δ: one panel per probability source, one curve per
scale, with the (T - 1) δ worst-case line and each curve's main bound overlaid.
"""
from __future__ import annotations

import math
from collections import defaultdict
from pathlib import Path
from typing import Dict, Iterable, List

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from feeddiv.errors import InputOutputError  # noqa: E402
from feeddiv.schemas import FrontierRow  # noqa: E402


def plot_frontier(rows: Iterable[FrontierRow], path: Path | str, n_types: int) -> Path:
    path = Path(path)
    panels: Dict[str, Dict[float, List[FrontierRow]]] = defaultdict(lambda: defaultdict(list))
    for row in rows:
        panels[row.prob_source][row.scale].append(row)
    sources = sorted(panels)
    if not sources:
        raise InputOutputError("no frontier rows to plot")

    columns = min(2, len(sources))
    nrows = math.ceil(len(sources) / columns)
    plt.rcParams["svg.hashsalt"] = "feeddiv"
    fig, axes = plt.subplots(nrows, columns, figsize=(5.5 * columns, 4.0 * nrows), squeeze=False)
    colors = plt.rcParams["axes.prop_cycle"].by_key()["color"]

    for ax, source in zip(axes.flat, sources):
        deltas = sorted({r.delta for curve in panels[source].values() for r in curve})
        ax.plot(deltas, [(n_types - 1) * d for d in deltas], color="tab:blue", linewidth=2.0,
                label="worst case (T-1)δ")
        for idx, scale in enumerate(sorted(panels[source])):
            curve = sorted(panels[source][scale], key=lambda r: r.delta)
            color = colors[(idx + 1) % len(colors)]
            xs = [r.delta for r in curve]
            ax.plot(xs, [r.cost for r in curve], marker="o", markersize=3, color=color,
                    label=f"scale {scale:g}")
            if all(r.bound_main is not None for r in curve):
                ax.plot(xs, [r.bound_main for r in curve], linestyle=":", color=color, linewidth=1.0)
        ax.set_title(source)
        ax.set_xlabel("δ")
        ax.set_ylabel("1 - OPT^δ / OPT^eng")
        ax.grid(alpha=0.3)
        ax.legend(fontsize=8)
    for ax in list(axes.flat)[len(sources):]:
        ax.set_visible(False)

    fig.tight_layout()
    try:
        fig.savefig(path, format="svg", metadata={"Date": None})
    except OSError as exc:
        raise InputOutputError(f"cannot write chart {path}: {exc}") from exc
    finally:
        plt.close(fig)
    return path
