"""Static SVG figures for sweep CSVs: efficiency curves and MAE scatter plots."""

from __future__ import annotations

from collections import defaultdict
from math import isinf
from typing import Iterable, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .harness import SweepRecord

_EFFICIENCY_STATS = ("mean_d_global", "mean_d_local", "mean_e_global", "mean_e_local")
_MAE_STATS = ("min_mae", "mean_mae")


class PlotError(ValueError):
    """Requested series are missing from the CSV records."""


def available_statistics(records: Iterable[SweepRecord]) -> list[str]:
    return sorted({r.statistic for r in records})


def _series(records: Iterable[SweepRecord], statistics: Sequence[str]):
    """Map (network, definition, statistic, checkpoint) -> sorted (k, value) pairs."""
    table = defaultdict(dict)
    for r in records:
        if r.statistic in statistics:
            table[(r.network, r.definition, r.statistic, r.checkpoint)][r.n_rewire] = r.value
    return {
        key: sorted(points.items())
        for key, points in table.items()
    }


def _plot_with_inf_cap(ax, ks, values, label):
    """Line plot that renders infinite values as capped, annotated markers."""
    finite = [(k, v) for k, v in zip(ks, values) if not isinf(v)]
    infinite_ks = [k for k, v in zip(ks, values) if isinf(v)]
    line = ax.plot(
        [k for k, _ in finite],
        [v for _, v in finite],
        marker="o",
        markersize=4,
        label=label,
    )[0]
    if infinite_ks:
        finite_vals = [v for _, v in finite]
        cap = 1.1 * max(finite_vals) if finite_vals else 1.0
        ax.plot(
            infinite_ks,
            [cap] * len(infinite_ks),
            linestyle="none",
            marker="^",
            markersize=7,
            color=line.get_color(),
        )
        for k in infinite_ks:
            ax.annotate("inf", (k, cap), textcoords="offset points", xytext=(0, 6), ha="center")


def render_efficiency_figure(records: Sequence[SweepRecord], out_path) -> None:
    """Connectivity lengths (top) and efficiencies (bottom) vs rewire count.

    One row pair per network; one line per (definition, statistic).
    """
    series = _series(records, _EFFICIENCY_STATS)
    if not series:
        raise PlotError(
            "no efficiency series in CSV; available statistics: "
            + ", ".join(available_statistics(records))
        )
    networks = sorted({network for network, _, _, _ in series})
    fig, axes = plt.subplots(
        2 * len(networks), 1, figsize=(7, 5 * len(networks)), squeeze=False
    )
    for row, network in enumerate(networks):
        ax_d, ax_e = axes[2 * row][0], axes[2 * row + 1][0]
        for (net, definition, statistic, _), points in sorted(series.items()):
            if net != network:
                continue
            ks = [k for k, _ in points]
            values = [v for _, v in points]
            label = f"{statistic} ({definition})" if definition else statistic
            if statistic.startswith("mean_d"):
                _plot_with_inf_cap(ax_d, ks, values, label)
            else:
                ax_e.plot(ks, values, marker="o", markersize=4, label=label)
        ax_d.set_title(f"{network}: connectivity lengths")
        ax_d.set_ylabel("D")
        ax_e.set_title(f"{network}: efficiencies")
        ax_e.set_ylabel("E")
        ax_e.set_ylim(-0.05, 1.05)
        for ax in (ax_d, ax_e):
            ax.set_xlabel("number of rewired connections")
            ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out_path, format="svg")
    plt.close(fig)


def render_mae_figure(records: Sequence[SweepRecord], out_path) -> None:
    """Min (open squares) and mean (filled squares) MAE vs rewire count.

    One panel per (network, checkpoint) combination.
    """
    series = _series(records, _MAE_STATS)
    if not series:
        raise PlotError(
            "no MAE series in CSV; available statistics: "
            + ", ".join(available_statistics(records))
        )
    panels = sorted({(network, checkpoint) for network, _, _, checkpoint in series})
    fig, axes = plt.subplots(
        len(panels), 1, figsize=(7, 3.2 * len(panels)), squeeze=False
    )
    for row, (network, checkpoint) in enumerate(panels):
        ax = axes[row][0]
        for statistic, face in (("min_mae", "none"), ("mean_mae", "black")):
            points = series.get((network, "", statistic, checkpoint))
            if not points:
                continue
            ax.scatter(
                [k for k, _ in points],
                [v for _, v in points],
                marker="s",
                facecolors=face,
                edgecolors="black",
                label=statistic,
            )
        ax.set_title(f"{network} at {checkpoint} iterations")
        ax.set_xlabel("number of rewired connections")
        ax.set_ylabel("MAE")
        ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out_path, format="svg")
    plt.close(fig)
