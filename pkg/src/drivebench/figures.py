"""Matplotlib renderings of grids, spectra and road compositions.

Figures are written next to the delimited outputs by the report command.
Rendering is kept deterministic: fixed dpi, fixed PNG metadata, no
wall-clock anywhere.
"""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .gridmap import OccupancyGrid
from .roads import ROAD_TYPES, TripComposition
from .spectrum import Spectrum

_SAVEFIG_KWARGS = {"dpi": 150, "metadata": {"Software": "drivebench"}}


def save_grid_figure(grid: OccupancyGrid, path) -> None:
    """Color-gradient view of the normalized intervention counts."""
    x0, y0 = grid.origin
    extent = (x0, x0 + grid.width * grid.cell_size, y0, y0 + grid.height * grid.cell_size)
    fig, ax = plt.subplots(figsize=(6, 5))
    image = ax.imshow(grid.normalized.T, origin="lower", extent=extent, cmap="inferno", interpolation="nearest")
    fig.colorbar(image, ax=ax, label="normalized interventions")
    ax.set_xlabel("x (m)")
    ax.set_ylabel("y (m)")
    ax.set_title(f"Intervention map ({grid.count_mode} mode, {grid.cell_size:g} m cells)")
    fig.savefig(path, **_SAVEFIG_KWARGS)
    plt.close(fig)


def save_spectrum_figure(auto: Spectrum, manual: Spectrum, channel: str, path) -> None:
    """Autonomous vs manual magnitude spectra of one control channel."""
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(auto.frequencies(), auto.magnitudes, label="autonomous", color="tab:blue")
    ax.plot(manual.frequencies(), manual.magnitudes, label="manual", color="tab:orange")
    ax.set_xlabel("frequency (Hz)")
    ax.set_ylabel("magnitude")
    ax.set_title(f"{channel} spectrum by driving mode")
    ax.legend()
    fig.savefig(path, **_SAVEFIG_KWARGS)
    plt.close(fig)


def save_composition_figure(compositions: dict[str, TripComposition], path) -> None:
    """Distance per road type, one bar group per log."""
    labels = sorted(compositions)
    x = np.arange(len(labels))
    bar_width = 0.8 / (len(ROAD_TYPES) + 1)
    fig, ax = plt.subplots(figsize=(max(6, 1.5 * len(labels)), 4))
    for i, road_type in enumerate(ROAD_TYPES):
        heights = [compositions[label].distances.get(road_type, 0.0) for label in labels]
        ax.bar(x + i * bar_width, heights, bar_width, label=road_type)
    unmatched = [compositions[label].unmatched_distance for label in labels]
    ax.bar(x + len(ROAD_TYPES) * bar_width, unmatched, bar_width, label="unmatched", color="0.6")
    ax.set_xticks(x + 2 * bar_width)
    ax.set_xticklabels(labels, rotation=20, ha="right")
    ax.set_ylabel("distance (m)")
    ax.set_title("Trip composition by road type")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, **_SAVEFIG_KWARGS)
    plt.close(fig)
