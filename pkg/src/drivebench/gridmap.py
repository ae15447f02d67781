"""Intervention occupancy grids and region-scoped metrics.

Every pose is paired with the engagement sample of nearest timestamp; the
grid counts the pairs that are disabled, either one count per disabled
sample (faithful to the cell-increment formulation, weighting long manual
periods more) or one per contiguous disabled run (one count per event).
Counts are normalized to [0, 1] by the maximum cell, with an all-zero grid
left at zeros.
"""
from __future__ import annotations

import io
import math
from bisect import bisect_left
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DegeneratePolygon, EmptyChannel, NonPositiveCellSize
from .geometry import point_in_polygon, polygon_area
from .metrics import MetricsReport, ModeTotals, compute_metrics, _segment_index_at
from .segmentation import AUTONOMOUS, MANUAL, Segment
from .telemetry import DriveLog, Pose

COUNT_MODES = ("sample", "edge")


@dataclass(frozen=True, slots=True)
class OccupancyGrid:
    """2-D cell counts plus normalized values and geometry metadata.

    counts is indexed [x_cell][y_cell]; origin is the world position of the
    corner of cell (0, 0).
    """

    origin: tuple[float, float]
    cell_size: float
    width: int
    height: int
    counts: np.ndarray
    normalized: np.ndarray
    count_mode: str


@dataclass(frozen=True, slots=True)
class Region:
    """Simple polygon in meters, implicitly closed."""

    polygon: tuple[tuple[float, float], ...]


def associate_dbw_pose(log: DriveLog) -> list[tuple[Pose, bool]]:
    """Pair each pose with the engagement sample of nearest timestamp.

    Ties go to the earlier sample.
    """
    if not log.poses:
        raise EmptyChannel("poses")
    if not log.engagement:
        raise EmptyChannel("engagement")
    times = [e.t for e in log.engagement]
    pairs: list[tuple[Pose, bool]] = []
    for pose in log.poses:
        i = bisect_left(times, pose.t)
        if i == 0:
            best = 0
        elif i == len(times):
            best = i - 1
        else:
            best = i - 1 if pose.t - times[i - 1] <= times[i] - pose.t else i
        pairs.append((pose, log.engagement[best].enabled))
    return pairs


def _disabled_cells(pairs, cell_size: float, anchor: tuple[float, float], count_mode: str) -> list[tuple[int, int]]:
    x0, y0 = anchor
    cells: list[tuple[int, int]] = []
    prev_enabled = True
    for pose, enabled in pairs:
        if not enabled and (count_mode == "sample" or prev_enabled):
            cells.append((math.floor((pose.x - x0) / cell_size), math.floor((pose.y - y0) / cell_size)))
        prev_enabled = enabled
    return cells


def _pose_cells(pairs, cell_size: float, anchor: tuple[float, float]) -> list[tuple[int, int]]:
    x0, y0 = anchor
    return [(math.floor((p.x - x0) / cell_size), math.floor((p.y - y0) / cell_size)) for p, _ in pairs]


def build_grid_multi(
    logs: Sequence[DriveLog],
    cell_size: float = 1.0,
    count_mode: str = "sample",
    origin: tuple[float, float] = (0.0, 0.0),
) -> OccupancyGrid:
    """Accumulate one grid over several logs (element-wise count addition)."""
    if cell_size <= 0:
        raise NonPositiveCellSize(f"cell_size must be > 0, got {cell_size}")
    if count_mode not in COUNT_MODES:
        raise ValueError(f"unknown count mode {count_mode!r}")
    all_cells: list[tuple[int, int]] = []
    hits: list[tuple[int, int]] = []
    for log in sorted(logs, key=lambda item: item.log_id):
        pairs = associate_dbw_pose(log)
        all_cells.extend(_pose_cells(pairs, cell_size, origin))
        hits.extend(_disabled_cells(pairs, cell_size, origin, count_mode))

    # The grid spans from the anchor corner through the trajectory extent,
    # extended downward only when data falls below the anchor, so default
    # cell indices coincide with floor(x), floor(y).
    ix_lo = min(0, min((c[0] for c in all_cells), default=0))
    iy_lo = min(0, min((c[1] for c in all_cells), default=0))
    ix_hi = max(0, max((c[0] for c in all_cells), default=0))
    iy_hi = max(0, max((c[1] for c in all_cells), default=0))
    width = ix_hi - ix_lo + 1
    height = iy_hi - iy_lo + 1
    counts = np.zeros((width, height), dtype=np.int64)
    for ix, iy in hits:
        counts[ix - ix_lo, iy - iy_lo] += 1
    peak = int(counts.max()) if counts.size else 0
    normalized = counts / peak if peak > 0 else np.zeros_like(counts, dtype=float)
    return OccupancyGrid(
        origin=(origin[0] + ix_lo * cell_size, origin[1] + iy_lo * cell_size),
        cell_size=cell_size,
        width=width,
        height=height,
        counts=counts,
        normalized=normalized,
        count_mode=count_mode,
    )


def build_grid(
    log: DriveLog,
    cell_size: float = 1.0,
    count_mode: str = "sample",
    origin: tuple[float, float] = (0.0, 0.0),
) -> OccupancyGrid:
    """Build the normalized intervention grid for one log."""
    return build_grid_multi([log], cell_size, count_mode, origin)


def _validate_region(region: Region) -> None:
    if len(region.polygon) < 3:
        raise DegeneratePolygon(f"polygon needs >= 3 vertices, got {len(region.polygon)}")
    if abs(polygon_area(region.polygon)) == 0.0:
        raise DegeneratePolygon("polygon has zero area")


def region_metrics(
    log: DriveLog,
    segments: Sequence[Segment],
    region: Region,
    method: str = "path",
    group_key: str = "region",
) -> MetricsReport:
    """MDBI/MTBI restricted to the part of the trip inside a polygon.

    A chord contributes when both endpoints are inside (boundary counts as
    inside); its distance and duration go to the mode of the segment
    containing the earlier pose. An intervention counts when the pose
    associated with its falling edge lies inside.
    """
    _validate_region(region)
    pairs = associate_dbw_pose(log)
    inside = [point_in_polygon((p.x, p.y), region.polygon) for p, _ in pairs]
    poses = [p for p, _ in pairs]

    distance = {MANUAL: 0.0, AUTONOMOUS: 0.0}
    uptime = {MANUAL: 0.0, AUTONOMOUS: 0.0}
    for j in range(1, len(poses)):
        if not (inside[j - 1] and inside[j]):
            continue
        idx = _segment_index_at(segments, poses[j - 1].t)
        if idx is None:
            continue
        mode = segments[idx].mode
        a, b = poses[j - 1], poses[j]
        if method == "speed":
            value = _speed_increment(log, a.t, b.t)
        else:
            value = math.sqrt((b.x - a.x) ** 2 + (b.y - a.y) ** 2 + (b.z - a.z) ** 2)
        distance[mode] += value
        uptime[mode] += b.t - a.t

    n = 0
    pose_times = [p.t for p in poses]
    for i, segment in enumerate(segments):
        if segment.mode != MANUAL or i == 0:
            continue
        j = _nearest_index(pose_times, segment.t_start)
        if inside[j]:
            n += 1

    totals = ModeTotals(distance[AUTONOMOUS], distance[MANUAL], uptime[AUTONOMOUS], uptime[MANUAL], n)
    return compute_metrics(totals, group_key)


def _speed_increment(log: DriveLog, t0: float, t1: float) -> float:
    measured = [s for s in log.speeds if s.kind == "measured"]
    return sum(s.v * (s.t - prev.t) for prev, s in zip(measured, measured[1:]) if t0 < s.t <= t1)


def _nearest_index(times: list[float], t: float) -> int:
    i = bisect_left(times, t)
    if i == 0:
        return 0
    if i == len(times):
        return len(times) - 1
    return i - 1 if t - times[i - 1] <= times[i] - t else i


def export_grid(grid: OccupancyGrid, fmt: str) -> bytes:
    """Render the grid as CSV (nonzero cells) or plain-text PGM (P2)."""
    if fmt == "csv":
        return _export_csv(grid)
    if fmt == "pgm":
        return _export_pgm(grid)
    raise ValueError(f"unknown grid format {fmt!r}")


def _export_csv(grid: OccupancyGrid) -> bytes:
    out = io.StringIO()
    out.write("x_index,y_index,count,normalized\n")
    for ix in range(grid.width):
        for iy in range(grid.height):
            count = int(grid.counts[ix, iy])
            if count:
                out.write(f"{ix},{iy},{count},{grid.normalized[ix, iy]:.6f}\n")
    return out.getvalue().encode("utf-8")


def _export_pgm(grid: OccupancyGrid) -> bytes:
    out = io.StringIO()
    out.write("P2\n")
    out.write(f"{grid.width} {grid.height}\n255\n")
    for iy in range(grid.height - 1, -1, -1):  # row 0 of the image is the highest y
        tokens = [str(int(math.floor(grid.normalized[ix, iy] * 255.0 + 0.5))) for ix in range(grid.width)]
        out.write(_wrap_tokens(tokens))
    return out.getvalue().encode("utf-8")


def _wrap_tokens(tokens: list[str], limit: int = 70) -> str:
    # Plain PGM readers may enforce a 70-character line limit.
    lines: list[str] = []
    current = ""
    for token in tokens:
        if current and len(current) + 1 + len(token) > limit:
            lines.append(current)
            current = token
        else:
            current = f"{current} {token}" if current else token
    lines.append(current)
    return "\n".join(lines) + "\n"


def parse_region(source) -> Region:
    """Read polygon vertices from `vertex,x,y` lines."""
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    if isinstance(source, str):
        source = io.StringIO(source)
    vertices: list[tuple[float, float]] = []
    for line_no, raw in enumerate(source, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(",")
        if parts[0] != "vertex" or len(parts) != 3:
            raise DegeneratePolygon(f"line {line_no}: expected vertex,x,y got {line!r}")
        try:
            vertices.append((float(parts[1]), float(parts[2])))
        except ValueError:
            raise DegeneratePolygon(f"line {line_no}: bad number in {line!r}") from None
    region = Region(tuple(vertices))
    _validate_region(region)
    return region
