"""Typed road segments, pose matching, and per-road-type trip breakdowns.

Road types: dynamic (no lane definitions, shared with pedestrians),
regular (public road with right-of-way rules), freeway (continuous lanes,
no intersections), private (controlled test and development areas). Each
segment carries a speed limit. Trips are attributed chord by chord to the
segment nearest the chord midpoint.
"""
from __future__ import annotations

import io
import logging
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from typing import Sequence

from .errors import DuplicateId, EmptyChannel, EmptyNetwork, MalformedSegment, UnknownRoadType
from .geometry import point_polyline_distance, polyline_length
from .metrics import MetricsReport, ModeTotals, compute_metrics, _segment_index_at
from .segmentation import AUTONOMOUS, MANUAL, Segment
from .telemetry import DriveLog

logger = logging.getLogger(__name__)

ROAD_TYPES = ("dynamic", "regular", "freeway", "private")

DEFAULT_MATCH_TOLERANCE = 5.0  # meters; campus-scale localization error bound

# Returned by match_pose when nothing lies within tolerance.
UNMATCHED = None


@dataclass(frozen=True, slots=True)
class RoadSegment:
    id: str
    road_type: str
    polyline: tuple[tuple[float, float], ...]
    speed_limit: float


@dataclass(frozen=True, slots=True)
class RoadNetwork:
    segments: tuple[RoadSegment, ...]

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for segment in self.segments:
            if segment.id in seen:
                raise DuplicateId(segment.id)
            seen.add(segment.id)


@dataclass(frozen=True, slots=True)
class TripComposition:
    """Distance per road type, fractions over matched distance, and the rest."""

    distances: dict[str, float]
    fractions: dict[str, float]
    unmatched_distance: float

    @property
    def matched_distance(self) -> float:
        return sum(self.distances.values())

    @property
    def private_distance(self) -> float:
        # Controlled test-area travel, reported separately from road types
        # that reflect realistic and uncontrolled environments.
        return self.distances.get("private", 0.0)


@dataclass(frozen=True, slots=True)
class ComplianceResult:
    violations: tuple[tuple[float, float, float], ...]  # (t, v, limit)
    skipped: int


def load_network(source) -> RoadNetwork:
    """Read the line-oriented network format.

    `segment,<id>,<type>,<speed_limit_mps>` introduces a segment; the
    `pt,x,y` lines that follow are its polyline until the next segment.
    """
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    if isinstance(source, str):
        source = io.StringIO(source)
    segments: list[RoadSegment] = []
    current: dict | None = None

    def finish(line_no: int) -> None:
        if current is None:
            return
        points = current["points"]
        if len(points) < 2:
            raise MalformedSegment(line_no, f"segment {current['id']!r} has {len(points)} point(s), need >= 2")
        if polyline_length(points) <= 0.0:
            raise MalformedSegment(line_no, f"segment {current['id']!r} has zero length")
        segments.append(RoadSegment(current["id"], current["type"], tuple(points), current["limit"]))

    line_no = 0
    for line_no, raw in enumerate(source, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(",")
        if parts[0] == "segment":
            finish(line_no)
            if len(parts) != 4:
                raise MalformedSegment(line_no, f"expected segment,<id>,<type>,<speed_limit>, got {line!r}")
            seg_id, road_type, limit_text = parts[1], parts[2], parts[3]
            if road_type not in ROAD_TYPES:
                raise UnknownRoadType(road_type)
            try:
                limit = float(limit_text)
            except ValueError:
                raise MalformedSegment(line_no, f"bad speed limit {limit_text!r}") from None
            if limit <= 0:
                raise MalformedSegment(line_no, f"speed limit must be > 0, got {limit}")
            current = {"id": seg_id, "type": road_type, "limit": limit, "points": []}
        elif parts[0] == "pt":
            if current is None:
                raise MalformedSegment(line_no, "pt line before any segment line")
            if len(parts) != 3:
                raise MalformedSegment(line_no, f"expected pt,x,y, got {line!r}")
            try:
                current["points"].append((float(parts[1]), float(parts[2])))
            except ValueError:
                raise MalformedSegment(line_no, f"bad coordinate in {line!r}") from None
        else:
            raise MalformedSegment(line_no, f"unrecognized line {line!r}")
    finish(line_no + 1)
    return RoadNetwork(tuple(segments))


def match_point(network: RoadNetwork, point: tuple[float, float], tolerance: float = DEFAULT_MATCH_TOLERANCE) -> str | None:
    """Id of the nearest segment within tolerance, ties to the smallest id."""
    if not network.segments:
        raise EmptyNetwork("road network has no segments")
    if tolerance <= 0:
        raise ValueError("tolerance must be > 0")
    best_id: str | None = None
    best = float("inf")
    for segment in network.segments:
        d = point_polyline_distance(point, segment.polyline)
        if d < best or (d == best and best_id is not None and segment.id < best_id):
            best, best_id = d, segment.id
    return best_id if best <= tolerance else UNMATCHED


def match_pose(network: RoadNetwork, pose, tolerance: float = DEFAULT_MATCH_TOLERANCE) -> str | None:
    return match_point(network, (pose.x, pose.y), tolerance)


def _segment_by_id(network: RoadNetwork) -> dict[str, RoadSegment]:
    return {segment.id: segment for segment in network.segments}


def _chord3(a, b) -> float:
    return ((b.x - a.x) ** 2 + (b.y - a.y) ** 2 + (b.z - a.z) ** 2) ** 0.5


def classify_trip(log: DriveLog, network: RoadNetwork, tolerance: float = DEFAULT_MATCH_TOLERANCE) -> TripComposition:
    """Attribute every inter-pose chord to the road type at its midpoint."""
    if not log.poses:
        raise EmptyChannel("poses")
    by_id = _segment_by_id(network)
    distances = {road_type: 0.0 for road_type in ROAD_TYPES}
    unmatched = 0.0
    for a, b in zip(log.poses, log.poses[1:]):
        midpoint = ((a.x + b.x) / 2.0, (a.y + b.y) / 2.0)
        matched = match_point(network, midpoint, tolerance)
        length = _chord3(a, b)
        if matched is UNMATCHED:
            unmatched += length
        else:
            distances[by_id[matched].road_type] += length
    total = sum(distances.values())
    fractions = {rt: (d / total if total > 0 else 0.0) for rt, d in distances.items()}
    return TripComposition(distances, fractions, unmatched)


def per_type_metrics(
    log: DriveLog,
    segments: Sequence[Segment],
    network: RoadNetwork,
    tolerance: float = DEFAULT_MATCH_TOLERANCE,
    method: str = "path",
) -> list[MetricsReport]:
    """One MetricsReport per road type present in the trip.

    Distance and uptime accumulate per (road type, mode) with the same
    chord-midpoint attribution as classify_trip; an intervention belongs
    to the road type at the pose associated with its falling edge.
    """
    if not log.poses:
        raise EmptyChannel("poses")
    by_id = _segment_by_id(network)
    distance: dict[tuple[str, str], float] = {}
    uptime: dict[tuple[str, str], float] = {}
    seen_types: set[str] = set()

    for t0, t1, value, midpoint in _increments(log, method):
        matched = match_point(network, midpoint, tolerance)
        if matched is UNMATCHED:
            continue
        idx = _segment_index_at(segments, t0)
        if idx is None:
            continue
        key = (by_id[matched].road_type, segments[idx].mode)
        distance[key] = distance.get(key, 0.0) + value
        uptime[key] = uptime.get(key, 0.0) + (t1 - t0)
        seen_types.add(key[0])

    interventions: dict[str, int] = {}
    pose_times = [p.t for p in log.poses]
    for i, segment in enumerate(segments):
        if segment.mode != MANUAL or i == 0:
            continue
        pose = log.poses[_nearest(pose_times, segment.t_start)]
        matched = match_point(network, (pose.x, pose.y), tolerance)
        if matched is UNMATCHED:
            continue
        road_type = by_id[matched].road_type
        interventions[road_type] = interventions.get(road_type, 0) + 1
        seen_types.add(road_type)

    if not seen_types:
        logger.warning("no poses of log %r matched the road network", log.log_id)
        return []

    reports = []
    for road_type in sorted(seen_types):
        totals = ModeTotals(
            auto_distance=distance.get((road_type, AUTONOMOUS), 0.0),
            manual_distance=distance.get((road_type, MANUAL), 0.0),
            auto_uptime=uptime.get((road_type, AUTONOMOUS), 0.0),
            manual_uptime=uptime.get((road_type, MANUAL), 0.0),
            n_interventions=interventions.get(road_type, 0),
        )
        reports.append(compute_metrics(totals, road_type))
    return reports


def _increments(log: DriveLog, method: str):
    """Yield (t_earlier, t_later, value, midpoint_xy) per inter-sample step."""
    if method == "path":
        for a, b in zip(log.poses, log.poses[1:]):
            yield a.t, b.t, _chord3(a, b), ((a.x + b.x) / 2.0, (a.y + b.y) / 2.0)
    elif method == "speed":
        measured = [s for s in log.speeds if s.kind == "measured"]
        for prev, s in zip(measured, measured[1:]):
            midpoint = _interp_position(log.poses, (prev.t + s.t) / 2.0)
            yield prev.t, s.t, s.v * (s.t - prev.t), midpoint
    else:
        raise ValueError(f"unknown distance method {method!r}")


def _interp_position(poses, t: float) -> tuple[float, float]:
    times = [p.t for p in poses]
    i = bisect_right(times, t)
    if i == 0:
        return poses[0].x, poses[0].y
    if i == len(poses):
        return poses[-1].x, poses[-1].y
    a, b = poses[i - 1], poses[i]
    frac = 0.0 if b.t == a.t else (t - a.t) / (b.t - a.t)
    return a.x + frac * (b.x - a.x), a.y + frac * (b.y - a.y)


def _nearest(times: list[float], t: float) -> int:
    i = bisect_left(times, t)
    if i == 0:
        return 0
    if i == len(times):
        return len(times) - 1
    return i - 1 if t - times[i - 1] <= times[i] - t else i


def speed_compliance(log: DriveLog, network: RoadNetwork, tolerance: float = DEFAULT_MATCH_TOLERANCE) -> ComplianceResult:
    """Measured-speed samples strictly above the matched segment's limit.

    Samples whose position does not match any road segment are skipped and
    tallied rather than judged against a guessed limit.
    """
    if not log.poses:
        raise EmptyChannel("poses")
    by_id = _segment_by_id(network)
    pose_times = [p.t for p in log.poses]
    violations: list[tuple[float, float, float]] = []
    skipped = 0
    for sample in log.speeds:
        if sample.kind != "measured":
            continue
        pose = log.poses[_nearest(pose_times, sample.t)]
        matched = match_point(network, (pose.x, pose.y), tolerance)
        if matched is UNMATCHED:
            skipped += 1
            continue
        limit = by_id[matched].speed_limit
        if sample.v > limit:
            violations.append((sample.t, sample.v, limit))
    return ComplianceResult(tuple(violations), skipped)
