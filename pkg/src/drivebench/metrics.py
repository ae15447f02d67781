"""Distances, per-mode totals, and the MDBI/MTBI ratio family.

Two distance estimators are provided: the chord sum over consecutive poses
(the default; pose estimates are assumed precise) and the right-Riemann
integral of measured speed. Ratios divide totals by the intervention count;
with zero interventions the autonomous ratios take a distinguished
NO_INTERVENTIONS state (C/0) and the manual ratios are exactly 0 (0/0).
"""
from __future__ import annotations

import bisect
import datetime
import math
from dataclasses import dataclass
from typing import Sequence

from .errors import EmptyChannel, NoPosesInRange, NoSpeedInRange, UnknownGroupKey
from .segmentation import MANUAL, Segment, build_segments, count_interventions
from .telemetry import DriveLog, Pose, SpeedSample

DISTANCE_METHODS = ("path", "speed")

# Distinguished report state for zero-intervention ratios; kept as None
# in memory and serialized as null plus a no_interventions flag.
NO_INTERVENTIONS = None


@dataclass(frozen=True, slots=True)
class ModeTotals:
    """Per-mode distance and uptime sums plus the intervention count."""

    auto_distance: float = 0.0
    manual_distance: float = 0.0
    auto_uptime: float = 0.0
    manual_uptime: float = 0.0
    n_interventions: int = 0

    def __add__(self, other: "ModeTotals") -> "ModeTotals":
        return ModeTotals(
            self.auto_distance + other.auto_distance,
            self.manual_distance + other.manual_distance,
            self.auto_uptime + other.auto_uptime,
            self.manual_uptime + other.manual_uptime,
            self.n_interventions + other.n_interventions,
        )


@dataclass(frozen=True, slots=True)
class MetricsReport:
    """MDBI/MTBI family for one log, group, region or road type.

    The overall ratios and the autonomous ratios are None (NO_INTERVENTIONS)
    when n_interventions is zero; the manual ratios are 0.0 in that case.
    """

    mdbi: float | None
    mtbi: float | None
    mdbi_a: float | None
    mtbi_a: float | None
    mdbi_m: float
    mtbi_m: float
    totals: ModeTotals
    group_key: str = ""

    @property
    def no_interventions(self) -> bool:
        return self.totals.n_interventions == 0


def _chord(a: Pose, b: Pose) -> float:
    return math.sqrt((b.x - a.x) ** 2 + (b.y - a.y) ** 2 + (b.z - a.z) ** 2)


def _slice_by_time(records, t_i: float, t_k: float):
    times = [r.t for r in records]
    lo = bisect.bisect_left(times, t_i)
    hi = bisect.bisect_right(times, t_k)
    return records[lo:hi]


def path_distance(poses: Sequence[Pose], t_i: float, t_k: float) -> float:
    """Chord-sum distance over poses with timestamps in [t_i, t_k].

    A single pose in range is a legal zero; no pose at all raises
    NoPosesInRange to keep the two cases distinguishable.
    """
    if not t_i < t_k:
        raise ValueError(f"require t_i < t_k, got {t_i} >= {t_k}")
    in_range = _slice_by_time(list(poses), t_i, t_k)
    if not in_range:
        raise NoPosesInRange(f"no poses in [{t_i}, {t_k}]")
    return sum(_chord(a, b) for a, b in zip(in_range, in_range[1:]))


def speed_distance(speeds: Sequence[SpeedSample], t_i: float, t_k: float) -> float:
    """Right-Riemann distance: sum of v * gap over measured samples in range.

    The sum starts at the second in-range sample; a single sample in range
    is an empty sum (0.0), while no sample raises NoSpeedInRange.
    """
    if not t_i < t_k:
        raise ValueError(f"require t_i < t_k, got {t_i} >= {t_k}")
    measured = [s for s in speeds if s.kind == "measured"]
    in_range = _slice_by_time(measured, t_i, t_k)
    if not in_range:
        raise NoSpeedInRange(f"no measured speed samples in [{t_i}, {t_k}]")
    return sum(s.v * (s.t - prev.t) for prev, s in zip(in_range, in_range[1:]))


def _segment_index_at(segments: Sequence[Segment], t: float) -> int | None:
    """Index of the segment whose [t_start, t_end) contains t, else None."""
    starts = [s.t_start for s in segments]
    i = bisect.bisect_right(starts, t) - 1
    if i >= 0 and segments[i].t_start <= t < segments[i].t_end:
        return i
    return None


def segment_totals(log: DriveLog, segments: Sequence[Segment], method: str = "path") -> ModeTotals:
    """Accumulate per-mode distance and uptime over the given segments.

    Each inter-sample increment (a pose chord, or a speed Riemann term) is
    credited to the segment containing its earlier endpoint, so an
    increment spanning a boundary goes to the earlier segment and nothing
    is counted twice. Fills each Segment.distance as a side effect.
    """
    if method not in DISTANCE_METHODS:
        raise ValueError(f"unknown distance method {method!r}")
    if not segments:
        raise ValueError("no segments given")
    for segment in segments:
        segment.distance = 0.0

    if method == "path":
        records = list(log.poses)
        if not records:
            raise NoPosesInRange("log has no poses")
        increments = [(records[j - 1].t, _chord(records[j - 1], records[j])) for j in range(1, len(records))]
    else:
        records = [s for s in log.speeds if s.kind == "measured"]
        if not records:
            raise NoSpeedInRange("log has no measured speed samples")
        increments = [(records[j - 1].t, records[j].v * (records[j].t - records[j - 1].t)) for j in range(1, len(records))]

    _require_coverage(records, segments, method)
    for t_earlier, value in increments:
        idx = _segment_index_at(segments, t_earlier)
        if idx is not None:
            segments[idx].distance += value

    auto_distance = sum(s.distance for s in segments if s.mode != MANUAL)
    manual_distance = sum(s.distance for s in segments if s.mode == MANUAL)
    auto_uptime = sum(s.uptime for s in segments if s.mode != MANUAL)
    manual_uptime = sum(s.uptime for s in segments if s.mode == MANUAL)
    return ModeTotals(auto_distance, manual_distance, auto_uptime, manual_uptime, count_interventions(segments))


def _require_coverage(records, segments: Sequence[Segment], method: str) -> None:
    times = [r.t for r in records]
    for index, segment in enumerate(segments):
        lo = bisect.bisect_left(times, segment.t_start)
        if lo >= len(times) or times[lo] > segment.t_end:
            exc = NoPosesInRange if method == "path" else NoSpeedInRange
            raise exc(f"segment {index} [{segment.t_start}, {segment.t_end}] contains no samples")


def compute_metrics(totals: ModeTotals, group_key: str = "") -> MetricsReport:
    """Form the six ratios from totals, applying the zero-intervention limits."""
    n = totals.n_interventions
    if n > 0:
        return MetricsReport(
            mdbi=(totals.auto_distance + totals.manual_distance) / n,
            mtbi=(totals.auto_uptime + totals.manual_uptime) / n,
            mdbi_a=totals.auto_distance / n,
            mtbi_a=totals.auto_uptime / n,
            mdbi_m=totals.manual_distance / n,
            mtbi_m=totals.manual_uptime / n,
            totals=totals,
            group_key=group_key,
        )
    return MetricsReport(
        mdbi=NO_INTERVENTIONS,
        mtbi=NO_INTERVENTIONS,
        mdbi_a=NO_INTERVENTIONS,
        mtbi_a=NO_INTERVENTIONS,
        mdbi_m=0.0,
        mtbi_m=0.0,
        totals=totals,
        group_key=group_key,
    )


def log_totals(log: DriveLog, method: str = "path", min_dwell: float = 0.0) -> ModeTotals:
    """Segment the log and accumulate its ModeTotals in one step."""
    if not log.engagement:
        raise EmptyChannel("engagement")
    segments = build_segments(log.engagement, min_dwell)
    return segment_totals(log, segments, method)


def _quarter_key(t: float) -> str:
    d = datetime.datetime.fromtimestamp(t, tz=datetime.timezone.utc)
    return f"{d.year}-Q{(d.month - 1) // 3 + 1}"


def group_key_for(log: DriveLog, grouping: str) -> str:
    """Grouping key of one log under a grouping spec.

    Specs: "log" (by log_id), "period[:quarter|month|year]" (UTC calendar
    period of the first engagement sample), "route" (the notes field, which
    is where trip/route annotations live).
    """
    if grouping == "log":
        if not log.log_id:
            raise UnknownGroupKey("log has no log_id")
        return log.log_id
    if grouping.startswith("period"):
        if not log.engagement:
            raise EmptyChannel("engagement")
        t = log.engagement[0].t
        granularity = grouping.partition(":")[2] or "quarter"
        d = datetime.datetime.fromtimestamp(t, tz=datetime.timezone.utc)
        if granularity == "quarter":
            return _quarter_key(t)
        if granularity == "month":
            return f"{d.year}-{d.month:02d}"
        if granularity == "year":
            return str(d.year)
        raise UnknownGroupKey(f"unknown period granularity {granularity!r}")
    if grouping == "route":
        if not log.notes:
            raise UnknownGroupKey(f"log {log.log_id!r} has no route annotation in notes")
        return log.notes.split("\n", 1)[0]
    raise UnknownGroupKey(f"unknown grouping spec {grouping!r}")


def group_metrics(
    logs: Sequence[DriveLog],
    grouping: str = "log",
    method: str = "path",
    min_dwell: float = 0.0,
) -> list[MetricsReport]:
    """One report per group; group totals are summed before the ratio is taken.

    Ratio-of-sums, never an average of ratios: two logs of 100 m / 1
    intervention grouped together give mdbi_a = 100, not a mean of ratios.
    """
    sums: dict[str, ModeTotals] = {}
    for log in logs:
        key = group_key_for(log, grouping)
        totals = log_totals(log, method, min_dwell)
        sums[key] = sums[key] + totals if key in sums else totals
    return [compute_metrics(sums[key], key) for key in sorted(sums)]
