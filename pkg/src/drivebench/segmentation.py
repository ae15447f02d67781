"""Turn the enable/disable signal into alternating driving segments.

The engagement channel is treated as a right-continuous step function: the
state between samples is the previous sample's value, and an edge is
timestamped at the sample that reveals the change. A falling edge (1 -> 0)
is an intervention; a rising edge (0 -> 1) is a re-enable.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import EmptyChannel
from .telemetry import EngagementSample

AUTONOMOUS = "autonomous"
MANUAL = "manual"

FALLING = "falling"
RISING = "rising"


@dataclass(frozen=True, slots=True)
class EdgeEvent:
    t: float
    direction: str  # "falling" or "rising"


@dataclass(slots=True)
class Segment:
    """A maximal interval of constant driving mode.

    distance stays 0.0 until filled in by the metrics pass.
    """

    mode: str
    t_start: float
    t_end: float
    uptime: float = 0.0
    distance: float = 0.0

    def __post_init__(self) -> None:
        if self.uptime == 0.0:
            self.uptime = self.t_end - self.t_start


def detect_edges(engagement: Sequence[EngagementSample], min_dwell: float = 0.0) -> list[EdgeEvent]:
    """Find every mode change, optionally debouncing short blips.

    With min_dwell > 0, any pair of consecutive opposite edges closer than
    min_dwell is removed, applied left to right, so a glitch shorter than
    the dwell never produces a segment. min_dwell = 0 is the identity.
    """
    if not engagement:
        raise EmptyChannel("engagement")
    if min_dwell < 0:
        raise ValueError("min_dwell must be >= 0")
    kept: list[EdgeEvent] = []
    prev = engagement[0]
    for sample in engagement[1:]:
        if sample.enabled != prev.enabled:
            edge = EdgeEvent(sample.t, FALLING if prev.enabled else RISING)
            if kept and min_dwell > 0 and edge.t - kept[-1].t < min_dwell:
                kept.pop()
            else:
                kept.append(edge)
        prev = sample
    return kept


def build_segments(
    engagement: Sequence[EngagementSample],
    min_dwell: float = 0.0,
    t_end: float | None = None,
) -> list[Segment]:
    """Tile [first_sample.t, end] with alternating segments.

    The first segment's mode is the first sample's value. By default the
    last segment ends at the final engagement sample; pass t_end to extend
    it to a known later end of log. Zero-length pieces are dropped.
    """
    edges = detect_edges(engagement, min_dwell)
    start = engagement[0].t
    end = engagement[-1].t
    if t_end is not None:
        if t_end < end:
            raise ValueError(f"t_end={t_end} precedes the last engagement sample at {end}")
        end = t_end
    boundaries = [start] + [e.t for e in edges] + [end]
    mode = AUTONOMOUS if engagement[0].enabled else MANUAL
    segments: list[Segment] = []
    for t0, t1 in zip(boundaries, boundaries[1:]):
        if t1 > t0:
            segments.append(Segment(mode, t0, t1))
        mode = MANUAL if mode == AUTONOMOUS else AUTONOMOUS
    return segments


def count_interventions(segments_or_edges: Sequence[Segment] | Sequence[EdgeEvent]) -> int:
    """Number of falling edges: manual periods the system was disengaged into.

    A log that begins in manual mode was never disengaged, so an initial
    manual segment does not count.
    """
    items = list(segments_or_edges)
    if not items:
        return 0
    if isinstance(items[0], EdgeEvent):
        return sum(1 for e in items if e.direction == FALLING)
    count = sum(1 for s in items if s.mode == MANUAL)
    if items[0].mode == MANUAL:
        count -= 1
    return count
