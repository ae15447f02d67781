"""Shared builders for the test suite."""
from __future__ import annotations

import math

from drivebench.telemetry import DriveLog, EngagementSample, Pose, SpeedSample


def straight_pose(t: float, x: float, y: float = 0.0, z: float = 0.0) -> Pose:
    return Pose(t, x, y, z, 1.0, 0.0, 0.0, 0.0)


def line_log(
    length: float = 100.0,
    speed: float = 2.0,
    rate: float = 10.0,
    disabled_windows: tuple[tuple[float, float], ...] = (),
    log_id: str = "line",
) -> DriveLog:
    """Straight drive along +x with manual windows given as (t0, t1) pairs."""
    dt = 1.0 / rate
    n = round(length / speed / dt)
    poses = []
    speeds = []
    engagement = []
    for k in range(n + 1):
        t = k * dt
        poses.append(straight_pose(t, speed * t))
        speeds.append(SpeedSample(t, speed, "measured"))
        disabled = any(t0 <= t < t1 for t0, t1 in disabled_windows)
        engagement.append(EngagementSample(t, not disabled))
    return DriveLog(log_id=log_id, poses=tuple(poses), speeds=tuple(speeds), engagement=tuple(engagement))


def engagement_channel(points: list[tuple[float, int]]) -> tuple[EngagementSample, ...]:
    return tuple(EngagementSample(float(t), bool(v)) for t, v in points)


def circle_points(radius: float, n: int) -> list[tuple[float, float]]:
    return [
        (radius * math.cos(2 * math.pi * k / n), radius * math.sin(2 * math.pi * k / n))
        for k in range(n)
    ]
