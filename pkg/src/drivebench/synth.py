"""Deterministic synthetic drive logs with analytically known ground truth.

A scenario is a waypoint polyline driven at piecewise-constant speed and
sampled on a fixed grid, with manual-intervention windows given by start
distance and duration. The generated log and its ground truth come from
the same snapped window boundaries, so metric comparisons against the
oracle are exact for noise-free scenarios whose corners fall on sample
instants, and within one sample step otherwise.
"""
from __future__ import annotations

import io
import math
from bisect import bisect_right
from dataclasses import dataclass

import numpy as np

from .errors import InvalidScenario
from .segmentation import AUTONOMOUS, MANUAL, Segment
from .telemetry import DriveLog, EngagementSample, Pose, SpeedSample


@dataclass(frozen=True, slots=True)
class SynthScenario:
    """Declarative trip description; speeds has one entry per waypoint leg."""

    waypoints: tuple[tuple[float, float], ...]
    speeds: tuple[float, ...]
    sample_rate: float
    interventions: tuple[tuple[float, float], ...] = ()
    seed: int = 0
    noise_std: float = 0.0


@dataclass(frozen=True, slots=True)
class GroundTruth:
    segments: tuple[Segment, ...]
    auto_distance: float
    manual_distance: float
    auto_uptime: float
    manual_uptime: float
    n_interventions: int


def make_scenario(
    waypoints,
    speed,
    sample_rate: float,
    interventions=(),
    seed: int = 0,
    noise_std: float = 0.0,
) -> SynthScenario:
    """Normalize and validate scenario inputs; speed may be scalar or per leg."""
    waypoints = tuple((float(x), float(y)) for x, y in waypoints)
    if len(waypoints) < 2:
        raise InvalidScenario("need at least two waypoints")
    n_legs = len(waypoints) - 1
    if isinstance(speed, (int, float)):
        speeds = (float(speed),) * n_legs
    else:
        speeds = tuple(float(v) for v in speed)
        if len(speeds) == 1:
            speeds = speeds * n_legs
        elif len(speeds) != n_legs:
            raise InvalidScenario(f"{len(speeds)} speeds for {n_legs} legs")
    if any(v <= 0 for v in speeds):
        raise InvalidScenario("speeds must be > 0")
    if sample_rate <= 0:
        raise InvalidScenario("sample_rate must be > 0")
    if noise_std < 0:
        raise InvalidScenario("noise_std must be >= 0")
    for a, b in zip(waypoints, waypoints[1:]):
        if math.dist(a, b) == 0.0:
            raise InvalidScenario("zero-length leg between identical waypoints")
    interventions = tuple((float(s), float(d)) for s, d in interventions)
    for start_m, duration_s in interventions:
        if start_m < 0 or duration_s <= 0:
            raise InvalidScenario("interventions need start_m >= 0 and duration_s > 0")
    scenario = SynthScenario(waypoints, speeds, float(sample_rate), interventions, int(seed), float(noise_std))
    _raw_windows(scenario, _Path(scenario))  # validates ordering and disjointness
    return scenario


class _Path:
    """Arc-length parametrization of the waypoint polyline over time."""

    def __init__(self, scenario: SynthScenario):
        self.points = scenario.waypoints
        self.leg_lengths = [math.dist(a, b) for a, b in zip(self.points, self.points[1:])]
        self.leg_durations = [length / v for length, v in zip(self.leg_lengths, scenario.speeds)]
        self.speeds = scenario.speeds
        self.t_starts = [0.0]
        self.s_starts = [0.0]
        for dur, length in zip(self.leg_durations, self.leg_lengths):
            self.t_starts.append(self.t_starts[-1] + dur)
            self.s_starts.append(self.s_starts[-1] + length)
        self.total_time = self.t_starts[-1]
        self.total_length = self.s_starts[-1]

    def _leg_at_time(self, t: float) -> int:
        i = bisect_right(self.t_starts, t) - 1
        return min(max(i, 0), len(self.leg_lengths) - 1)

    def arc_length(self, t: float) -> float:
        i = self._leg_at_time(t)
        return self.s_starts[i] + self.speeds[i] * (t - self.t_starts[i])

    def position(self, t: float) -> tuple[float, float]:
        i = self._leg_at_time(t)
        frac = 0.0 if self.leg_lengths[i] == 0 else (self.arc_length(t) - self.s_starts[i]) / self.leg_lengths[i]
        frac = min(1.0, max(0.0, frac))
        (x0, y0), (x1, y1) = self.points[i], self.points[i + 1]
        return x0 + frac * (x1 - x0), y0 + frac * (y1 - y0)

    def speed_at(self, t: float) -> float:
        return self.speeds[self._leg_at_time(t)]

    def heading_at(self, t: float) -> float:
        i = self._leg_at_time(t)
        (x0, y0), (x1, y1) = self.points[i], self.points[i + 1]
        return math.atan2(y1 - y0, x1 - x0)

    def time_at_distance(self, s: float) -> float:
        i = bisect_right(self.s_starts, s) - 1
        i = min(max(i, 0), len(self.leg_lengths) - 1)
        return self.t_starts[i] + (s - self.s_starts[i]) / self.speeds[i]


def _raw_windows(scenario: SynthScenario, path: _Path) -> list[tuple[float, float]]:
    """Intervention windows as time intervals; must be ordered and disjoint."""
    raw: list[tuple[float, float]] = []
    for start_m, duration_s in scenario.interventions:
        if start_m > path.total_length:
            raise InvalidScenario(f"intervention start {start_m} beyond path length {path.total_length}")
        t0 = path.time_at_distance(start_m)
        raw.append((t0, t0 + duration_s))
    raw.sort()
    for (_, e0), (s1, _) in zip(raw, raw[1:]):
        if s1 < e0:
            raise InvalidScenario("intervention windows overlap")
    return raw


def _snapped_windows(scenario: SynthScenario, path: _Path, dt: float, n_steps: int) -> list[tuple[int, int]]:
    """Intervention windows as [start, end) sample indices, merged and clipped."""
    raw = _raw_windows(scenario, path)
    windows: list[tuple[int, int]] = []
    for t0, t1 in raw:
        k0 = max(0, min(n_steps, round(t0 / dt)))
        k1 = max(0, min(n_steps, round(t1 / dt)))
        if k1 <= k0:
            continue  # shorter than half a sample period: never observed
        if windows and k0 <= windows[-1][1]:
            windows[-1] = (windows[-1][0], max(windows[-1][1], k1))
        else:
            windows.append((k0, k1))
    return windows


def synth_log(scenario: SynthScenario) -> tuple[DriveLog, GroundTruth]:
    """Generate the log and its ground truth; a pure function of the scenario."""
    path = _Path(scenario)
    dt = 1.0 / scenario.sample_rate
    n_steps = int(math.floor(path.total_time / dt + 1e-9))
    if n_steps < 1:
        raise InvalidScenario("path too short for even one sample interval")
    windows = _snapped_windows(scenario, path, dt, n_steps)

    rng = np.random.default_rng(scenario.seed)
    poses: list[Pose] = []
    speeds: list[SpeedSample] = []
    engagement: list[EngagementSample] = []
    bounds = [w for pair in windows for w in pair]
    for k in range(n_steps + 1):
        t = k * dt
        x, y = path.position(t)
        z = 0.0
        if scenario.noise_std > 0:
            jitter = rng.normal(0.0, scenario.noise_std, 3)
            x, y, z = x + jitter[0], y + jitter[1], z + jitter[2]
        yaw = path.heading_at(t)
        poses.append(Pose(t, x, y, z, math.cos(yaw / 2), 0.0, 0.0, math.sin(yaw / 2)))
        speeds.append(SpeedSample(t, path.speed_at(t), "measured"))
        window_slot = bisect_right(bounds, k)
        engagement.append(EngagementSample(t, window_slot % 2 == 0))

    log = DriveLog(
        log_id=f"synth-{scenario.seed}",
        vehicle_id="synth",
        poses=tuple(poses),
        speeds=tuple(speeds),
        engagement=tuple(engagement),
    )
    return log, _ground_truth(path, dt, n_steps, windows)


def _ground_truth(path: _Path, dt: float, n_steps: int, windows: list[tuple[int, int]]) -> GroundTruth:
    boundaries = [0] + [k for pair in windows for k in pair] + [n_steps]
    starts_manual = bool(windows) and windows[0][0] == 0
    mode = MANUAL if starts_manual else AUTONOMOUS
    segments: list[Segment] = []
    for k0, k1 in zip(boundaries, boundaries[1:]):
        if k1 > k0:
            t0, t1 = k0 * dt, k1 * dt
            segments.append(Segment(mode, t0, t1, uptime=t1 - t0, distance=path.arc_length(t1) - path.arc_length(t0)))
        mode = MANUAL if mode == AUTONOMOUS else AUTONOMOUS
    auto = [s for s in segments if s.mode == AUTONOMOUS]
    manual = [s for s in segments if s.mode == MANUAL]
    return GroundTruth(
        segments=tuple(segments),
        auto_distance=math.fsum(s.distance for s in auto),
        manual_distance=math.fsum(s.distance for s in manual),
        auto_uptime=math.fsum(s.uptime for s in auto),
        manual_uptime=math.fsum(s.uptime for s in manual),
        n_interventions=len(manual) - (1 if starts_manual else 0),
    )


def parse_scenario(source) -> SynthScenario:
    """Read the record-oriented scenario format.

    Lines: waypoint,x,y / speed,v (one line, or one per leg) / rate,hz /
    intervene,start_m,duration_s / seed,n / noise,std. Comments start with #.
    """
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    if isinstance(source, str):
        source = io.StringIO(source)
    waypoints: list[tuple[float, float]] = []
    speeds: list[float] = []
    interventions: list[tuple[float, float]] = []
    rate = None
    seed = 0
    noise = 0.0
    for line_no, raw in enumerate(source, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(",")
        key = parts[0]
        try:
            if key == "waypoint" and len(parts) == 3:
                waypoints.append((float(parts[1]), float(parts[2])))
            elif key == "speed" and len(parts) == 2:
                speeds.append(float(parts[1]))
            elif key == "rate" and len(parts) == 2:
                rate = float(parts[1])
            elif key == "intervene" and len(parts) == 3:
                interventions.append((float(parts[1]), float(parts[2])))
            elif key == "seed" and len(parts) == 2:
                seed = int(parts[1])
            elif key == "noise" and len(parts) == 2:
                noise = float(parts[1])
            else:
                raise InvalidScenario(f"line {line_no}: unrecognized scenario record {line!r}")
        except ValueError:
            raise InvalidScenario(f"line {line_no}: bad number in {line!r}") from None
    if rate is None:
        raise InvalidScenario("scenario is missing a rate record")
    if not speeds:
        raise InvalidScenario("scenario is missing a speed record")
    return make_scenario(waypoints, speeds, rate, interventions, seed, noise)
