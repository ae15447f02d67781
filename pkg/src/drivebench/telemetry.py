"""Canonical in-memory model of the recorded vehicle signals.

One record type per signal channel: pose in the local map frame, GPS fix,
IMU, measured/target speed, the drive-by-wire enable signal, and the three
actuator channels. A DriveLog bundles the channels of one trip together
with its identifying metadata. All types are immutable after construction
and safe to share between workers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True, slots=True)
class Pose:
    """Vehicle pose: position in meters plus a unit quaternion."""

    t: float
    x: float
    y: float
    z: float
    q0: float
    q1: float
    q2: float
    q3: float


@dataclass(frozen=True, slots=True)
class GpsFix:
    t: float
    latitude: float
    longitude: float
    altitude_ft: float


@dataclass(frozen=True, slots=True)
class ImuSample:
    """Linear acceleration (m/s^2) and angular rate (1/s)."""

    t: float
    ax: float
    ay: float
    az: float
    wx: float
    wy: float
    wz: float


@dataclass(frozen=True, slots=True)
class SpeedSample:
    """Measured or target speed in m/s; kind is 'measured' or 'target'."""

    t: float
    v: float
    kind: str = "measured"


@dataclass(frozen=True, slots=True)
class EngagementSample:
    """Drive-by-wire enable signal: True = autonomous, False = manual."""

    t: float
    enabled: bool


@dataclass(frozen=True, slots=True)
class ActuatorSample:
    """Actuator command; channel is 'acceleration', 'brake' or 'steering'.

    Acceleration and brake are unitless in [0, 1]. Steering is stored as
    given, with no unit or range imposed.
    """

    t: float
    channel: str
    value: float


@dataclass(frozen=True, slots=True)
class DriveLog:
    """Time-ordered multi-channel telemetry for one trip or session."""

    log_id: str = ""
    vehicle_id: str = ""
    driver_id: str = ""
    notes: str = ""
    poses: tuple[Pose, ...] = ()
    gps: tuple[GpsFix, ...] = ()
    imu: tuple[ImuSample, ...] = ()
    speeds: tuple[SpeedSample, ...] = ()
    engagement: tuple[EngagementSample, ...] = ()
    actuators: tuple[ActuatorSample, ...] = ()


@dataclass(frozen=True, slots=True)
class ValidationIssue:
    """A single violated invariant: which channel, which record, which rule."""

    channel: str
    index: int
    rule: str
    detail: str = ""

    def __str__(self) -> str:
        msg = f"{self.channel}[{self.index}]: {self.rule}"
        return f"{msg} ({self.detail})" if self.detail else msg


SPEED_KINDS = ("measured", "target")
ACTUATOR_CHANNELS = ("acceleration", "brake", "steering")

# Channel labels as they appear in issues, errors and the on-disk format.
CHANNEL_LABELS = (
    "poses",
    "gps",
    "imu",
    "speed",
    "target_speed",
    "engagement",
    "accel",
    "brake",
    "steering",
)

_ACTUATOR_LABEL = {"acceleration": "accel", "brake": "brake", "steering": "steering"}

DEFAULT_QUAT_TOL = 1e-6


def _finite(*values: float) -> bool:
    return all(math.isfinite(v) for v in values)


def _check_timestamp(t: float) -> list[tuple[str, str]]:
    if not isinstance(t, (int, float)) or not math.isfinite(t):
        return [("finite-timestamp", f"t={t!r}")]
    if t < 0:
        return [("negative-timestamp", f"t={t!r}")]
    return []


def check_record(record, quat_tol: float = DEFAULT_QUAT_TOL) -> list[tuple[str, str]]:
    """Return (rule, detail) pairs for every invariant the record violates."""
    problems = _check_timestamp(record.t)
    if isinstance(record, Pose):
        if not _finite(record.x, record.y, record.z):
            problems.append(("finite-value", "position component not finite"))
        q_sq = record.q0**2 + record.q1**2 + record.q2**2 + record.q3**2
        if not math.isfinite(q_sq) or abs(q_sq - 1.0) > quat_tol:
            problems.append(("unit-quaternion", f"|q|^2={q_sq!r}"))
    elif isinstance(record, GpsFix):
        if not _finite(record.latitude, record.longitude, record.altitude_ft):
            problems.append(("finite-value", "gps component not finite"))
        else:
            if not -90.0 <= record.latitude <= 90.0:
                problems.append(("latitude-range", f"lat={record.latitude!r}"))
            if not -180.0 <= record.longitude <= 180.0:
                problems.append(("longitude-range", f"lon={record.longitude!r}"))
    elif isinstance(record, ImuSample):
        if not _finite(record.ax, record.ay, record.az, record.wx, record.wy, record.wz):
            problems.append(("finite-value", "imu component not finite"))
    elif isinstance(record, SpeedSample):
        if record.kind not in SPEED_KINDS:
            problems.append(("speed-kind", f"kind={record.kind!r}"))
        if not _finite(record.v):
            problems.append(("finite-value", f"v={record.v!r}"))
        elif record.kind == "measured" and record.v < 0:
            problems.append(("negative-speed", f"v={record.v!r}"))
    elif isinstance(record, EngagementSample):
        if record.enabled not in (0, 1):
            problems.append(("binary-engagement", f"enabled={record.enabled!r}"))
    elif isinstance(record, ActuatorSample):
        if record.channel not in ACTUATOR_CHANNELS:
            problems.append(("actuator-channel", f"channel={record.channel!r}"))
        if not _finite(record.value):
            problems.append(("finite-value", f"value={record.value!r}"))
        elif record.channel in ("acceleration", "brake") and not 0.0 <= record.value <= 1.0:
            problems.append(("actuator-range", f"value={record.value!r}"))
    return problems


def iter_channels(log: DriveLog):
    """Yield (label, records) for every logical channel of the log.

    Speeds and actuators are split by kind so each yielded sequence has an
    independent timeline.
    """
    yield "poses", log.poses
    yield "gps", log.gps
    yield "imu", log.imu
    yield "speed", tuple(s for s in log.speeds if s.kind == "measured")
    yield "target_speed", tuple(s for s in log.speeds if s.kind == "target")
    yield "engagement", log.engagement
    for channel in ACTUATOR_CHANNELS:
        yield _ACTUATOR_LABEL[channel], tuple(a for a in log.actuators if a.channel == channel)


def validate_log(log: DriveLog, quat_tol: float = DEFAULT_QUAT_TOL) -> list[ValidationIssue]:
    """Check every structural invariant; returns one issue per violation.

    Pure and idempotent: the same log always yields the same issue list, in
    channel order then record order. An empty list means the log is clean.
    """
    issues: list[ValidationIssue] = []
    for label, records in iter_channels(log):
        prev_t = None
        for i, record in enumerate(records):
            for rule, detail in check_record(record, quat_tol):
                issues.append(ValidationIssue(label, i, rule, detail))
            if prev_t is not None and not record.t > prev_t:
                issues.append(
                    ValidationIssue(label, i, "strictly-increasing", f"t={record.t!r} after t={prev_t!r}")
                )
            prev_t = record.t
    return issues
