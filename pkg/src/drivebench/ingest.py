"""On-disk drive-log format: parsing, serialization, and the CSV bundle.

One record per line, comma-separated, `kind,t,<payload...>`:

    pose,t,x,y,z,q0,q1,q2,q3
    gps,t,lat,lon,alt_ft
    imu,t,ax,ay,az,wx,wy,wz
    speed,t,v            target_speed,t,v
    engage,t,0|1
    accel,t,v01          brake,t,v01          steering,t,value
    meta,t,key,value     (keys: log_id | vehicle_id | driver_id | note)

UTF-8, LF line endings, `#` comment lines ignored. Parsing enforces the
syntax: field counts, numeric fields, enumerations, and per-channel
timestamp order. Semantic invariants (quaternion norm, value ranges) are
the job of telemetry.validate_log.
"""
from __future__ import annotations

import csv
import io
from collections.abc import Iterable, Mapping
from pathlib import Path

from .errors import (
    InvalidLog,
    MalformedRecord,
    MissingColumn,
    NonMonotonicTimestamp,
    UnknownKind,
)
from .telemetry import (
    ActuatorSample,
    DriveLog,
    EngagementSample,
    GpsFix,
    ImuSample,
    Pose,
    SpeedSample,
    validate_log,
)

# Kind order used to break ties when serializing records at equal timestamps.
KIND_ORDER = ("meta", "pose", "gps", "imu", "speed", "target_speed", "engage", "accel", "brake", "steering")
_KIND_RANK = {kind: i for i, kind in enumerate(KIND_ORDER)}

_META_KEYS = ("log_id", "vehicle_id", "driver_id", "note")

# Payload column names per kind, also used as CSV bundle headers (after t).
PAYLOAD_COLUMNS = {
    "pose": ("x", "y", "z", "q0", "q1", "q2", "q3"),
    "gps": ("lat", "lon", "alt_ft"),
    "imu": ("ax", "ay", "az", "wx", "wy", "wz"),
    "speed": ("v",),
    "target_speed": ("v",),
    "engage": ("enabled",),
    "accel": ("value",),
    "brake": ("value",),
    "steering": ("value",),
    "meta": ("key", "value"),
}

# Channel label a record kind belongs to, for monotonicity errors.
_KIND_CHANNEL = {
    "pose": "poses",
    "gps": "gps",
    "imu": "imu",
    "speed": "speed",
    "target_speed": "target_speed",
    "engage": "engagement",
    "accel": "accel",
    "brake": "brake",
    "steering": "steering",
}


class _Builder:
    """Accumulates parsed records and enforces per-channel ordering."""

    def __init__(self) -> None:
        self.meta = {"log_id": "", "vehicle_id": "", "driver_id": ""}
        self.notes: list[str] = []
        self.poses: list[Pose] = []
        self.gps: list[GpsFix] = []
        self.imu: list[ImuSample] = []
        self.speeds: list[SpeedSample] = []
        self.engagement: list[EngagementSample] = []
        self.actuators: list[ActuatorSample] = []
        self._last_t: dict[str, float] = {}

    def add(self, kind: str, record, line_no: int) -> None:
        channel = _KIND_CHANNEL[kind]
        last = self._last_t.get(channel)
        if last is not None and not record.t > last:
            raise NonMonotonicTimestamp(channel, line_no)
        self._last_t[channel] = record.t
        if isinstance(record, Pose):
            self.poses.append(record)
        elif isinstance(record, GpsFix):
            self.gps.append(record)
        elif isinstance(record, ImuSample):
            self.imu.append(record)
        elif isinstance(record, SpeedSample):
            self.speeds.append(record)
        elif isinstance(record, EngagementSample):
            self.engagement.append(record)
        else:
            self.actuators.append(record)

    def build(self) -> DriveLog:
        return DriveLog(
            log_id=self.meta["log_id"],
            vehicle_id=self.meta["vehicle_id"],
            driver_id=self.meta["driver_id"],
            notes="\n".join(self.notes),
            poses=tuple(self.poses),
            gps=tuple(self.gps),
            imu=tuple(self.imu),
            speeds=tuple(self.speeds),
            engagement=tuple(self.engagement),
            actuators=tuple(self.actuators),
        )


def _parse_float(text: str, line_no: int, name: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise MalformedRecord(line_no, f"field {name!r} is not a number: {text!r}") from None


def _split_fields(line: str, kind: str, line_no: int) -> list[str]:
    n_payload = len(PAYLOAD_COLUMNS[kind])
    if kind == "meta":
        # The free-text value may itself contain commas.
        fields = line.split(",", 3)
    else:
        fields = line.split(",")
    if len(fields) != n_payload + 2:
        raise MalformedRecord(line_no, f"{kind}: expected {n_payload + 2} fields, got {len(fields)}")
    return fields


def _record_from_fields(kind: str, fields: list[str], line_no: int):
    t = _parse_float(fields[1], line_no, "t")
    p = fields[2:]
    if kind == "pose":
        return Pose(t, *(_parse_float(v, line_no, c) for v, c in zip(p, PAYLOAD_COLUMNS["pose"])))
    if kind == "gps":
        return GpsFix(t, *(_parse_float(v, line_no, c) for v, c in zip(p, PAYLOAD_COLUMNS["gps"])))
    if kind == "imu":
        return ImuSample(t, *(_parse_float(v, line_no, c) for v, c in zip(p, PAYLOAD_COLUMNS["imu"])))
    if kind == "speed":
        return SpeedSample(t, _parse_float(p[0], line_no, "v"), "measured")
    if kind == "target_speed":
        return SpeedSample(t, _parse_float(p[0], line_no, "v"), "target")
    if kind == "engage":
        if p[0] not in ("0", "1"):
            raise MalformedRecord(line_no, f"engage value must be 0 or 1, got {p[0]!r}")
        return EngagementSample(t, p[0] == "1")
    if kind == "accel":
        return ActuatorSample(t, "acceleration", _parse_float(p[0], line_no, "value"))
    if kind == "brake":
        return ActuatorSample(t, "brake", _parse_float(p[0], line_no, "value"))
    if kind == "steering":
        return ActuatorSample(t, "steering", _parse_float(p[0], line_no, "value"))
    raise UnknownKind(line_no, kind)


def _iter_lines(source) -> Iterable[str]:
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    if isinstance(source, str):
        return io.StringIO(source)
    if isinstance(source, io.BufferedIOBase) or (hasattr(source, "read") and "b" in getattr(source, "mode", "")):
        return io.TextIOWrapper(source, encoding="utf-8")
    return source  # text file object or any iterable of lines


def parse_log(source) -> DriveLog:
    """Parse the canonical format into a DriveLog.

    Accepts bytes, a string, or a file object / line iterable, so large logs
    can be streamed. Raises MalformedRecord, UnknownKind or
    NonMonotonicTimestamp with the exact 1-based offending line.
    """
    builder = _Builder()
    for line_no, raw in enumerate(_iter_lines(source), start=1):
        line = raw.rstrip("\r\n")
        if not line or line.startswith("#"):
            continue
        kind = line.split(",", 1)[0]
        if kind not in PAYLOAD_COLUMNS:
            raise UnknownKind(line_no, kind)
        fields = _split_fields(line, kind, line_no)
        if kind == "meta":
            _parse_float(fields[1], line_no, "t")
            key, value = fields[2], fields[3]
            if key not in _META_KEYS:
                raise MalformedRecord(line_no, f"unknown meta key {key!r}")
            if key == "note":
                builder.notes.append(value)
            else:
                builder.meta[key] = value
        else:
            builder.add(kind, _record_from_fields(kind, fields, line_no), line_no)
    return builder.build()


def parse_log_file(path) -> DriveLog:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        return parse_log(fh)


def _fmt(value: float) -> str:
    # repr() is the shortest round-trip decimal form, so parse(serialize(x)) == x.
    return repr(float(value))


def _record_lines(log: DriveLog):
    for key in ("log_id", "vehicle_id", "driver_id"):
        value = getattr(log, key)
        if value:
            yield 0.0, _KIND_RANK["meta"], f"meta,0.0,{key},{value}"
    if log.notes:
        for note in log.notes.split("\n"):
            yield 0.0, _KIND_RANK["meta"], f"meta,0.0,note,{note}"
    for p in log.poses:
        payload = ",".join(_fmt(v) for v in (p.x, p.y, p.z, p.q0, p.q1, p.q2, p.q3))
        yield p.t, _KIND_RANK["pose"], f"pose,{_fmt(p.t)},{payload}"
    for g in log.gps:
        yield g.t, _KIND_RANK["gps"], f"gps,{_fmt(g.t)},{_fmt(g.latitude)},{_fmt(g.longitude)},{_fmt(g.altitude_ft)}"
    for m in log.imu:
        payload = ",".join(_fmt(v) for v in (m.ax, m.ay, m.az, m.wx, m.wy, m.wz))
        yield m.t, _KIND_RANK["imu"], f"imu,{_fmt(m.t)},{payload}"
    for s in log.speeds:
        kind = "speed" if s.kind == "measured" else "target_speed"
        yield s.t, _KIND_RANK[kind], f"{kind},{_fmt(s.t)},{_fmt(s.v)}"
    for e in log.engagement:
        yield e.t, _KIND_RANK["engage"], f"engage,{_fmt(e.t)},{1 if e.enabled else 0}"
    for a in log.actuators:
        kind = {"acceleration": "accel", "brake": "brake", "steering": "steering"}[a.channel]
        yield a.t, _KIND_RANK[kind], f"{kind},{_fmt(a.t)},{_fmt(a.value)}"


def serialize_log(log: DriveLog) -> bytes:
    """Serialize a clean DriveLog to the canonical format.

    Records are emitted in non-decreasing timestamp order, ties broken by
    the fixed kind order, so output is deterministic and parse_log
    reproduces the log exactly at the record level.
    """
    issues = validate_log(log)
    if issues:
        raise InvalidLog(issues)
    lines = [line for _, _, line in sorted(_record_lines(log), key=lambda r: (r[0], r[1]))]
    return ("\n".join(lines) + "\n").encode("utf-8") if lines else b""


def write_log_file(log: DriveLog, path) -> None:
    Path(path).write_bytes(serialize_log(log))


def parse_csv_bundle(paths: Mapping[str, object]) -> DriveLog:
    """Parse a set of per-kind CSV files into one DriveLog.

    Each file carries a header whose first column is t followed by the
    payload columns of its kind; the result equals parse_log on the same
    records. Column order in the file is free.
    """
    builder = _Builder()
    merged: list[tuple[float, int, str, object, int]] = []
    for kind in KIND_ORDER:
        if kind not in paths:
            continue
        with open(paths[kind], "r", encoding="utf-8", newline="") as fh:
            _read_csv_kind(kind, fh, builder, merged)
    unknown = set(paths) - set(KIND_ORDER)
    if unknown:
        raise UnknownKind(0, sorted(unknown)[0])

    for _, _, kind, record, line_no in sorted(merged, key=lambda r: (r[0], r[1])):
        builder.add(kind, record, line_no)
    return builder.build()


def _read_csv_kind(kind: str, fh, builder: _Builder, merged: list) -> None:
    reader = csv.reader(fh)
    try:
        header = next(reader)
    except StopIteration:
        return
    expected = ("t",) + PAYLOAD_COLUMNS[kind]
    for column in expected:
        if column not in header:
            raise MissingColumn(kind, column)
    for column in header:
        if column not in expected:
            raise MalformedRecord(1, f"{kind} csv: unexpected column {column!r}")
    positions = [header.index(c) for c in expected]
    last_t = None
    for line_no, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise MalformedRecord(line_no, f"{kind} csv: expected {len(header)} fields, got {len(row)}")
        fields = [kind] + [row[i] for i in positions]
        if kind == "meta":
            key, value = fields[2], fields[3]
            if key not in _META_KEYS:
                raise MalformedRecord(line_no, f"unknown meta key {key!r}")
            if key == "note":
                builder.notes.append(value)
            else:
                builder.meta[key] = value
        else:
            record = _record_from_fields(kind, fields, line_no)
            if last_t is not None and not record.t > last_t:
                raise NonMonotonicTimestamp(_KIND_CHANNEL[kind], line_no)
            last_t = record.t
            merged.append((record.t, _KIND_RANK[kind], kind, record, line_no))
