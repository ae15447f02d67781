"""Exception types shared across the toolkit."""
from __future__ import annotations


class DrivebenchError(Exception):
    """Base class for all toolkit errors."""


class MalformedRecord(DrivebenchError):
    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no
        self.reason = reason


class UnknownKind(DrivebenchError):
    def __init__(self, line_no: int, kind: str):
        super().__init__(f"line {line_no}: unknown record kind {kind!r}")
        self.line_no = line_no
        self.kind = kind


class NonMonotonicTimestamp(DrivebenchError):
    def __init__(self, channel: str, line_no: int):
        super().__init__(f"line {line_no}: non-monotonic timestamp in channel {channel!r}")
        self.channel = channel
        self.line_no = line_no


class MissingColumn(DrivebenchError):
    def __init__(self, kind: str, column: str):
        super().__init__(f"{kind} csv: missing column {column!r}")
        self.kind = kind
        self.column = column


class InvalidLog(DrivebenchError):
    """Raised when an operation requires a log that validates cleanly."""

    def __init__(self, issues):
        super().__init__(f"log fails validation ({len(issues)} issue(s)); first: {issues[0]}")
        self.issues = list(issues)


class InvalidScenario(DrivebenchError):
    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


class EmptyChannel(DrivebenchError):
    def __init__(self, channel: str):
        super().__init__(f"channel {channel!r} is empty")
        self.channel = channel


class NoPosesInRange(DrivebenchError):
    pass


class NoSpeedInRange(DrivebenchError):
    pass


class NonPositiveCellSize(DrivebenchError):
    pass


class DegeneratePolygon(DrivebenchError):
    pass


class MalformedSegment(DrivebenchError):
    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no
        self.reason = reason


class DuplicateId(DrivebenchError):
    def __init__(self, segment_id: str):
        super().__init__(f"duplicate road segment id {segment_id!r}")
        self.segment_id = segment_id


class UnknownRoadType(DrivebenchError):
    def __init__(self, road_type: str):
        super().__init__(f"unknown road type {road_type!r}")
        self.road_type = road_type


class EmptyNetwork(DrivebenchError):
    pass


class TooFewSamples(DrivebenchError):
    pass


class InsufficientModeData(DrivebenchError):
    def __init__(self, mode: str):
        super().__init__(f"insufficient data for mode {mode!r}")
        self.mode = mode


class UnknownGroupKey(DrivebenchError):
    pass
