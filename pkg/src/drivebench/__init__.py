"""Drive-log benchmarking: normalized robustness metrics, intervention maps,
road-type composition and control spectra, with a synthetic-log oracle."""

from .errors import DrivebenchError
from .gridmap import OccupancyGrid, Region, associate_dbw_pose, build_grid, export_grid, region_metrics
from .ingest import parse_csv_bundle, parse_log, parse_log_file, serialize_log, write_log_file
from .metrics import (
    MetricsReport,
    ModeTotals,
    compute_metrics,
    group_metrics,
    log_totals,
    path_distance,
    segment_totals,
    speed_distance,
)
from .roads import (
    RoadNetwork,
    RoadSegment,
    TripComposition,
    classify_trip,
    load_network,
    match_pose,
    per_type_metrics,
    speed_compliance,
)
from .segmentation import EdgeEvent, Segment, build_segments, count_interventions, detect_edges
from .spectrum import Spectrum, UniformSeries, compare_modes, resample_uniform, spectrum, trip_uptime
from .synth import GroundTruth, SynthScenario, make_scenario, parse_scenario, synth_log
from .telemetry import (
    ActuatorSample,
    DriveLog,
    EngagementSample,
    GpsFix,
    ImuSample,
    Pose,
    SpeedSample,
    ValidationIssue,
    validate_log,
)

__version__ = "0.1.0"

__all__ = [
    "ActuatorSample",
    "DriveLog",
    "DrivebenchError",
    "EdgeEvent",
    "EngagementSample",
    "GpsFix",
    "GroundTruth",
    "ImuSample",
    "MetricsReport",
    "ModeTotals",
    "OccupancyGrid",
    "Pose",
    "Region",
    "RoadNetwork",
    "RoadSegment",
    "Segment",
    "Spectrum",
    "SpeedSample",
    "SynthScenario",
    "TripComposition",
    "UniformSeries",
    "ValidationIssue",
    "associate_dbw_pose",
    "build_grid",
    "build_segments",
    "classify_trip",
    "compare_modes",
    "compute_metrics",
    "count_interventions",
    "detect_edges",
    "export_grid",
    "group_metrics",
    "load_network",
    "log_totals",
    "make_scenario",
    "match_pose",
    "parse_csv_bundle",
    "parse_log",
    "parse_log_file",
    "parse_scenario",
    "path_distance",
    "per_type_metrics",
    "region_metrics",
    "resample_uniform",
    "segment_totals",
    "serialize_log",
    "spectrum",
    "speed_compliance",
    "speed_distance",
    "synth_log",
    "trip_uptime",
    "validate_log",
    "write_log_file",
]
