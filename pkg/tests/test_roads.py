from __future__ import annotations

import logging

import pytest
from conftest import line_log, straight_pose

from drivebench.errors import DuplicateId, EmptyNetwork, MalformedSegment, UnknownRoadType
from drivebench.metrics import compute_metrics, log_totals, path_distance
from drivebench.roads import (
    RoadNetwork,
    RoadSegment,
    classify_trip,
    load_network,
    match_point,
    per_type_metrics,
    speed_compliance,
)
from drivebench.segmentation import build_segments
from drivebench.telemetry import DriveLog, Pose, SpeedSample

TWO_SEGMENTS = """segment,a,dynamic,2.0
pt,0,0
pt,100,0
segment,b,regular,6.7
pt,100,0
pt,200,0
"""


def test_load_network_two_segments():
    network = load_network(TWO_SEGMENTS)
    assert len(network.segments) == 2
    assert network.segments[0].road_type == "dynamic"
    assert network.segments[1].speed_limit == 6.7


def test_load_network_rejects_single_vertex():
    with pytest.raises(MalformedSegment):
        load_network("segment,a,dynamic,2.0\npt,0,0\n")


def test_load_network_rejects_duplicate_id():
    text = TWO_SEGMENTS.replace("segment,b,", "segment,a,")
    with pytest.raises(DuplicateId):
        load_network(text)


def test_load_network_rejects_unknown_type():
    with pytest.raises(UnknownRoadType):
        load_network("segment,a,boulevard,2.0\npt,0,0\npt,1,0\n")


def test_load_network_rejects_zero_length_polyline():
    with pytest.raises(MalformedSegment):
        load_network("segment,a,dynamic,2.0\npt,5,5\npt,5,5\n")


def test_match_point_on_polyline_and_out_of_tolerance():
    network = load_network(TWO_SEGMENTS)
    assert match_point(network, (50.0, 0.0), 5.0) == "a"
    assert match_point(network, (50.0, 50.0), 5.0) is None


def test_match_point_tie_breaks_to_smallest_id():
    network = RoadNetwork(
        (
            RoadSegment("b", "regular", ((0.0, 2.0), (10.0, 2.0)), 5.0),
            RoadSegment("a", "regular", ((0.0, -2.0), (10.0, -2.0)), 5.0),
        )
    )
    assert match_point(network, (5.0, 0.0), 5.0) == "a"


def test_match_point_empty_network():
    with pytest.raises(EmptyNetwork):
        match_point(RoadNetwork(()), (0.0, 0.0), 5.0)


def test_classify_trip_two_types():
    network = load_network(TWO_SEGMENTS)
    log = line_log(length=200.0, speed=2.0)
    composition = classify_trip(log, network, 5.0)
    assert composition.unmatched_distance == pytest.approx(0.0)
    assert composition.fractions["dynamic"] == pytest.approx(0.5, abs=1e-3)
    assert composition.fractions["regular"] == pytest.approx(0.5, abs=1e-3)


def test_classify_trip_fraction_conservation():
    network = load_network(TWO_SEGMENTS)
    log = line_log(length=300.0, speed=2.0)  # last 100 m unmatched
    composition = classify_trip(log, network, 5.0)
    total = path_distance(log.poses, log.poses[0].t, log.poses[-1].t)
    attributed = composition.matched_distance + composition.unmatched_distance
    assert attributed == pytest.approx(total, rel=1e-6)
    # Endpoint distance keeps matching up to one tolerance past the polyline end.
    assert composition.unmatched_distance == pytest.approx(95.0, abs=1.0)
    assert sum(composition.fractions.values()) == pytest.approx(1.0, abs=1e-9)


def test_classify_trip_scale_and_translation_invariance():
    network = load_network(TWO_SEGMENTS)
    log = line_log(length=200.0)
    base = classify_trip(log, network, 5.0)

    def shift(points, dx, dy):
        return tuple((x + dx, y + dy) for x, y in points)

    moved_net = RoadNetwork(
        tuple(RoadSegment(s.id, s.road_type, shift(s.polyline, 500.0, -40.0), s.speed_limit) for s in network.segments)
    )
    moved_log = DriveLog(
        log_id=log.log_id,
        poses=tuple(Pose(p.t, p.x + 500.0, p.y - 40.0, p.z, p.q0, p.q1, p.q2, p.q3) for p in log.poses),
        speeds=log.speeds,
        engagement=log.engagement,
    )
    moved = classify_trip(moved_log, moved_net, 5.0)
    for road_type in base.fractions:
        assert moved.fractions[road_type] == pytest.approx(base.fractions[road_type], abs=1e-12)

    scaled_net = RoadNetwork(
        tuple(
            RoadSegment(s.id, s.road_type, tuple((3 * x, 3 * y) for x, y in s.polyline), s.speed_limit)
            for s in network.segments
        )
    )
    scaled_log = DriveLog(
        log_id=log.log_id,
        poses=tuple(Pose(p.t, 3 * p.x, 3 * p.y, 3 * p.z, p.q0, p.q1, p.q2, p.q3) for p in log.poses),
        speeds=log.speeds,
        engagement=log.engagement,
    )
    scaled = classify_trip(scaled_log, scaled_net, 15.0)
    for road_type in base.fractions:
        assert scaled.fractions[road_type] == pytest.approx(base.fractions[road_type], abs=1e-9)


def test_per_type_metrics_single_segment_equals_whole_log():
    network = load_network("segment,only,regular,6.7\npt,0,0\npt,100,0\n")
    log = line_log(disabled_windows=((15.0, 20.0),))
    segments = build_segments(log.engagement)
    (report,) = per_type_metrics(log, segments, network, 5.0)
    whole = compute_metrics(log_totals(log))
    assert report.group_key == "regular"
    assert report.totals.n_interventions == whole.totals.n_interventions == 1
    assert report.totals.auto_distance == pytest.approx(whole.totals.auto_distance, abs=1e-6)
    assert report.mdbi_a == pytest.approx(whole.mdbi_a, abs=1e-6)


def test_per_type_metrics_split_types_and_limit_state():
    network = load_network(TWO_SEGMENTS)
    # Interventions at x in [30,40] and [60,70]: both on the dynamic half.
    log = line_log(length=200.0, disabled_windows=((15.0, 20.0), (30.0, 35.0)))
    segments = build_segments(log.engagement)
    reports = {r.group_key: r for r in per_type_metrics(log, segments, network, 5.0)}
    assert set(reports) == {"dynamic", "regular"}
    dynamic = reports["dynamic"]
    assert dynamic.totals.n_interventions == 2
    assert dynamic.mdbi_a == pytest.approx(dynamic.totals.auto_distance / 2)
    assert dynamic.totals.manual_distance == pytest.approx(20.0, abs=0.5)
    regular = reports["regular"]
    assert regular.no_interventions
    assert regular.mdbi_a is None
    assert regular.totals.auto_distance == pytest.approx(100.0, abs=0.5)


def test_per_type_intervention_counts_sum_to_total():
    network = load_network(TWO_SEGMENTS)
    log = line_log(length=200.0, disabled_windows=((15.0, 20.0), (60.0, 62.0)))
    segments = build_segments(log.engagement)
    reports = per_type_metrics(log, segments, network, 5.0)
    assert sum(r.totals.n_interventions for r in reports) == log_totals(log).n_interventions


def test_per_type_metrics_nothing_matched_warns(caplog):
    network = load_network("segment,far,regular,6.7\npt,0,9000\npt,100,9000\n")
    log = line_log(disabled_windows=((15.0, 20.0),))
    segments = build_segments(log.engagement)
    with caplog.at_level(logging.WARNING):
        reports = per_type_metrics(log, segments, network, 5.0)
    assert reports == []
    assert any("matched" in rec.message for rec in caplog.records)


def test_speed_compliance_strict_threshold():
    network = load_network("segment,walk,dynamic,2.0\npt,0,0\npt,100,0\n")
    poses = tuple(straight_pose(float(t), float(t)) for t in range(11))
    speeds = (
        SpeedSample(1.0, 1.9, "measured"),
        SpeedSample(2.0, 2.0, "measured"),
        SpeedSample(3.0, 2.5, "measured"),
    )
    log = DriveLog(log_id="c", poses=poses, speeds=speeds)
    result = speed_compliance(log, network, 5.0)
    assert result.violations == ((3.0, 2.5, 2.0),)
    assert result.skipped == 0


def test_speed_compliance_unmatched_samples_tallied():
    network = load_network("segment,walk,dynamic,2.0\npt,0,5000\npt,100,5000\n")
    poses = (straight_pose(0.0, 0.0), straight_pose(1.0, 1.0))
    speeds = (SpeedSample(0.5, 9.0, "measured"),)
    log = DriveLog(log_id="c", poses=poses, speeds=speeds)
    result = speed_compliance(log, network, 5.0)
    assert result.violations == ()
    assert result.skipped == 1
