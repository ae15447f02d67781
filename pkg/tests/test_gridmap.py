from __future__ import annotations

import random

import numpy as np
import pytest
from conftest import engagement_channel, line_log, straight_pose

from drivebench.errors import DegeneratePolygon, EmptyChannel, NonPositiveCellSize
from drivebench.gridmap import (
    Region,
    associate_dbw_pose,
    build_grid,
    export_grid,
    parse_region,
    region_metrics,
)
from drivebench.metrics import compute_metrics, log_totals
from drivebench.segmentation import build_segments
from drivebench.telemetry import DriveLog, EngagementSample


def _pose_log(points, enabled, log_id="g"):
    poses = tuple(straight_pose(float(i), x, y) for i, (x, y) in enumerate(points))
    engagement = tuple(EngagementSample(float(i), bool(v)) for i, v in enumerate(enabled))
    return DriveLog(log_id=log_id, poses=poses, engagement=engagement)


def test_associate_nearest_timestamp():
    log = DriveLog(
        poses=(straight_pose(1.0, 0.0),),
        engagement=(EngagementSample(0.9, True), EngagementSample(1.4, False)),
    )
    (pair,) = associate_dbw_pose(log)
    assert pair[1] is True


def test_associate_tie_goes_to_earlier_sample():
    log = DriveLog(
        poses=(straight_pose(1.25, 0.0),),
        engagement=(EngagementSample(1.0, True), EngagementSample(1.5, False)),
    )
    (pair,) = associate_dbw_pose(log)
    assert pair[1] is True


def test_associate_single_engage_sample_pairs_everything():
    log = DriveLog(
        poses=tuple(straight_pose(float(t), float(t)) for t in range(5)),
        engagement=(EngagementSample(2.0, False),),
    )
    pairs = associate_dbw_pose(log)
    assert len(pairs) == 5
    assert all(enabled is False for _, enabled in pairs)


def test_associate_requires_both_channels():
    with pytest.raises(EmptyChannel):
        associate_dbw_pose(DriveLog(poses=(straight_pose(0.0, 0.0),)))
    with pytest.raises(EmptyChannel):
        associate_dbw_pose(DriveLog(engagement=(EngagementSample(0.0, True),)))


def test_single_disabled_pose_counts_once():
    log = _pose_log([(2.3, 5.7)], [0])
    grid = build_grid(log, 1.0)
    assert grid.counts[2][5] == 1
    assert grid.normalized[2][5] == 1.0


def test_three_event_hand_count():
    log = _pose_log([(2.3, 5.7), (2.9, 5.1), (7.4, 1.2)], [0, 0, 0])
    grid = build_grid(log, 1.0, "sample")
    assert grid.counts[2][5] == 2
    assert grid.counts[7][1] == 1
    assert grid.normalized[2][5] == 1.0
    assert grid.normalized[7][1] == 0.5
    assert grid.counts.sum() == 3


def test_fully_enabled_log_is_all_zero():
    log = _pose_log([(1.5, 1.5), (2.5, 2.5)], [1, 1])
    grid = build_grid(log)
    assert grid.counts.sum() == 0
    assert grid.normalized.max() == 0.0


def test_edge_mode_counts_runs_not_samples():
    points = [(0.5, 0.5), (1.5, 0.5), (2.5, 0.5), (3.5, 0.5), (4.5, 0.5), (5.5, 0.5)]
    enabled = [1, 0, 0, 1, 0, 1]
    log = _pose_log(points, enabled)
    sample_grid = build_grid(log, 1.0, "sample")
    edge_grid = build_grid(log, 1.0, "edge")
    assert sample_grid.counts.sum() == 3
    assert edge_grid.counts.sum() == 2
    segments = build_segments(log.engagement)
    assert edge_grid.counts.sum() == sum(1 for s in segments if s.mode == "manual")


def test_negative_coordinates_extend_the_grid():
    log = _pose_log([(-2.5, -1.5), (2.5, 1.5)], [0, 0])
    grid = build_grid(log, 1.0)
    assert grid.origin == (-3.0, -2.0)
    assert grid.counts[0][0] == 1  # the (-2.5, -1.5) event
    assert grid.counts.sum() == 2


def test_translation_consistency():
    rng = random.Random(41)
    points = [(rng.uniform(0, 30), rng.uniform(0, 30)) for _ in range(40)]
    enabled = [rng.randint(0, 1) for _ in range(40)]
    log = _pose_log(points, enabled)
    grid = build_grid(log, 2.0, origin=(0.0, 0.0))
    dx, dy = 13.0, -7.0
    shifted = _pose_log([(x + dx, y + dy) for x, y in points], enabled)
    shifted_grid = build_grid(shifted, 2.0, origin=(dx, dy))
    assert np.array_equal(grid.counts, shifted_grid.counts)


def test_halving_cell_size_refines_counts():
    rng = random.Random(43)
    points = [(rng.uniform(0, 16), rng.uniform(0, 16)) for _ in range(60)]
    enabled = [rng.randint(0, 1) for _ in range(60)]
    log = _pose_log(points, enabled)
    coarse = build_grid(log, 2.0)
    fine = build_grid(log, 1.0)
    for ix in range(coarse.width):
        for iy in range(coarse.height):
            children = fine.counts[2 * ix : 2 * ix + 2, 2 * iy : 2 * iy + 2].sum()
            assert children == coarse.counts[ix][iy]


def test_cell_size_must_be_positive():
    log = _pose_log([(0.5, 0.5)], [0])
    with pytest.raises(NonPositiveCellSize):
        build_grid(log, 0.0)


def test_export_csv_nonzero_cells_row_major():
    log = _pose_log([(2.3, 5.7), (2.9, 5.1), (7.4, 1.2)], [0, 0, 0])
    data = export_grid(build_grid(log), "csv").decode()
    assert data.splitlines() == [
        "x_index,y_index,count,normalized",
        "2,5,2,1.000000",
        "7,1,1,0.500000",
    ]


def test_export_pgm_single_event():
    log = _pose_log([(0.5, 0.5)], [0])
    data = export_grid(build_grid(log), "pgm").decode()
    assert data.splitlines() == ["P2", "1 1", "255", "255"]


def test_export_pgm_half_normalized_rounds_up():
    # Two hits in cell 0 and one in cell 2: normalized 1.0, 0, 0.5 -> 255, 0, 128.
    log = _pose_log([(0.5, 0.5), (0.6, 0.5), (2.5, 0.5)], [0, 0, 0])
    data = export_grid(build_grid(log), "pgm").decode()
    rows = data.splitlines()[3:]
    assert rows == ["255 0 128"]


def test_export_pgm_empty_grid_is_zeros():
    log = _pose_log([(0.5, 0.5), (1.5, 0.5)], [1, 1])
    data = export_grid(build_grid(log), "pgm").decode()
    assert data.splitlines()[3:] == ["0 0"]


def test_export_pgm_orientation_row0_is_highest_y():
    log = _pose_log([(0.5, 2.5), (0.6, 0.5)], [0, 1])
    grid = build_grid(log)
    rows = export_grid(grid, "pgm").decode().splitlines()[3:]
    assert rows[0] == "255"  # y=2 row first
    assert rows[2] == "0"


def test_region_identity_equals_whole_log_report():
    log = line_log(disabled_windows=((15.0, 20.0), (30.0, 35.0)))
    segments = build_segments(log.engagement)
    region = Region(((-10.0, -10.0), (110.0, -10.0), (110.0, 10.0), (-10.0, 10.0)))
    regional = region_metrics(log, segments, region)
    whole = compute_metrics(log_totals(log))
    assert regional.totals.auto_distance == pytest.approx(whole.totals.auto_distance)
    assert regional.totals.manual_distance == pytest.approx(whole.totals.manual_distance)
    assert regional.totals.n_interventions == whole.totals.n_interventions
    assert regional.mdbi == pytest.approx(whole.mdbi)


def test_region_without_interventions_reports_limit_state():
    log = line_log(disabled_windows=((15.0, 20.0),))
    segments = build_segments(log.engagement)
    region = Region(((0.0, -1.0), (20.0, -1.0), (20.0, 1.0), (0.0, 1.0)))
    report = region_metrics(log, segments, region)
    assert report.no_interventions
    assert report.mdbi_a is None
    assert report.mdbi_m == 0.0
    assert report.totals.auto_distance > 0.0


def test_region_clips_one_of_two_interventions():
    # Manual runs cover x in [30,40] and [60,70]; region keeps x >= 50.
    log = line_log(disabled_windows=((15.0, 20.0), (30.0, 35.0)))
    segments = build_segments(log.engagement)
    region = Region(((50.0, -1.0), (100.0, -1.0), (100.0, 1.0), (50.0, 1.0)))
    report = region_metrics(log, segments, region)
    assert report.totals.n_interventions == 1
    assert report.totals.auto_distance == pytest.approx(40.0)
    assert report.totals.manual_distance == pytest.approx(10.0)
    assert report.totals.auto_uptime == pytest.approx(20.0)
    assert report.totals.manual_uptime == pytest.approx(5.0)


def test_degenerate_polygons_rejected():
    log = line_log()
    segments = build_segments(log.engagement)
    with pytest.raises(DegeneratePolygon):
        region_metrics(log, segments, Region(((0.0, 0.0), (1.0, 0.0))))
    with pytest.raises(DegeneratePolygon):
        region_metrics(log, segments, Region(((0.0, 0.0), (1.0, 0.0), (2.0, 0.0))))


def test_parse_region():
    region = parse_region("vertex,0,0\nvertex,10,0\nvertex,10,10\n# done\n")
    assert region.polygon == ((0.0, 0.0), (10.0, 0.0), (10.0, 10.0))
    with pytest.raises(DegeneratePolygon):
        parse_region("vertex,0,0\nvertex,1,1\n")
