from __future__ import annotations

import random

import pytest
from conftest import engagement_channel

from drivebench.errors import EmptyChannel
from drivebench.segmentation import (
    EdgeEvent,
    build_segments,
    count_interventions,
    detect_edges,
)


def test_edges_from_plain_signal():
    eng = engagement_channel([(0, 1), (1, 1), (2, 0), (3, 0), (4, 1)])
    edges = detect_edges(eng)
    assert edges == [EdgeEvent(2.0, "falling"), EdgeEvent(4.0, "rising")]


def test_constant_signal_has_no_edges():
    eng = engagement_channel([(0, 1), (1, 1), (2, 1)])
    assert detect_edges(eng) == []


def test_debounce_removes_short_blip():
    eng = engagement_channel([(0, 1), (1, 0), (1.2, 1), (5, 0)])
    edges = detect_edges(eng, min_dwell=0.5)
    assert edges == [EdgeEvent(5.0, "falling")]


def test_debounce_zero_is_identity():
    rng = random.Random(5)
    samples = [(0.0, 1)]
    t = 0.0
    for _ in range(100):
        t += rng.uniform(0.01, 2.0)
        samples.append((t, rng.randint(0, 1)))
    eng = engagement_channel(samples)
    assert detect_edges(eng, 0.0) == detect_edges(eng)


def test_empty_channel_raises():
    with pytest.raises(EmptyChannel):
        detect_edges(())


def test_segments_tile_range():
    eng = engagement_channel([(0, 1), (2, 0), (4, 1)])
    segments = build_segments(eng, t_end=6.0)
    assert [(s.mode, s.t_start, s.t_end) for s in segments] == [
        ("autonomous", 0.0, 2.0),
        ("manual", 2.0, 4.0),
        ("autonomous", 4.0, 6.0),
    ]
    assert all(s.uptime == s.t_end - s.t_start for s in segments)


def test_single_sample_degenerate_segment():
    eng = engagement_channel([(0, 1)])
    segments = build_segments(eng, t_end=10.0)
    assert [(s.mode, s.t_start, s.t_end) for s in segments] == [("autonomous", 0.0, 10.0)]


def test_segments_after_debounce():
    eng = engagement_channel([(0, 1), (1, 0), (1.2, 1), (5, 0), (6, 0)])
    segments = build_segments(eng, min_dwell=0.5)
    assert [(s.mode, s.t_start, s.t_end) for s in segments] == [
        ("autonomous", 0.0, 5.0),
        ("manual", 5.0, 6.0),
    ]


def test_count_two_enclosed_manual_periods():
    eng = engagement_channel([(0, 1), (2, 0), (3, 1), (5, 0), (7, 1), (9, 1)])
    segments = build_segments(eng)
    assert count_interventions(segments) == 2
    assert count_interventions(detect_edges(eng)) == 2


def test_count_all_autonomous_is_zero():
    eng = engagement_channel([(0, 1), (5, 1)])
    assert count_interventions(build_segments(eng)) == 0


def test_initial_manual_period_not_counted():
    eng = engagement_channel([(0, 0), (3, 1), (9, 1)])
    segments = build_segments(eng)
    assert segments[0].mode == "manual"
    assert count_interventions(segments) == 0
    assert count_interventions(detect_edges(eng)) == 0


def _random_engagement(rng: random.Random):
    samples = []
    t = 0.0
    for _ in range(rng.randint(2, 200)):
        samples.append((t, rng.randint(0, 1)))
        t += rng.uniform(0.05, 3.0)
    return engagement_channel(samples)


def test_uptime_sums_to_span_randomized():
    rng = random.Random(13)
    for _ in range(50):
        eng = _random_engagement(rng)
        segments = build_segments(eng)
        total = sum(s.uptime for s in segments)
        span = eng[-1].t - eng[0].t
        assert total == pytest.approx(span, abs=1e-9)


def test_manual_segment_count_vs_falling_edges_randomized():
    rng = random.Random(17)
    for _ in range(50):
        eng = _random_engagement(rng)
        segments = build_segments(eng)
        falling = sum(1 for e in detect_edges(eng) if e.direction == "falling")
        manual = sum(1 for s in segments if s.mode == "manual")
        # A trailing zero-length manual piece is dropped, hence the -1 slack.
        assert manual in (falling, falling + 1) or manual == falling - 1


def test_segments_alternate_modes_randomized():
    rng = random.Random(23)
    for _ in range(50):
        segments = build_segments(_random_engagement(rng))
        for a, b in zip(segments, segments[1:]):
            assert a.mode != b.mode
            assert a.t_end == b.t_start
