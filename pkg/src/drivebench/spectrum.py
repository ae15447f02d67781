"""Frequency-domain comparison of control signals between driving modes.

Control channels (speed, acceleration, brake, steering) are resampled onto
a uniform grid per segment, mean-removed, windowed and transformed; one
magnitude spectrum per mode comes from averaging the per-segment spectra
weighted by segment duration. Resampling is done per segment so no data is
fabricated across a manual/autonomous boundary.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import EmptyChannel, InsufficientModeData, TooFewSamples
from .segmentation import AUTONOMOUS, MANUAL, Segment
from .telemetry import DriveLog

CHANNELS = ("speed", "acceleration", "brake", "steering")
WINDOWS = ("rect", "hann")

MIN_MODE_SECONDS = 4.0
MIN_SPECTRUM_SAMPLES = 4


@dataclass(frozen=True, slots=True)
class UniformSeries:
    t0: float
    rate: float
    values: tuple[float, ...]


@dataclass(frozen=True, slots=True)
class Spectrum:
    """One-sided magnitude spectrum, bins 0..N/2 spaced by resolution Hz."""

    resolution: float
    magnitudes: tuple[float, ...]

    def frequencies(self) -> tuple[float, ...]:
        return tuple(i * self.resolution for i in range(len(self.magnitudes)))


def resample_uniform(samples: Sequence[tuple[float, float]], rate: float) -> UniformSeries:
    """Linear interpolation onto the uniform grid spanning [first.t, last.t]."""
    if rate <= 0:
        raise ValueError("rate must be > 0")
    if len(samples) < 2:
        raise TooFewSamples(f"need >= 2 samples to resample, got {len(samples)}")
    times = np.array([t for t, _ in samples], dtype=float)
    values = np.array([v for _, v in samples], dtype=float)
    span = float(times[-1] - times[0])
    n = int(math.floor(span * rate + 1e-9)) + 1
    grid = times[0] + np.arange(n) / rate
    resampled = np.interp(grid, times, values)
    return UniformSeries(float(times[0]), rate, tuple(float(v) for v in resampled))


def _window(name: str, n: int) -> np.ndarray:
    if name == "rect":
        return np.ones(n)
    if name == "hann":
        return np.hanning(n)
    raise ValueError(f"unknown window {name!r}")


def spectrum(series: UniformSeries, window: str = "hann") -> Spectrum:
    """Magnitude of the transform of the mean-removed, windowed series."""
    n = len(series.values)
    if n < MIN_SPECTRUM_SAMPLES:
        raise TooFewSamples(f"need >= {MIN_SPECTRUM_SAMPLES} samples, got {n}")
    x = np.asarray(series.values, dtype=float)
    x = (x - x.mean()) * _window(window, n)
    magnitudes = np.abs(np.fft.rfft(x))
    return Spectrum(series.rate / n, tuple(float(m) for m in magnitudes))


def channel_samples(log: DriveLog, channel: str) -> list[tuple[float, float]]:
    """Timestamped values of one control channel."""
    if channel == "speed":
        return [(s.t, s.v) for s in log.speeds if s.kind == "measured"]
    if channel in ("acceleration", "brake", "steering"):
        return [(a.t, a.value) for a in log.actuators if a.channel == channel]
    raise ValueError(f"unknown channel {channel!r}")


def compare_modes(
    log: DriveLog,
    segments: Sequence[Segment],
    channel: str,
    rate: float = 10.0,
    window: str = "hann",
) -> tuple[Spectrum, Spectrum]:
    """(autonomous, manual) spectra of one channel.

    Each segment is resampled independently; per-segment spectra are
    zero-padded to a common length and averaged bin-wise, weighted by
    segment duration. Raises InsufficientModeData for a mode with less
    than four seconds of usable signal.
    """
    samples = channel_samples(log, channel)
    if not samples:
        raise EmptyChannel(channel)
    per_mode: dict[str, list[tuple[float, UniformSeries]]] = {AUTONOMOUS: [], MANUAL: []}
    for segment in segments:
        in_range = [(t, v) for t, v in samples if segment.t_start <= t <= segment.t_end]
        if len(in_range) < 2:
            continue
        series = resample_uniform(in_range, rate)
        if len(series.values) < MIN_SPECTRUM_SAMPLES:
            continue
        per_mode[segment.mode].append((segment.uptime, series))

    for mode in (AUTONOMOUS, MANUAL):
        usable = sum(weight for weight, _ in per_mode[mode])
        if usable + 1e-9 < MIN_MODE_SECONDS:
            raise InsufficientModeData(mode)

    n_common = max(len(series.values) for entries in per_mode.values() for _, series in entries)
    return (
        _averaged_spectrum(per_mode[AUTONOMOUS], window, rate, n_common),
        _averaged_spectrum(per_mode[MANUAL], window, rate, n_common),
    )


def _averaged_spectrum(entries: list[tuple[float, UniformSeries]], window: str, rate: float, n_common: int) -> Spectrum:
    accumulated = np.zeros(n_common // 2 + 1)
    total_weight = 0.0
    for weight, series in entries:
        n = len(series.values)
        x = np.asarray(series.values, dtype=float)
        x = (x - x.mean()) * _window(window, n)
        padded = np.zeros(n_common)
        padded[:n] = x
        accumulated += weight * np.abs(np.fft.rfft(padded))
        total_weight += weight
    return Spectrum(rate / n_common, tuple(float(m) for m in accumulated / total_weight))


def trip_uptime(log: DriveLog) -> float:
    """Elapsed time covered by the engagement channel."""
    if not log.engagement:
        raise EmptyChannel("engagement")
    return log.engagement[-1].t - log.engagement[0].t
