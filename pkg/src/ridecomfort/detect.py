"""Comfort event detection on levelled, gravity-free, filtered data."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .core import Frame, SampleSeries
from .errors import InvalidArgument, InvalidDuration, WrongFrame


class EventKind(str, enum.Enum):
    FAST_ACCELERATION = "FastAcceleration"
    HARD_BRAKING = "HardBraking"
    AGGRESSIVE_CORNERING = "AggressiveCornering"
    POTHOLE = "Pothole"


DEFAULT_WEIGHTS = {
    EventKind.FAST_ACCELERATION: 5.0,
    EventKind.HARD_BRAKING: 5.0,
    EventKind.AGGRESSIVE_CORNERING: 3.0,
    EventKind.POTHOLE: 2.0,
}


@dataclass(frozen=True)
class Thresholds:
    """Trigger levels in m/s^2 plus episode hysteresis in seconds.

    ``accel_x`` and ``lateral_y`` are the passenger-derived comfort limits.
    ``brake_x`` mirrors ``accel_x`` on the negative x channel. The pothole
    level is experimental.
    """

    accel_x: float = 5.0
    brake_x: float = 5.0
    lateral_y: float = 0.75
    pothole_z: float = 3.0
    min_duration: float = 0.2
    merge_gap: float = 0.5

    def __post_init__(self):
        for name in ("accel_x", "brake_x", "lateral_y", "pothole_z"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise InvalidArgument(f"threshold {name} must be > 0, got {value}")
        for name in ("min_duration", "merge_gap"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise InvalidArgument(f"{name} must be >= 0, got {value}")

    def level(self, kind: EventKind) -> float:
        return {
            EventKind.FAST_ACCELERATION: self.accel_x,
            EventKind.HARD_BRAKING: self.brake_x,
            EventKind.AGGRESSIVE_CORNERING: self.lateral_y,
            EventKind.POTHOLE: self.pothole_z,
        }[kind]


@dataclass(frozen=True)
class ComfortEvent:
    kind: EventKind
    t_start: float
    t_end: float
    peak: float
    threshold: float

    def as_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "t_start": self.t_start,
            "t_end": self.t_end,
            "peak": self.peak,
            "threshold": self.threshold,
        }


@dataclass(frozen=True)
class RideReport:
    duration: float
    counts: dict[EventKind, int]
    events: tuple[ComfortEvent, ...]
    score: float
    weights: dict[EventKind, float] = field(default_factory=lambda: dict(DEFAULT_WEIGHTS), repr=False)


def _channel(series: SampleSeries, kind: EventKind) -> tuple[np.ndarray, np.ndarray]:
    """(signal whose sign carries the peak, boolean exceedance mask)."""
    a = series.accel
    if kind is EventKind.FAST_ACCELERATION:
        return a[:, 0], a[:, 0]
    if kind is EventKind.HARD_BRAKING:
        return a[:, 0], -a[:, 0]
    if kind is EventKind.AGGRESSIVE_CORNERING:
        return a[:, 1], np.abs(a[:, 1])
    return a[:, 2], np.abs(a[:, 2])


def _runs(mask: np.ndarray) -> list[tuple[int, int]]:
    """Inclusive index ranges of consecutive True values."""
    padded = np.concatenate([[False], mask, [False]]).astype(np.int8)
    edges = np.diff(padded)
    starts = np.flatnonzero(edges == 1)
    stops = np.flatnonzero(edges == -1) - 1
    return list(zip(starts.tolist(), stops.tolist()))


def detect_events(series: SampleSeries, th: Thresholds = Thresholds()) -> list[ComfortEvent]:
    """Threshold-crossing episodes per channel.

    An episode spans consecutive samples strictly beyond the threshold.
    Episodes shorter than ``min_duration`` are dropped, then same-kind
    episodes closer than ``merge_gap`` are joined.
    """
    if series.frame != Frame.VEHICLE:
        raise WrongFrame("event detection needs a vehicle-frame series")
    t = series.t
    events: list[ComfortEvent] = []
    for kind in EventKind:
        level = th.level(kind)
        signed, magnitude = _channel(series, kind)
        runs = [(i, j) for i, j in _runs(magnitude > level) if t[j] - t[i] >= th.min_duration]
        merged: list[list[int]] = []
        for i, j in runs:
            if merged and t[i] - t[merged[-1][1]] < th.merge_gap:
                merged[-1][1] = j
            else:
                merged.append([i, j])
        for i, j in merged:
            k = i + int(np.argmax(magnitude[i : j + 1]))
            events.append(ComfortEvent(kind, float(t[i]), float(t[j]), float(signed[k]), float(level)))
    order = list(EventKind)
    events.sort(key=lambda e: (e.t_start, order.index(e.kind)))
    return events


def score_ride(events, duration: float, weights: dict | None = None) -> RideReport:
    if not (math.isfinite(duration) and duration > 0):
        raise InvalidDuration(f"ride duration must be > 0, got {duration}")
    w = dict(DEFAULT_WEIGHTS)
    if weights:
        w.update({EventKind(k): float(v) for k, v in weights.items()})
    if any(not (math.isfinite(v) and v >= 0) for v in w.values()):
        raise InvalidArgument("score weights must be >= 0")
    events = tuple(events)
    counts = {kind: 0 for kind in EventKind}
    for e in events:
        counts[e.kind] += 1
    score = max(0.0, 100.0 - sum(w[e.kind] for e in events))
    return RideReport(duration=float(duration), counts=counts, events=events, score=score, weights=w)
