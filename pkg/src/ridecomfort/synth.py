"""Synthetic rides with known mounting, noise and event inventory.

Vehicle-frame model per sample ``k`` (x forward, y left, z up):

    accel = (a_long, v * yaw_rate, g + roughness)
    gyro  = (0, 0, yaw_rate)

where ``v`` is the trapezoidal running integral of ``a_long`` starting from
rest. Device-frame output is ``mounting.T`` applied to those vectors, plus
independent Gaussian noise per axis and a constant gyro bias.

Random numbers come from numpy's PCG64 bit generator seeded with
``Scenario.seed`` and are drawn in a fixed order: roughness (n values), then
accelerometer noise (n x 3), then gyroscope noise (n x 3). A draw is skipped
entirely when its sigma is zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import GRAVITY, Frame, Rotation, SampleSeries, Vec3
from .detect import ComfortEvent, EventKind, Thresholds
from .errors import InvalidRotation, InvalidScenario


@dataclass(frozen=True)
class Segment:
    duration: float
    longitudinal_accel: float = 0.0
    yaw_rate: float = 0.0
    roughness_sigma: float = 0.0

    def __post_init__(self):
        values = (self.duration, self.longitudinal_accel, self.yaw_rate, self.roughness_sigma)
        if not all(math.isfinite(v) for v in values):
            raise InvalidScenario(f"non-finite segment field in {self}")
        if self.duration <= 0:
            raise InvalidScenario(f"segment duration must be > 0, got {self.duration}")
        if self.roughness_sigma < 0:
            raise InvalidScenario("roughness_sigma must be >= 0")


@dataclass(frozen=True)
class Scenario:
    """A ride to synthesise. ``mounting`` is the device-to-vehicle rotation
    an ideal alignment estimate would return."""

    segments: tuple[Segment, ...]
    sample_rate: float = 50.0
    mounting: Rotation = field(default_factory=Rotation.identity)
    accel_noise_sigma: float = 0.0
    gyro_noise_sigma: float = 0.0
    gyro_bias: Vec3 = Vec3(0.0, 0.0, 0.0)
    seed: int = 0
    gravity: float = GRAVITY

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))
        if not self.segments:
            raise InvalidScenario("scenario needs at least one segment")
        if not (math.isfinite(self.sample_rate) and self.sample_rate > 0):
            raise InvalidScenario(f"sample_rate must be > 0, got {self.sample_rate}")
        if not isinstance(self.mounting, Rotation):
            try:
                object.__setattr__(self, "mounting", Rotation(np.asarray(self.mounting, dtype=float)))
            except (InvalidRotation, ValueError) as exc:
                raise InvalidScenario(f"invalid mounting: {exc}") from exc
        if not isinstance(self.gyro_bias, Vec3):
            object.__setattr__(self, "gyro_bias", Vec3.from_array(self.gyro_bias))
        for name in ("accel_noise_sigma", "gyro_noise_sigma"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise InvalidScenario(f"{name} must be >= 0, got {v}")

    @property
    def duration(self) -> float:
        return float(sum(s.duration for s in self.segments))

    @classmethod
    def from_dict(cls, d: dict) -> "Scenario":
        known = {
            "segments", "sample_rate", "mounting", "accel_noise_sigma",
            "gyro_noise_sigma", "gyro_bias", "seed", "gravity",
        }
        unknown = set(d) - known
        if unknown:
            raise InvalidScenario(f"unknown scenario keys: {sorted(unknown)}")
        try:
            segments = tuple(Segment(**s) for s in d["segments"])
        except (KeyError, TypeError) as exc:
            raise InvalidScenario(f"bad segments: {exc}") from exc
        kwargs = {k: v for k, v in d.items() if k != "segments"}
        if "mounting" in kwargs:
            kwargs["mounting"] = np.asarray(kwargs["mounting"], dtype=float)
        if "gyro_bias" in kwargs:
            kwargs["gyro_bias"] = Vec3.from_array(kwargs["gyro_bias"])
        try:
            return cls(segments=segments, **kwargs)
        except TypeError as exc:
            raise InvalidScenario(str(exc)) from exc

    def to_dict(self) -> dict:
        return {
            "segments": [
                {
                    "duration": s.duration,
                    "longitudinal_accel": s.longitudinal_accel,
                    "yaw_rate": s.yaw_rate,
                    "roughness_sigma": s.roughness_sigma,
                }
                for s in self.segments
            ],
            "sample_rate": self.sample_rate,
            "mounting": self.mounting.m.tolist(),
            "accel_noise_sigma": self.accel_noise_sigma,
            "gyro_noise_sigma": self.gyro_noise_sigma,
            "gyro_bias": list(self.gyro_bias),
            "seed": self.seed,
            "gravity": self.gravity,
        }


@dataclass(frozen=True, eq=False)
class GroundTruth:
    mounting: Rotation
    true_events: tuple[ComfortEvent, ...]
    vehicle: SampleSeries  # ideal vehicle-frame signals, gravity included
    speed: np.ndarray
    segment_index: np.ndarray


def random_rotation(rng: np.random.Generator) -> Rotation:
    """Uniformly distributed rotation from a normalised Gaussian quaternion."""
    q = rng.standard_normal(4)
    w, x, y, z = q / np.linalg.norm(q)
    m = np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )
    return Rotation(m)


def _truth_events(
    t: np.ndarray, seg: np.ndarray, vehicle_accel: np.ndarray, g: float, th: Thresholds
) -> tuple[ComfortEvent, ...]:
    """Episodes read off the ideal signals segment by segment.

    Within each segment the exceeding samples of a channel are grouped into
    runs; runs of one kind are then chained across segments when the gap
    between them is below ``merge_gap`` and finally gated by ``min_duration``.
    """
    channels = {
        EventKind.FAST_ACCELERATION: (vehicle_accel[:, 0], vehicle_accel[:, 0] > th.accel_x),
        EventKind.HARD_BRAKING: (vehicle_accel[:, 0], vehicle_accel[:, 0] < -th.brake_x),
        EventKind.AGGRESSIVE_CORNERING: (vehicle_accel[:, 1], np.abs(vehicle_accel[:, 1]) > th.lateral_y),
        EventKind.POTHOLE: (vehicle_accel[:, 2] - g, np.abs(vehicle_accel[:, 2] - g) > th.pothole_z),
    }
    events = []
    for kind, (signal, hit) in channels.items():
        spans: list[list[int]] = []
        for s in np.unique(seg):
            idx = np.flatnonzero((seg == s) & hit)
            if len(idx) == 0:
                continue
            breaks = np.flatnonzero(np.diff(idx) > 1)
            for a, b in zip(np.r_[0, breaks + 1], np.r_[breaks, len(idx) - 1]):
                spans.append([int(idx[a]), int(idx[b])])
        spans.sort()
        # contiguous across a segment boundary means one physical episode
        joined: list[list[int]] = []
        for i, j in spans:
            if joined and i == joined[-1][1] + 1:
                joined[-1][1] = j
            else:
                joined.append([i, j])
        joined = [s for s in joined if t[s[1]] - t[s[0]] >= th.min_duration]
        merged: list[list[int]] = []
        for i, j in joined:
            if merged and t[i] - t[merged[-1][1]] < th.merge_gap:
                merged[-1][1] = j
            else:
                merged.append([i, j])
        for i, j in merged:
            window = signal[i : j + 1]
            k = i + int(np.argmax(np.abs(window)))
            events.append(ComfortEvent(kind, float(t[i]), float(t[j]), float(signal[k]), th.level(kind)))
    order = list(EventKind)
    events.sort(key=lambda e: (e.t_start, order.index(e.kind)))
    return tuple(events)


def generate_ride(sc: Scenario, thresholds: Thresholds = Thresholds()) -> tuple[SampleSeries, GroundTruth]:
    if not isinstance(sc, Scenario):
        raise InvalidScenario("expected a Scenario")
    n = int(round(sc.duration * sc.sample_rate))
    if n < 2:
        raise InvalidScenario("scenario is shorter than two samples")
    dt = 1.0 / sc.sample_rate
    t = np.arange(n) * dt
    ends = np.cumsum([s.duration for s in sc.segments])
    seg = np.minimum(np.searchsorted(ends, t + 1e-9 * dt, side="right"), len(sc.segments) - 1)

    a_long = np.array([s.longitudinal_accel for s in sc.segments])[seg]
    yaw = np.array([s.yaw_rate for s in sc.segments])[seg]
    rough_sigma = np.array([s.roughness_sigma for s in sc.segments])[seg]

    speed = np.concatenate([[0.0], np.cumsum(0.5 * (a_long[1:] + a_long[:-1]) * dt)])

    rng = np.random.Generator(np.random.PCG64(sc.seed))
    vertical = np.full(n, sc.gravity)
    if np.any(rough_sigma > 0):
        vertical = vertical + rough_sigma * rng.standard_normal(n)

    vehicle_accel = np.column_stack([a_long, speed * yaw, vertical])
    vehicle_gyro = np.column_stack([np.zeros(n), np.zeros(n), yaw])

    # row-vector form of mounting.T @ v
    accel = vehicle_accel @ sc.mounting.m
    gyro = vehicle_gyro @ sc.mounting.m + sc.gyro_bias.as_array()
    if sc.accel_noise_sigma > 0:
        accel = accel + sc.accel_noise_sigma * rng.standard_normal((n, 3))
    if sc.gyro_noise_sigma > 0:
        gyro = gyro + sc.gyro_noise_sigma * rng.standard_normal((n, 3))

    device = SampleSeries(t, accel, gyro, Frame.DEVICE)
    truth = GroundTruth(
        mounting=sc.mounting,
        true_events=_truth_events(t, seg, vehicle_accel, sc.gravity, thresholds),
        vehicle=SampleSeries(t, vehicle_accel, vehicle_gyro, Frame.VEHICLE),
        speed=speed,
        segment_index=seg,
    )
    return device, truth
