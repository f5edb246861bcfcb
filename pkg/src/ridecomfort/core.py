"""Value types for IMU data and device-to-vehicle rotations.

Frames and conventions:
    - Device frame: axes fixed to the phone body.
    - Vehicle frame: x forward, y to the left, z up.
    - A :class:`Rotation` ``r`` maps device vectors to vehicle vectors,
      ``v_vehicle = r.m @ v_device``.

:class:`SampleSeries` stores its data column-wise in read-only numpy arrays;
individual :class:`ImuSample` objects are materialised on demand.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import (
    DegenerateInput,
    EmptySeries,
    InvalidArgument,
    InvalidRotation,
    NonMonotoneTimestamps,
    WrongFrame,
)

GRAVITY = 9.80665  # m/s^2, standard gravity

ROTATION_TOL = 1e-9
UNIT_TOL = 1e-6


class Frame(str, enum.Enum):
    DEVICE = "Device"
    VEHICLE = "Vehicle"


@dataclass(frozen=True, slots=True)
class Vec3:
    x: float
    y: float
    z: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.z)):
            raise InvalidArgument(f"non-finite vector component in {(self.x, self.y, self.z)}")

    @classmethod
    def from_array(cls, a: Sequence[float]) -> "Vec3":
        return cls(float(a[0]), float(a[1]), float(a[2]))

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)

    def __iter__(self) -> Iterator[float]:
        return iter((self.x, self.y, self.z))


@dataclass(frozen=True, slots=True)
class ImuSample:
    t: float
    accel: Vec3
    gyro: Vec3
    frame: Frame = Frame.DEVICE

    def __post_init__(self):
        if not math.isfinite(self.t):
            raise InvalidArgument(f"non-finite timestamp {self.t}")


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)  # copy
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SampleSeries:
    """Ordered IMU samples sharing one frame.

    ``t`` has shape (n,), ``accel`` and ``gyro`` shape (n, 3).
    Timestamps must be strictly increasing and all values finite.
    """

    t: np.ndarray
    accel: np.ndarray
    gyro: np.ndarray
    frame: Frame = Frame.DEVICE

    def __post_init__(self):
        t = _readonly(self.t).reshape(-1)
        accel = _readonly(self.accel).reshape(-1, 3)
        gyro = _readonly(self.gyro).reshape(-1, 3)
        if not (len(t) == len(accel) == len(gyro)):
            raise InvalidArgument("t, accel and gyro lengths differ")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(accel)) and np.all(np.isfinite(gyro))):
            raise InvalidArgument("series contains non-finite values")
        if len(t) > 1 and np.any(np.diff(t) <= 0):
            bad = int(np.argmax(np.diff(t) <= 0)) + 1
            raise NonMonotoneTimestamps(f"timestamp at index {bad} does not increase")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "accel", accel)
        object.__setattr__(self, "gyro", gyro)
        object.__setattr__(self, "frame", Frame(self.frame))

    @classmethod
    def from_samples(cls, samples: Iterable[ImuSample], frame: Frame | None = None) -> "SampleSeries":
        samples = list(samples)
        if frame is None:
            frame = samples[0].frame if samples else Frame.DEVICE
        if any(s.frame != frame for s in samples):
            raise WrongFrame("samples do not share the series frame")
        return cls(
            t=np.array([s.t for s in samples], dtype=float),
            accel=np.array([tuple(s.accel) for s in samples], dtype=float).reshape(-1, 3),
            gyro=np.array([tuple(s.gyro) for s in samples], dtype=float).reshape(-1, 3),
            frame=frame,
        )

    def __len__(self) -> int:
        return len(self.t)

    @cached_property
    def samples(self) -> tuple[ImuSample, ...]:
        return tuple(self[i] for i in range(len(self)))

    def __getitem__(self, i: int) -> ImuSample:
        return ImuSample(
            float(self.t[i]), Vec3.from_array(self.accel[i]), Vec3.from_array(self.gyro[i]), self.frame
        )

    def slice(self, start: int, stop: int) -> "SampleSeries":
        return SampleSeries(self.t[start:stop], self.accel[start:stop], self.gyro[start:stop], self.frame)

    def replace(self, **changes) -> "SampleSeries":
        fields = {"t": self.t, "accel": self.accel, "gyro": self.gyro, "frame": self.frame}
        fields.update(changes)
        return SampleSeries(**fields)

    @property
    def duration(self) -> float:
        return float(self.t[-1] - self.t[0]) if len(self) else 0.0

    def require_nonempty(self) -> None:
        if len(self) == 0:
            raise EmptySeries("series is empty")


def _check_rotation_matrix(m: np.ndarray) -> None:
    if m.shape != (3, 3) or not np.all(np.isfinite(m)):
        raise InvalidRotation("rotation must be a finite 3x3 matrix")
    err = np.max(np.abs(m @ m.T - np.eye(3)))
    if err > ROTATION_TOL:
        raise InvalidRotation(f"matrix is not orthonormal (max deviation {err:.3g})")
    det = np.linalg.det(m)
    if abs(det - 1.0) > ROTATION_TOL:
        raise InvalidRotation(f"determinant {det:.12g} is not +1")


@dataclass(frozen=True, eq=False)
class Rotation:
    """Proper 3x3 rotation matrix (orthonormal, det +1 within 1e-9)."""

    m: np.ndarray = field(default_factory=lambda: np.eye(3))

    def __post_init__(self):
        m = _readonly(self.m)
        _check_rotation_matrix(m)
        object.__setattr__(self, "m", m)

    @classmethod
    def identity(cls) -> "Rotation":
        return cls(np.eye(3))

    @classmethod
    def about_axis(cls, axis: Sequence[float], angle: float) -> "Rotation":
        """Right-handed rotation by ``angle`` radians about ``axis`` (Rodrigues)."""
        k = np.asarray(axis, dtype=float)
        n = np.linalg.norm(k)
        if n == 0:
            raise DegenerateInput("rotation axis has zero length")
        k = k / n
        K = _skew(k)
        return cls(np.eye(3) + math.sin(angle) * K + (1.0 - math.cos(angle)) * (K @ K))

    @classmethod
    def about_z(cls, angle: float) -> "Rotation":
        c, s = math.cos(angle), math.sin(angle)
        return cls(np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]))

    @property
    def T(self) -> "Rotation":
        return Rotation(self.m.T)

    def __matmul__(self, other):
        if isinstance(other, Rotation):
            return Rotation(self.m @ other.m)
        return self.m @ np.asarray(other, dtype=float)

    def angle_to(self, other: "Rotation") -> float:
        """Angle in radians of the relative rotation ``self @ other.T``."""
        rel = self.m @ other.m.T
        c = (np.trace(rel) - 1.0) / 2.0
        return math.acos(min(1.0, max(-1.0, c)))


def _skew(k: np.ndarray) -> np.ndarray:
    return np.array([[0.0, -k[2], k[1]], [k[2], 0.0, -k[0]], [-k[1], k[0], 0.0]])


def apply_rotation(r: Rotation, s: ImuSample) -> ImuSample:
    if not isinstance(r, Rotation):
        r = Rotation(r)
    if s.frame != Frame.DEVICE:
        raise WrongFrame("apply_rotation expects a device-frame sample")
    return ImuSample(
        s.t,
        Vec3.from_array(r.m @ s.accel.as_array()),
        Vec3.from_array(r.m @ s.gyro.as_array()),
        Frame.VEHICLE,
    )


def rotate_series(r: Rotation, series: SampleSeries) -> SampleSeries:
    """Vectorised :func:`apply_rotation` over a whole device-frame series."""
    if series.frame != Frame.DEVICE:
        raise WrongFrame("rotate_series expects a device-frame series")
    return SampleSeries(series.t, series.accel @ r.m.T, series.gyro @ r.m.T, Frame.VEHICLE)


def rotation_aligning_to_z(v: Sequence[float]) -> Rotation:
    """Minimal rotation taking the unit vector ``v`` onto +z.

    The antipode (0, 0, -1) has no unique minimal axis; it maps to a
    half turn about x.
    """
    v = np.asarray(tuple(v), dtype=float)
    n = float(np.linalg.norm(v))
    if not math.isfinite(n) or abs(n - 1.0) > UNIT_TOL:
        raise DegenerateInput(f"expected a unit vector, got norm {n:.9g}")
    v = v / n
    z = np.array([0.0, 0.0, 1.0])
    axis = np.cross(v, z)
    s = float(np.linalg.norm(axis))
    c = float(v[2])
    if s < 1e-12:
        if c > 0:
            return Rotation.identity()
        return Rotation(np.diag([1.0, -1.0, -1.0]))
    return Rotation.about_axis(axis / s, math.atan2(s, c))


def compose_heading(vertical: Rotation, phi: float) -> Rotation:
    """Follow ``vertical`` with a turn of ``-phi`` about z.

    A horizontal direction at heading ``phi`` in the vertically aligned
    frame ends up on +x.
    """
    if not math.isfinite(phi):
        raise InvalidArgument(f"heading must be finite, got {phi}")
    return Rotation.about_z(-phi) @ vertical
