"""Estimate how the phone is mounted in the car.

The estimate is built in two stages:

1. Vertical axis. Windows in which the car turns give the up direction as the
   normalised mean angular velocity (yaw dominates). Windows in which the car
   is at rest or cruising give it as the normalised mean specific force
   (gravity dominates). Per-window directions are fused on the unit sphere.
2. Heading. After levelling, the horizontal accelerations of manoeuvring
   windows are pooled and their dominant direction found by PCA. Samples taken
   while turning carry centripetal (sideways) acceleration, so they are
   rotated by -90 degrees (scaled by the turn sign) before pooling; this puts
   every contribution on the forward axis and also fixes the sign of the
   eigenvector, since centripetal force times yaw sign always points forward
   for a car moving forward.
"""

from __future__ import annotations

import enum
import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .core import GRAVITY, Frame, Rotation, SampleSeries, Vec3, compose_heading, rotation_aligning_to_z
from .errors import (
    DegenerateHorizontal,
    DegenerateInput,
    DegenerateSpectrum,
    InsufficientCoverage,
    InsufficientSamples,
    InvalidArgument,
    LengthMismatch,
    NotQuasiStatic,
    NotTurning,
    WrongFrame,
)
from .filtering import GyroBias

MIN_WINDOW_SAMPLES = 20


class MotionMode(str, enum.Enum):
    STILL = "Still"
    STRAIGHT_CONSTANT_SPEED = "StraightConstantSpeed"
    ACCELERATING = "Accelerating"
    TURNING = "Turning"
    UNKNOWN = "Unknown"


QUASI_STATIC = (MotionMode.STILL, MotionMode.STRAIGHT_CONSTANT_SPEED)


@dataclass(frozen=True)
class AlignmentParams:
    """Window layout and motion-mode thresholds.

    ``quasi_static_accel`` bounds | |mean accel| - g | for a window to count
    as free of horizontal acceleration. ``outlier_deg`` is the floor of the
    rejection radius used when fusing per-window vertical estimates.
    """

    window_s: float = 2.0
    hop_s: float = 1.0
    turn_rate: float = 0.1  # rad/s
    still_rate: float = 0.02  # rad/s
    quasi_static_accel: float = 0.1  # m/s^2
    gravity: float = GRAVITY
    gravity_gate: tuple[float, float] = (0.7, 1.3)
    outlier_deg: float = 1.0
    min_duration_s: float = 10.0
    min_rate_hz: float = 20.0

    def __post_init__(self):
        positives = {
            "window_s": self.window_s,
            "hop_s": self.hop_s,
            "turn_rate": self.turn_rate,
            "still_rate": self.still_rate,
            "quasi_static_accel": self.quasi_static_accel,
            "gravity": self.gravity,
            "outlier_deg": self.outlier_deg,
            "min_rate_hz": self.min_rate_hz,
        }
        for name, value in positives.items():
            if not (math.isfinite(value) and value > 0):
                raise InvalidArgument(f"{name} must be > 0, got {value}")
        if not self.min_duration_s >= 0:
            raise InvalidArgument("min_duration_s must be >= 0")
        lo, hi = self.gravity_gate
        if not 0 < lo < 1 < hi:
            raise InvalidArgument(f"gravity_gate must satisfy 0 < lo < 1 < hi, got {self.gravity_gate}")
        object.__setattr__(self, "gravity_gate", (float(lo), float(hi)))


@dataclass(frozen=True, eq=False)
class CovarianceMatrix:
    c: np.ndarray

    def __post_init__(self):
        c = np.array(self.c, dtype=float)
        if c.shape != (3, 3) or not np.all(np.isfinite(c)):
            raise InvalidArgument("covariance matrix must be a finite 3x3 array")
        if np.max(np.abs(c - c.T)) > 1e-12:
            raise InvalidArgument("covariance matrix is not symmetric")
        if np.min(np.linalg.eigvalsh(c)) < -1e-9 * max(1.0, float(np.trace(c))):
            raise InvalidArgument("covariance matrix is not positive semi-definite")
        c.setflags(write=False)
        object.__setattr__(self, "c", c)


@dataclass(frozen=True)
class AlignmentEstimate:
    vertical_axis: Vec3
    heading_phi: float
    rotation: Rotation
    mode_used: MotionMode
    sample_count: int
    residual: float
    window_modes: tuple[MotionMode, ...] = field(default=(), repr=False)


# --- scalar helpers -------------------------------------------------------


def total_angular_velocity(w) -> float:
    wx, wy, wz = (float(c) for c in w)
    return math.sqrt(wx * wx + wy * wy + wz * wz)


def total_acceleration(a) -> float:
    ax, ay, az = (float(c) for c in a)
    return math.sqrt(ax * ax + ay * ay + az * az)


def combined_horizontal_accel(ax: float, ay: float) -> float:
    return math.sqrt(ax * ax + ay * ay)


# --- vertical axis --------------------------------------------------------


def _check_window(window: SampleSeries) -> None:
    if window.frame != Frame.DEVICE:
        raise WrongFrame("alignment works on device-frame data")
    if len(window) < MIN_WINDOW_SAMPLES:
        raise InsufficientSamples(f"window needs >= {MIN_WINDOW_SAMPLES} samples, got {len(window)}")


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def classify_motion(
    window: SampleSeries, bias: GyroBias = GyroBias(), params: AlignmentParams = AlignmentParams()
) -> MotionMode:
    _check_window(window)
    rate = float(np.mean(np.linalg.norm(window.gyro - bias.as_array(), axis=1)))
    if rate > params.turn_rate:
        return MotionMode.TURNING
    g = params.gravity
    mean_norm = float(np.linalg.norm(window.accel.mean(axis=0)))
    deviation = abs(mean_norm - g)
    if deviation < params.quasi_static_accel:
        return MotionMode.STILL if rate < params.still_rate else MotionMode.STRAIGHT_CONSTANT_SPEED
    lo, hi = params.gravity_gate
    if lo * g <= mean_norm <= hi * g:
        return MotionMode.ACCELERATING
    return MotionMode.UNKNOWN


def vertical_axis_from_gyro(
    window: SampleSeries,
    bias: GyroBias = GyroBias(),
    reference=None,
    params: AlignmentParams = AlignmentParams(),
) -> Vec3:
    """Up direction from the normalised mean angular velocity of a turn.

    The rotation sense of the turn is unknown, so the result is flipped to
    point the same way as ``reference`` (a prior up estimate) or, without
    one, the window's mean specific force.
    """
    _check_window(window)
    w = window.gyro - bias.as_array()
    rate = float(np.mean(np.linalg.norm(w, axis=1)))
    if rate <= params.turn_rate:
        raise NotTurning(f"mean angular rate {rate:.4g} rad/s is below {params.turn_rate} rad/s")
    mean_w = w.mean(axis=0)
    n = float(np.linalg.norm(mean_w))
    if n < 1e-6:
        raise DegenerateInput("mean angular velocity vanishes")
    axis = mean_w / n
    ref = window.accel.mean(axis=0) if reference is None else np.asarray(tuple(reference), dtype=float)
    if float(axis @ ref) < 0:
        axis = -axis
    return Vec3.from_array(axis)


def vertical_axis_from_gravity(window: SampleSeries, params: AlignmentParams = AlignmentParams()) -> Vec3:
    _check_window(window)
    mean_a = window.accel.mean(axis=0)
    n = float(np.linalg.norm(mean_a))
    lo, hi = params.gravity_gate
    if not lo * params.gravity <= n <= hi * params.gravity:
        raise NotQuasiStatic(f"mean acceleration {n:.4g} m/s^2 is outside the gravity gate")
    return Vec3.from_array(mean_a / n)


def fuse_directions(vectors: np.ndarray, outlier_rad: float) -> tuple[np.ndarray, np.ndarray, float]:
    """Robust mean direction of unit vectors.

    Starts from the normalised coordinate-wise median, then alternates
    between dropping vectors farther than ``max(outlier_rad, 3 * median
    spread)`` and re-averaging. Returns ``(direction, kept_mask, spread)``
    with spread the mean angle of kept vectors to the direction.
    """
    vectors = np.asarray(vectors, dtype=float)
    center = np.median(vectors, axis=0)
    if np.linalg.norm(center) < 1e-9:
        center = vectors.sum(axis=0)
    center = _unit(center)
    keep = np.ones(len(vectors), dtype=bool)
    for _ in range(20):
        angles = np.arccos(np.clip(vectors @ center, -1.0, 1.0))
        radius = max(outlier_rad, 3.0 * float(np.median(angles)))
        new_keep = angles <= radius
        if not new_keep.any():
            new_keep = angles <= angles.min()
        new_center = _unit(vectors[new_keep].sum(axis=0))
        if np.array_equal(new_keep, keep) and np.allclose(new_center, center, atol=1e-15, rtol=0):
            break
        keep, center = new_keep, new_center
    angles = np.arccos(np.clip(vectors[keep] @ center, -1.0, 1.0))
    return center, keep, float(angles.mean())


# --- PCA ------------------------------------------------------------------


def covariance(xs, ys) -> float:
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise LengthMismatch(f"series lengths differ: {x.shape} vs {y.shape}")
    n = len(x)
    if n < 2:
        raise InsufficientSamples("covariance needs at least 2 samples")
    return float(np.dot(x - x.mean(), y - y.mean()) / (n - 1))


def covariance_matrix(xs, ys, zs) -> CovarianceMatrix:
    cols = [np.asarray(s, dtype=float) for s in (xs, ys, zs)]
    c = np.empty((3, 3))
    for i in range(3):
        for j in range(i, 3):
            c[i, j] = c[j, i] = covariance(cols[i], cols[j])
    return CovarianceMatrix(c)


def principal_eigenvector(c) -> tuple[Vec3, float]:
    """Unit eigenvector of the largest eigenvalue, and that eigenvalue.

    The returned vector has its first non-negligible component positive.
    """
    if not isinstance(c, CovarianceMatrix):
        c = CovarianceMatrix(c)
    w, v = np.linalg.eigh(c.c)
    trace = float(np.trace(c.c))
    if trace <= 0 or w[2] - w[1] < 1e-9 * trace:
        raise DegenerateSpectrum(f"leading eigenvalues are not separated: {w[::-1]}")
    m = v[:, 2]
    for comp in m:
        if abs(comp) > 1e-12:
            if comp < 0:
                m = -m
            break
    return Vec3.from_array(m), float(w[2])


def heading_angle(m) -> float:
    m1, m2 = float(tuple(m)[0]), float(tuple(m)[1])
    if math.hypot(m1, m2) <= 1e-6:
        raise DegenerateHorizontal("motion direction has no horizontal component")
    phi = math.atan2(m2, m1)
    return math.pi if phi == -math.pi else phi


# --- end to end -----------------------------------------------------------


def window_bounds(t: np.ndarray, window_s: float, hop_s: float) -> list[tuple[int, int]]:
    """Index ranges ``[i0, i1)`` of windows starting every ``hop_s`` seconds."""
    bounds = []
    if len(t) == 0:
        return bounds
    t0, t_end = float(t[0]), float(t[-1])
    k = 0
    while True:
        start = t0 + k * hop_s
        if start + window_s > t_end + 1e-9:
            break
        i0 = int(np.searchsorted(t, start - 1e-9, side="left"))
        i1 = int(np.searchsorted(t, start + window_s - 1e-9, side="left"))
        bounds.append((i0, i1))
        k += 1
    return bounds


def _check_coverage(series: SampleSeries, params: AlignmentParams) -> None:
    if series.frame != Frame.DEVICE:
        raise WrongFrame("estimate_alignment expects a device-frame series")
    if len(series) < 2 or series.duration < params.min_duration_s:
        raise InsufficientCoverage(
            f"need >= {params.min_duration_s} s of data, got {series.duration:.3f} s"
        )
    median_dt = float(np.median(np.diff(series.t)))
    if median_dt > (1.0 / params.min_rate_hz) * (1 + 1e-6):
        raise InsufficientCoverage(
            f"sample rate {1 / median_dt:.3g} Hz is below {params.min_rate_hz} Hz"
        )


def estimate_alignment(
    series: SampleSeries, bias: GyroBias = GyroBias(), params: AlignmentParams = AlignmentParams()
) -> AlignmentEstimate:
    _check_coverage(series, params)
    series = series.replace(gyro=series.gyro - bias.as_array())
    zero = GyroBias()

    bounds = [(i0, i1) for i0, i1 in window_bounds(series.t, params.window_s, params.hop_s)]
    modes: list[MotionMode] = []
    for i0, i1 in bounds:
        if i1 - i0 < MIN_WINDOW_SAMPLES:
            modes.append(MotionMode.UNKNOWN)
        else:
            modes.append(classify_motion(series.slice(i0, i1), zero, params))

    # vertical: gravity windows first, so turns can borrow their sign
    estimates: list[np.ndarray] = []
    sources: list[MotionMode] = []
    for (i0, i1), mode in zip(bounds, modes):
        if mode in QUASI_STATIC:
            try:
                v = vertical_axis_from_gravity(series.slice(i0, i1), params)
            except NotQuasiStatic:
                continue
            estimates.append(v.as_array())
            sources.append(mode)
    reference = None
    if estimates:
        reference, _, _ = fuse_directions(np.array(estimates), math.radians(params.outlier_deg))
    for (i0, i1), mode in zip(bounds, modes):
        if mode is MotionMode.TURNING:
            try:
                v = vertical_axis_from_gyro(series.slice(i0, i1), zero, reference, params)
            except DegenerateInput as exc:
                raise DegenerateInput(f"window at t={series.t[i0]:.3f} s: {exc}") from exc
            estimates.append(v.as_array())
            sources.append(mode)
    if not estimates:
        raise InsufficientCoverage("no window supports vertical alignment (need still, cruising or turning data)")

    up, kept, spread = fuse_directions(np.array(estimates), math.radians(params.outlier_deg))
    kept_modes = Counter(m for m, k in zip(sources, kept) if k)
    order = list(MotionMode)
    mode_used = max(kept_modes, key=lambda m: (kept_modes[m], -order.index(m)))
    levelling = rotation_aligning_to_z(up)

    # heading
    motion = [(b, m) for b, m in zip(bounds, modes) if m in (MotionMode.ACCELERATING, MotionMode.TURNING)]
    if not motion:
        raise InsufficientCoverage("no accelerating or turning window supports horizontal alignment")
    accel = series.accel @ levelling.m.T
    yaw = (series.gyro @ levelling.m.T)[:, 2]
    include = np.zeros(len(series), dtype=bool)
    for (i0, i1), mode in zip(bounds, modes):
        if mode is not MotionMode.UNKNOWN:
            include[i0:i1] = True
    turning = include & (np.abs(yaw) > params.turn_rate)
    horiz = accel[:, :2].copy()
    sign = np.sign(yaw[turning])
    horiz[turning] = np.column_stack([horiz[turning, 1], -horiz[turning, 0]]) * sign[:, None]

    cov = covariance_matrix(horiz[include, 0], horiz[include, 1], accel[include, 2])
    planar = cov.c.copy()
    planar[2, :] = 0.0
    planar[:, 2] = 0.0
    try:
        m, _ = principal_eigenvector(CovarianceMatrix(planar))
    except DegenerateSpectrum as exc:
        raise DegenerateSpectrum(f"horizontal PCA: {exc}") from exc
    direction = m.as_array()[:2]

    if turning.any():
        forwardness = float(np.mean(horiz[turning] @ direction))
    else:
        (i0, i1), _ = next(bm for bm in motion if bm[1] is MotionMode.ACCELERATING)
        # a ride starts from rest, so its first longitudinal manoeuvre speeds up
        forwardness = float(np.mean(horiz[i0:i1] @ direction))
    if forwardness < 0:
        direction = -direction

    phi = heading_angle(direction)
    return AlignmentEstimate(
        vertical_axis=Vec3.from_array(up),
        heading_phi=phi,
        rotation=compose_heading(levelling, phi),
        mode_used=mode_used,
        sample_count=len(series),
        residual=spread,
        window_modes=tuple(modes),
    )
