"""First-order exponential smoothing and gyroscope bias handling."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .core import GRAVITY, Frame, SampleSeries, Vec3
from .errors import EmptySeries, InsufficientSamples, InvalidArgument, WrongFrame

MIN_CALIBRATION_SAMPLES = 50

Orientation = Literal["paper", "conventional"]


@dataclass(frozen=True)
class FilterParams:
    """Smoothing settings.

    ``orientation="paper"`` uses alpha = t / (t + dT) in the update
    ``out += alpha * (input - out)``; ``"conventional"`` swaps in the
    RC-discretisation weight dT / (t + dT), which smooths harder at high
    sample rates.
    """

    time_constant: float = 0.5
    orientation: Orientation = "paper"

    def __post_init__(self):
        if not (math.isfinite(self.time_constant) and self.time_constant > 0):
            raise InvalidArgument(f"time_constant must be > 0, got {self.time_constant}")
        if self.orientation not in ("paper", "conventional"):
            raise InvalidArgument(f"unknown filter orientation {self.orientation!r}")


@dataclass(frozen=True)
class FilterState:
    prev_out: np.ndarray | None = None

    @property
    def initialized(self) -> bool:
        return self.prev_out is not None


@dataclass(frozen=True)
class GyroBias:
    bias: Vec3 = Vec3(0.0, 0.0, 0.0)

    def as_array(self) -> np.ndarray:
        return self.bias.as_array()


def _check_positive(name: str, value: float) -> None:
    if not (math.isfinite(value) and value > 0):
        raise InvalidArgument(f"{name} must be finite and > 0, got {value}")


def alpha(time_constant: float, dT: float) -> float:
    _check_positive("time_constant", time_constant)
    _check_positive("dT", dT)
    return time_constant / (time_constant + dT)


def alpha_conventional(time_constant: float, dT: float) -> float:
    _check_positive("time_constant", time_constant)
    _check_positive("dT", dT)
    return dT / (time_constant + dT)


def lowpass_step(state: FilterState, value, a: float):
    """One smoothing update. Returns ``(out, new_state)``.

    An uninitialised state is seeded with ``value`` so the first output
    equals the first input.
    """
    if not (0.0 < a < 1.0):
        raise InvalidArgument(f"smoothing weight must lie in (0, 1), got {a}")
    x = np.asarray(tuple(value) if isinstance(value, Vec3) else value, dtype=float)
    if not state.initialized:
        return x.copy(), FilterState(x.copy())
    out = state.prev_out + a * (x - state.prev_out)
    return out, FilterState(out)


def lowpass_series(series: SampleSeries, params: FilterParams = FilterParams()) -> SampleSeries:
    if len(series) == 0:
        raise EmptySeries("cannot filter an empty series")
    weight = alpha if params.orientation == "paper" else alpha_conventional
    t = series.t
    data = np.hstack([series.accel, series.gyro])
    out = np.empty_like(data)
    out[0] = data[0]
    prev = data[0]
    for i in range(1, len(t)):
        a = weight(params.time_constant, float(t[i] - t[i - 1]))
        prev = prev + a * (data[i] - prev)
        out[i] = prev
    return series.replace(accel=out[:, :3], gyro=out[:, 3:])


def calibrate_gyro_bias(still: SampleSeries) -> GyroBias:
    """Per-axis mean gyro reading over a window where the phone is at rest."""
    if len(still) < MIN_CALIBRATION_SAMPLES:
        raise InsufficientSamples(
            f"bias calibration needs >= {MIN_CALIBRATION_SAMPLES} samples, got {len(still)}"
        )
    return GyroBias(Vec3.from_array(still.gyro.mean(axis=0)))


def subtract_gyro_bias(series: SampleSeries, bias: GyroBias) -> SampleSeries:
    return series.replace(gyro=series.gyro - bias.as_array())


def remove_gravity(series: SampleSeries, g: float = GRAVITY) -> SampleSeries:
    if series.frame != Frame.VEHICLE:
        raise WrongFrame("gravity can only be removed from a vehicle-frame series")
    accel = series.accel.copy()
    accel[:, 2] -= g
    return series.replace(accel=accel)
