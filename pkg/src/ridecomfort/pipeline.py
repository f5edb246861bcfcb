"""calibrate -> filter -> align -> rotate -> remove gravity -> detect -> score."""

from __future__ import annotations

import logging
from dataclasses import dataclass

from .alignment import MIN_WINDOW_SAMPLES, AlignmentEstimate, MotionMode, classify_motion, estimate_alignment, window_bounds
from .config import Config
from .core import SampleSeries, Vec3, rotate_series
from .detect import RideReport, detect_events, score_ride
from .errors import RideComfortError, StageError
from .filtering import (
    MIN_CALIBRATION_SAMPLES,
    GyroBias,
    calibrate_gyro_bias,
    lowpass_series,
    remove_gravity,
    subtract_gyro_bias,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PipelineResult:
    report: RideReport
    aligned: SampleSeries  # vehicle frame, gravity removed
    estimate: AlignmentEstimate
    bias: GyroBias
    calibrated: bool


def still_prefix(series: SampleSeries, cfg: Config) -> int:
    """Number of leading samples covered by consecutive Still windows.

    The gyro bias is unknown at this point and can on its own exceed the
    still-rate bound, so each window is judged with its own mean angular
    rate removed (i.e. on gyro steadiness), after ruling out turning-level
    rates. Windows are ``window_s`` long, so a non-zero result always spans
    at least one full window.
    """
    p = cfg.alignment
    end = 0
    for i0, i1 in window_bounds(series.t, p.window_s, p.hop_s):
        if i0 > end or i1 - i0 < MIN_WINDOW_SAMPLES:
            break
        window = series.slice(i0, i1)
        if classify_motion(window, GyroBias(), p) is MotionMode.TURNING:
            break
        own_bias = GyroBias(Vec3.from_array(window.gyro.mean(axis=0)))
        if classify_motion(window, own_bias, p) is not MotionMode.STILL:
            break
        end = i1
    return end


def _stage(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except RideComfortError as exc:
        raise StageError(name, exc) from exc


def run_pipeline(series: SampleSeries, cfg: Config = Config()) -> PipelineResult:
    n_still = _stage("calibration", still_prefix, series, cfg)
    if n_still >= MIN_CALIBRATION_SAMPLES:
        bias = _stage("calibration", calibrate_gyro_bias, series.slice(0, n_still))
        calibrated = True
    else:
        log.warning("ride does not start with a still window; gyro bias assumed zero")
        bias, calibrated = GyroBias(), False

    corrected = subtract_gyro_bias(series, bias)
    smoothed = _stage("filter", lowpass_series, corrected, cfg.filter_params)
    estimate = _stage("alignment", estimate_alignment, smoothed, GyroBias(), cfg.alignment)
    vehicle = _stage("transform", rotate_series, estimate.rotation, smoothed)
    aligned = _stage("transform", remove_gravity, vehicle, cfg.gravity)
    events = _stage("detection", detect_events, aligned, cfg.thresholds)
    report = _stage("scoring", score_ride, events, aligned.duration, cfg.weights)
    return PipelineResult(report, aligned, estimate, bias, calibrated)
