"""Passenger-comfort analysis of smartphone IMU rides."""

from .alignment import (
    AlignmentEstimate,
    AlignmentParams,
    CovarianceMatrix,
    MotionMode,
    classify_motion,
    combined_horizontal_accel,
    covariance,
    covariance_matrix,
    estimate_alignment,
    heading_angle,
    principal_eigenvector,
    total_acceleration,
    total_angular_velocity,
    vertical_axis_from_gravity,
    vertical_axis_from_gyro,
)
from .config import Config
from .core import (
    GRAVITY,
    Frame,
    ImuSample,
    Rotation,
    SampleSeries,
    Vec3,
    apply_rotation,
    compose_heading,
    rotate_series,
    rotation_aligning_to_z,
)
from .detect import ComfortEvent, EventKind, RideReport, Thresholds, detect_events, score_ride
from .filtering import (
    FilterParams,
    FilterState,
    GyroBias,
    alpha,
    calibrate_gyro_bias,
    lowpass_series,
    lowpass_step,
    remove_gravity,
)
from .io import parse_input, write_csv, write_outputs
from .pipeline import PipelineResult, run_pipeline
from .synth import GroundTruth, Scenario, Segment, generate_ride

__version__ = "0.1.0"
