import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import norm_by_summation
from ridecomfort.core import (
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
from ridecomfort.errors import DegenerateInput, InvalidArgument, InvalidRotation, NonMonotoneTimestamps, WrongFrame
from ridecomfort.synth import random_rotation

finite = st.floats(min_value=-50, max_value=50, allow_nan=False)
vec3 = st.tuples(finite, finite, finite)


@st.composite
def rotations(draw):
    seed = draw(st.integers(min_value=0, max_value=2**32 - 1))
    return random_rotation(np.random.default_rng(seed))


@st.composite
def unit_vectors(draw):
    v = np.array(draw(st.tuples(*[st.floats(-1, 1, allow_nan=False)] * 3)))
    n = np.linalg.norm(v)
    if n < 1e-3:
        v, n = np.array([0.3, -0.4, 0.5]), math.sqrt(0.5)
    return v / n


def sample(accel, gyro=(0.0, 0.0, 0.0), t=0.0):
    return ImuSample(t, Vec3(*accel), Vec3(*gyro), Frame.DEVICE)


def test_vec3_rejects_nan():
    with pytest.raises(InvalidArgument):
        Vec3(0.0, math.nan, 1.0)


def test_series_rejects_repeated_timestamp():
    with pytest.raises(NonMonotoneTimestamps):
        SampleSeries([0.0, 0.1, 0.1], np.zeros((3, 3)), np.zeros((3, 3)))


def test_series_round_trips_through_samples():
    s = SampleSeries([0.0, 0.5], [[1, 2, 3], [4, 5, 6]], [[0, 0, 1], [0, 1, 0]])
    again = SampleSeries.from_samples(s.samples)
    assert np.array_equal(again.accel, s.accel) and np.array_equal(again.gyro, s.gyro)
    assert s.samples[1].accel == Vec3(4.0, 5.0, 6.0)


def test_rotation_rejects_reflection_and_shear():
    with pytest.raises(InvalidRotation):
        Rotation(np.diag([1.0, 1.0, -1.0]))
    with pytest.raises(InvalidRotation):
        Rotation(np.array([[1.0, 1e-6, 0], [0, 1, 0], [0, 0, 1]]))


def test_apply_identity():
    out = apply_rotation(Rotation.identity(), sample((1, 2, 3)))
    assert tuple(out.accel) == (1.0, 2.0, 3.0)
    assert out.frame is Frame.VEHICLE


def test_apply_quarter_turn_about_z():
    out = apply_rotation(Rotation.about_z(math.pi / 2), sample((1, 0, 0)))
    assert np.allclose(tuple(out.accel), (0, 1, 0), atol=1e-12, rtol=0)


def test_apply_random_rotation_keeps_norm():
    r = random_rotation(np.random.default_rng(3))
    out = apply_rotation(r, sample((1, 2, 3)))
    assert abs(norm_by_summation(out.accel) - math.sqrt(14)) < 1e-9


def test_apply_rejects_invalid_matrix():
    with pytest.raises(InvalidRotation):
        apply_rotation(np.eye(3) * 1.01, sample((1, 2, 3)))


def test_apply_rejects_vehicle_frame_sample():
    s = ImuSample(0.0, Vec3(0, 0, 1), Vec3(0, 0, 0), Frame.VEHICLE)
    with pytest.raises(WrongFrame):
        apply_rotation(Rotation.identity(), s)


@given(rotations(), vec3, vec3)
def test_apply_preserves_norms(r, a, g):
    out = apply_rotation(r, sample(a, g))
    assert abs(out.accel.norm() - norm_by_summation(a)) <= 1e-9
    assert abs(out.gyro.norm() - norm_by_summation(g)) <= 1e-9


@given(rotations(), vec3, vec3)
def test_apply_then_transpose_restores_sample(r, a, g):
    there = apply_rotation(r, sample(a, g))
    back = apply_rotation(r.T, ImuSample(there.t, there.accel, there.gyro, Frame.DEVICE))
    assert np.allclose(tuple(back.accel), a, atol=1e-9, rtol=0)
    assert np.allclose(tuple(back.gyro), g, atol=1e-9, rtol=0)


@given(rotations(), rotations())
def test_composition_is_a_rotation(r1, r2):
    m = (r1 @ r2).m
    assert np.max(np.abs(m @ m.T - np.eye(3))) <= 1e-9


def test_rotate_series_matches_per_sample():
    r = random_rotation(np.random.default_rng(9))
    rng = np.random.default_rng(1)
    s = SampleSeries(np.arange(5.0), rng.normal(size=(5, 3)), rng.normal(size=(5, 3)))
    out = rotate_series(r, s)
    for i in range(5):
        one = apply_rotation(r, s[i])
        assert np.allclose(out.accel[i], tuple(one.accel), atol=1e-15)
        assert np.allclose(out.gyro[i], tuple(one.gyro), atol=1e-15)


def test_align_z_is_identity_for_z():
    assert np.array_equal(rotation_aligning_to_z((0, 0, 1)).m, np.eye(3))


def test_align_x_axis():
    r = rotation_aligning_to_z((1, 0, 0))
    assert np.allclose(r @ [1, 0, 0], [0, 0, 1], atol=1e-12, rtol=0)
    # minimal rotation about y keeps y fixed
    assert np.allclose(r @ [0, 1, 0], [0, 1, 0], atol=1e-12, rtol=0)


def test_align_diagonal():
    v = np.ones(3) / math.sqrt(3)
    r = rotation_aligning_to_z(v)
    assert np.allclose(r @ v, [0, 0, 1], atol=1e-9, rtol=0)
    assert abs(np.linalg.det(r.m) - 1) <= 1e-9


def test_align_antipode_is_half_turn_about_x():
    r = rotation_aligning_to_z((0, 0, -1))
    assert np.array_equal(r.m, np.diag([1.0, -1.0, -1.0]))


def test_align_rejects_non_unit():
    with pytest.raises(DegenerateInput):
        rotation_aligning_to_z((0, 0, 1.001))


def test_align_minimal_angle():
    v = np.array([0.6, 0.0, 0.8])
    r = rotation_aligning_to_z(v)
    assert r.angle_to(Rotation.identity()) == pytest.approx(math.acos(0.8), abs=1e-12)


@given(unit_vectors())
def test_align_maps_random_vectors_to_z(v):
    r = rotation_aligning_to_z(v)
    assert np.allclose(r @ v, [0, 0, 1], atol=1e-9, rtol=0)


def test_align_thousand_random_vectors():
    rng = np.random.default_rng(42)
    for v in rng.normal(size=(1000, 3)):
        v = v / np.linalg.norm(v)
        assert np.allclose(rotation_aligning_to_z(v) @ v, [0, 0, 1], atol=1e-9, rtol=0)


def test_compose_heading_trivial():
    assert np.allclose(compose_heading(Rotation.identity(), 0.0).m, np.eye(3), atol=0)


def test_compose_heading_quarter_turn():
    r = compose_heading(Rotation.identity(), math.pi / 2)
    assert np.allclose(r @ [0, 1, 0], [1, 0, 0], atol=1e-12, rtol=0)


@given(rotations(), st.floats(-10, 10, allow_nan=False))
def test_compose_heading_is_rotation(vertical, phi):
    m = compose_heading(vertical, phi).m
    assert np.max(np.abs(m @ m.T - np.eye(3))) <= 1e-9
    assert abs(np.linalg.det(m) - 1) <= 1e-9


def test_compose_heading_rejects_nan():
    with pytest.raises(InvalidArgument):
        compose_heading(Rotation.identity(), math.nan)
