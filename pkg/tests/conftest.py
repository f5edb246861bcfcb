import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

from ridecomfort.core import GRAVITY, Frame, SampleSeries  # noqa: E402

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


def make_series(accel, gyro=None, rate=50.0, frame=Frame.DEVICE, n=None):
    """Constant or per-sample series at a uniform rate."""
    accel = np.asarray(accel, dtype=float)
    if n is None:
        n = len(accel) if accel.ndim == 2 else 100
    accel = np.broadcast_to(accel, (n, 3))
    gyro = np.zeros((n, 3)) if gyro is None else np.broadcast_to(np.asarray(gyro, dtype=float), (n, 3))
    return SampleSeries(np.arange(n) / rate, accel, gyro, frame)


@pytest.fixture
def still_window():
    return make_series([0.0, 0.0, GRAVITY], n=100)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
