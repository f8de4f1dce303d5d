import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from vlczf.capacity import SnrRatio
from vlczf.channel_model import LambertianParams, RoomLayout, build_channel
from vlczf.geometry import canonicalize

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile(
    "thorough", deadline=None, max_examples=1000,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

gain = st.floats(min_value=0.01, max_value=5.0, allow_nan=False, allow_infinity=False)


@st.composite
def canonical_channels(draw):
    """Random canonical H with |det| kept away from zero.

    h22 is set from the slope ratio r = h11 h22 / (h12 h21); r > 1 yields a
    raw matrix that canonicalization must swap.
    """
    h11, h12, h21 = draw(gain), draw(gain), draw(gain)
    r = draw(st.floats(0.02, 0.98) | st.floats(1.02, 50.0))
    m = np.array([[h11, h12], [h21, r * h12 * h21 / h11]])
    return canonicalize(m)


xis = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)
fractions = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)


@pytest.fixture(scope="session")
def snr70():
    return SnrRatio.from_db(70)


@pytest.fixture(scope="session")
def default_layout():
    return RoomLayout.linear(-2.0, 2.0)


@pytest.fixture(scope="session")
def default_H(default_layout):
    return build_channel(default_layout, LambertianParams())


#: (criterion, passed, detail) lines collected by test_acceptance.py.
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n, ok, detail in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {detail}")
