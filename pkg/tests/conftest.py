import os

import pytest
from hypothesis import HealthCheck, settings

from zkspeed.ec import preset_curve

settings.register_profile("default", deadline=None, max_examples=50,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", deadline=None, max_examples=20,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def curve():
    return preset_curve("desk24")


@pytest.fixture(scope="session")
def F(curve):
    return curve.scalar_field
