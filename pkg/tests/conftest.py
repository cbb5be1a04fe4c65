import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("pcalab", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("pcalab")


@pytest.fixture
def budget():
    from pcalab.machine import Budget
    return Budget()
