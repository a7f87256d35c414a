import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "ci",
    derandomize=True,
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("ci")


@pytest.fixture(scope="session")
def ctx128():
    """Shared full-size context (N=64, L=12, n=128): warm it once."""
    from orlicz_qha.weyl import QhaContext

    return QhaContext(N=64, L=12.0, n=128)


@pytest.fixture()
def rng():
    return np.random.default_rng(20260810)
