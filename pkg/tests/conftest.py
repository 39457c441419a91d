import pytest

from cachematch.config import SystemConfig


@pytest.fixture
def base_config():
    """Small shallow system: floor warning only, every scheme applicable."""
    return SystemConfig(K=100, d=10, N=100, M=10.0, rho=0.25, beta=0.0, t0=1.0)


def make_config(**overrides):
    fields = dict(K=100, d=10, N=100, M=10.0, rho=0.25, beta=0.0, t0=1.0)
    fields.update(overrides)
    return SystemConfig(**fields)
