import pytest
from hypothesis import HealthCheck, settings

from dotsim import Constant, Scenario, SystemParams

settings.register_profile(
    "numeric", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("numeric")


@pytest.fixture(scope="session")
def fig2_params() -> SystemParams:
    return SystemParams(k=1.0, omega_coulomb=1.9, rabi_ratio=5.05,
                        omega_drive=10.0, phase=0.0)


@pytest.fixture(scope="session")
def fig2_scenario(fig2_params) -> Scenario:
    return Scenario(params=fig2_params, envelope=Constant(), t_end=50.0, dt=1e-3)


@pytest.fixture(scope="session")
def rabi_params() -> SystemParams:
    # bare tunneling: no charging energy, no drive
    return SystemParams(k=1.0, omega_coulomb=0.0, rabi_ratio=0.0)

