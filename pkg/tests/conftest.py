import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from spinchain.inversion import InversionPlan
from spinchain.model import ChainSpec, InitialState, ReservoirSpec, validate

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile(
    "default", deadline=None, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much])
settings.load_profile("default")


@pytest.fixture
def fast_plan():
    """Inversion plan trimmed for test speed; same accuracy floor as default."""
    return InversionPlan(n_terms=320, euler_depth=28)


@pytest.fixture
def fig2a_config():
    """Weak-coupling Lorentzian benchmark: N=5, g=0.3, gamma=0.02, resonant."""
    res = ReservoirSpec.lorentzian(g=0.3, gamma=0.02, delta_c=0.0)
    return validate(ChainSpec(n_sites=5), res, res, InitialState.first_site(5))


@pytest.fixture
def fig2b_config():
    """Strong-coupling (trapping) variant: g=1.5."""
    res = ReservoirSpec.lorentzian(g=1.5, gamma=0.02, delta_c=0.0)
    return validate(ChainSpec(n_sites=5), res, res, InitialState.first_site(5))


@pytest.fixture
def closed_chain_config():
    """Five sites with both reservoirs uncoupled."""
    res = ReservoirSpec.lorentzian(g=0.0, gamma=1.0, delta_c=0.0)
    return validate(ChainSpec(n_sites=5), res, res, InitialState.first_site(5))


@pytest.fixture
def ohmic_config():
    """Resonant Ohmic benchmark: N=4, S=1, omega_c=1, omega_eg=1, g=0.3."""
    res = ReservoirSpec.ohmic(g=0.3, omega_c=1.0, s_param=1.0)
    return validate(ChainSpec(n_sites=4, omega_eg=1.0), res, res, InitialState.first_site(4))
