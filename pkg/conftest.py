import pytest

from atom import HE4, from_physical
from models import AtomParams


@pytest.fixture
def he_params() -> AtomParams:
    """4He+ at F = 3.6 kV/m, F_L = 2.9 MV/m, laser on resonance with 2p1/2."""
    return from_physical(HE4, 3.6e3, 2.9e6, 0.0)


@pytest.fixture
def desk_params() -> AtomParams:
    """gamma = 1 units; p ~ 1e-4 so dark periods are cheap to sample."""
    return AtomParams(gamma=1.0, delta2=0.0, delta3=-10.0, delta4=-100.0, omega=0.5, omega_l=5.0)
