import pytest

from iondec.chain import solve_equilibrium
from iondec.physmodel import IonSpecies, Multipole, TrapConfig


@pytest.fixture(scope="session")
def chains():
    """Memoized equilibrium solves: the N=1000 chain is needed by several
    files and costs a visible fraction of a second."""
    cache = {}

    def get(n):
        if n not in cache:
            cache[n] = solve_equilibrium(n)
        return cache[n]

    return get


@pytest.fixture(scope="session")
def ba():
    return IonSpecies.from_lab_units("Ba+", mass_amu=137.33, charge_e=1.0,
                                     f0_hz=1.7e14, tau_s_s=50.0,
                                     multipole=Multipole.E2)


@pytest.fixture(scope="session")
def ba_e1():
    return IonSpecies.from_lab_units("Ba+", mass_amu=137.33, charge_e=1.0,
                                     f0_hz=1.7e14, tau_s_s=50.0,
                                     multipole=Multipole.E1)


@pytest.fixture(scope="session")
def trap1000():
    return TrapConfig.from_lab_units(fz_hz=1e5, ft_hz=2e7, n_ions=1000)
