import numpy as np
import pytest

from iondec.chain import (IonChain, local_spacing, local_spacings,
                          potential_energy, residual_force, solve_equilibrium)
from iondec.continuum import ContinuumModel, min_spacing
from iondec.errors import SolverError, ValidationError

U2 = 0.25 ** (1.0 / 3.0)       # two-ion half-separation, u^3 = 1/4
U3 = 1.25 ** (1.0 / 3.0)       # three-ion outer position, u^3 = 1 + 1/4


def test_single_ion():
    chain = solve_equilibrium(1)
    assert chain.n_ions == 1
    assert float(chain.positions[0]) == pytest.approx(0.0, abs=1e-15)
    assert residual_force(chain) == 0.0


def test_two_ions_analytic():
    chain = solve_equilibrium(2)
    assert float(chain.positions[0]) == pytest.approx(-U2, rel=1e-10)
    assert float(chain.positions[1]) == pytest.approx(U2, rel=1e-10)


def test_three_ions_analytic():
    chain = solve_equilibrium(3)
    u = chain.positions.astype(float)
    assert u[0] == pytest.approx(-U3, rel=1e-10)
    assert abs(u[1]) < 1e-14
    assert u[2] == pytest.approx(U3, rel=1e-10)


@pytest.mark.parametrize("n", [2, 5, 11, 100, 101])
def test_mirror_symmetry(n, chains):
    u = chains(n).positions.astype(float)
    assert np.max(np.abs(u + u[::-1])) < 1e-10


@pytest.mark.parametrize("n", [2, 7, 50, 500])
def test_residual_below_tolerance(n, chains):
    chain = chains(n)
    assert chain.residual <= 1e-12
    assert residual_force(chain) == pytest.approx(chain.residual, abs=1e-15)


def test_positions_strictly_increasing(chains):
    u = chains(200).positions
    assert np.all(np.diff(u) > 0)


def test_local_spacing_small_chains(chains):
    assert local_spacing(chains(2), 0) == pytest.approx(2 * U2, rel=1e-10)
    assert local_spacing(chains(2), 1) == pytest.approx(2 * U2, rel=1e-10)
    assert local_spacing(chains(3), 1) == pytest.approx(U3, rel=1e-10)


def test_local_spacing_uniform_chain():
    h = 0.37
    u = h * (np.arange(9) - 4.0)
    chain = IonChain.from_positions(u)
    for i in range(1, 8):
        assert local_spacing(chain, i) == pytest.approx(h, rel=1e-14)
    assert local_spacing(chain, 0) == pytest.approx(h, rel=1e-14)
    assert np.allclose(local_spacings(chain), h)


def test_local_spacing_index_error(chains):
    with pytest.raises(IndexError):
        local_spacing(chains(3), 3)
    with pytest.raises(IndexError):
        local_spacing(chains(3), -4)


def test_residual_of_exact_two_ion_positions():
    chain = IonChain.from_positions(np.array([-U2, U2]))
    assert chain.residual <= 1e-12


def test_residual_detects_perturbation():
    u = np.array([-U3, 0.0, U3])
    u[1] += 0.1
    chain = IonChain.from_positions(u)
    assert residual_force(chain) > 0.01


def test_energy_minimum_certificate(chains):
    """Nudging any single ion by +-1e-3 must raise the potential."""
    chain = chains(5)
    u = chain.positions.astype(float)
    base = potential_energy(u)
    for i in range(5):
        for sign in (+1.0, -1.0):
            bumped = u.copy()
            bumped[i] += sign * 1e-3
            assert potential_energy(bumped) > base


@pytest.mark.parametrize("n", [4, 5, 8, 13, 100])
def test_minimum_gap_at_center(n, chains):
    gaps = np.diff(chains(n).positions.astype(float))
    center = (n - 1) // 2
    assert np.argmin(gaps) in {center, n - 2 - center}
    assert gaps.min() == pytest.approx(gaps[center], rel=1e-12)


def test_center_gap_tracks_fluid_spacing(chains):
    """Cross-check against the continuum central spacing at N = 100."""
    chain = chains(100)
    gap = float(np.diff(chain.positions.astype(float))[49])
    s0 = min_spacing(100, ContinuumModel.DUBIN_FLUID)
    assert gap == pytest.approx(s0, rel=0.10)


def test_solver_reports_best_residual():
    with pytest.raises(SolverError) as err:
        solve_equilibrium(60, max_iter=2)
    assert err.value.residual is not None
    assert err.value.residual > 0


@pytest.mark.parametrize("bad", [0, -3, 10_001])
def test_solver_input_validation(bad):
    with pytest.raises(ValidationError):
        solve_equilibrium(bad)


def test_from_positions_requires_sorted():
    with pytest.raises(ValidationError):
        IonChain.from_positions(np.array([0.5, -0.5]))
    with pytest.raises(ValidationError):
        IonChain.from_positions(np.array([0.0, 0.0]))


def test_positions_are_immutable(chains):
    chain = chains(5)
    with pytest.raises(ValueError):
        chain.positions[0] = 99.0


def test_larger_chain_contains_smaller_extent(chains):
    # outermost ion moves outward with N, central density grows
    assert chains(101).positions[-1] > chains(11).positions[-1]
    inner_11 = np.diff(chains(11).positions.astype(float)).min()
    inner_101 = np.diff(chains(101).positions.astype(float)).min()
    assert inner_101 < inner_11
