import warnings

import numpy as np
import pytest

from kgwigner.grid import make_grid
from kgwigner.kinematics import energy
from kgwigner.states import (
    BoundaryDecayError,
    FVState,
    RepresentationError,
    evolve_free,
    from_fv,
    make_gaussian,
    make_state,
    superpose,
    to_fv,
)


@pytest.fixture
def grid():
    return make_grid(256, 12.0)


def test_gaussian_norm_and_charge(grid):
    s = make_gaussian(grid, 1.0, charge=1)
    assert s.charge == 1
    assert s.norm() == pytest.approx(1.0, abs=1e-12)
    assert s.charge_norm() == pytest.approx(1.0, abs=1e-12)
    m = make_gaussian(grid, 1.0, charge=-1)
    assert m.charge == -1
    assert m.charge_norm() == pytest.approx(-1.0, abs=1e-12)
    assert not np.any(m.psi_plus)


def test_gaussian_coordinate_space(grid):
    s = make_gaussian(grid, 0.5, q_center=1.5)
    psi_q = s.coordinate_wavefunction()[0]
    dens = np.abs(psi_q) ** 2
    assert dens.sum() * grid.dq == pytest.approx(1.0, abs=1e-12)
    assert (grid.q * dens).sum() * grid.dq == pytest.approx(1.5, abs=1e-10)


@pytest.mark.parametrize("s2", [0.0, -1.0, np.nan])
def test_gaussian_bad_variance(grid, s2):
    with pytest.raises(ValueError):
        make_gaussian(grid, s2)


def test_gaussian_unrepresentable(grid):
    with pytest.raises(BoundaryDecayError, match="too large"):
        make_gaussian(grid, 25.0)
    with pytest.raises(BoundaryDecayError, match="too small"):
        make_gaussian(grid, 1e-4)


def test_bad_charge(grid):
    with pytest.raises(ValueError):
        make_gaussian(grid, 1.0, charge=0)


def test_state_is_immutable(grid):
    s = make_gaussian(grid, 1.0)
    with pytest.raises(ValueError):
        s.psi_plus[0] = 1.0


def test_shape_validation(grid):
    with pytest.raises(ValueError):
        FVState(grid, np.zeros(10), np.zeros(10))


def test_make_state_warns_on_edge(grid):
    flat = np.ones(grid.n)
    with warnings.catch_warnings(record=True) as rec:
        warnings.simplefilter("always")
        make_state(grid, flat, 0 * flat)
    assert any("boundary" in str(w.message) for w in rec)


def test_transform_round_trip(grid):
    s = superpose([make_gaussian(grid, 1.0, 1), make_gaussian(grid, 0.5, -1, 1.0)], [1, 0.4j])
    back = to_fv(from_fv(s))
    np.testing.assert_allclose(back.components, s.components, atol=1e-14)
    with pytest.raises(RepresentationError):
        to_fv(s)
    with pytest.raises(RepresentationError):
        from_fv(from_fv(s))


def test_usual_representation_charge_conserved(grid):
    # the indefinite form is invariant under U
    s = superpose([make_gaussian(grid, 1.0, 1), make_gaussian(grid, 0.5, -1, 1.0)], [1, 0.4j])
    u = from_fv(s)
    tau3_norm = (np.abs(u.psi_plus) ** 2 - np.abs(u.psi_minus) ** 2).sum() * grid.dp
    assert tau3_norm == pytest.approx(s.charge_norm(), abs=1e-12)


def test_superpose_normalizes(grid):
    s = superpose([make_gaussian(grid, 1.0, 1), make_gaussian(grid, 1.0, -1)], [3.0, 1.0])
    assert s.norm() == pytest.approx(1.0, abs=1e-12)
    assert s.charge == 0
    assert s.component_norms()[0] == pytest.approx(0.9, abs=1e-12)


def test_evolve_free_phases(grid):
    s = superpose([make_gaussian(grid, 1.0, 1), make_gaussian(grid, 1.0, -1)], [1, 1])
    t = 0.8
    e = evolve_free(s, t)
    np.testing.assert_allclose(e.psi_plus, s.psi_plus * np.exp(-1j * energy(grid.p) * t))
    np.testing.assert_allclose(e.psi_minus, s.psi_minus * np.exp(1j * energy(grid.p) * t))
    assert e.norm() == pytest.approx(s.norm(), abs=1e-13)
    with pytest.raises(RepresentationError):
        evolve_free(from_fv(s), 1.0)
