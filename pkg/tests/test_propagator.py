import numpy as np
import pytest

from qbphase import models
from qbphase.analytic import analytic_state_2ls
from qbphase.errors import NonzeroRates, PhysicalityViolation
from qbphase.experiments import ScenarioConfig, build_params, build_scenario
from qbphase.experiments.registry import BIPARTITE, THREE_LEVEL, TWO_LEVEL
from qbphase.models import DissipatorSpec
from qbphase.oracles import propagate_expm
from qbphase.propagator import (Trajectory, check_physicality, covariant_energies, lindblad_rhs,
                                propagate, propagate_pure)

KET0 = np.diag([1.0, 0.0]).astype(complex)
KET1 = np.diag([0.0, 1.0]).astype(complex)
LOWER = np.array([[0, 1], [0, 0]], dtype=complex)


def _scenario(base, **kw):
    return build_scenario(ScenarioConfig(name="t", **dict(base, **kw)))


def _undriven():
    p = models.TwoLevelParams(10.0, models.DrivePulse(0.0, 0.5, 0.125, 10.0))
    return models.scenario("two_level", p)


# ---- lindblad_rhs ---------------------------------------------------------

def test_rhs_commuting_is_zero():
    h = np.diag([0.0, 2.0]).astype(complex)
    rho = np.diag([0.3, 0.7]).astype(complex)
    np.testing.assert_array_equal(lindblad_rhs(0.0, rho, h, []), np.zeros((2, 2)))


def test_rhs_decay_generator():
    out = lindblad_rhs(0.0, KET1, np.zeros((2, 2)), [DissipatorSpec(LOWER, 0.3)])
    np.testing.assert_allclose(out, 0.3 * (KET0 - KET1), atol=1e-15)


def test_rhs_dephasing_halves_coherence_rate():
    rho = np.array([[0.4, 0.2 - 0.1j], [0.2 + 0.1j, 0.6]])
    out = lindblad_rhs(0.0, rho, np.zeros((2, 2)), [DissipatorSpec(KET1, 0.8)])
    assert out[0, 1] == pytest.approx(-0.4 * rho[0, 1])
    assert out[0, 0] == 0 and out[1, 1] == 0


def test_rhs_traceless_and_hermitian(rng):
    for _ in range(10):
        m = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        rho = m @ m.conj().T
        rho /= np.trace(rho)
        h = m + m.conj().T
        ops = [DissipatorSpec(rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)), 0.5)]
        out = lindblad_rhs(0.0, rho, h, ops)
        assert abs(np.trace(out)) <= 1e-12
        assert np.abs(out - out.conj().T).max() <= 1e-12


# ---- propagate ------------------------------------------------------------

def test_constant_trajectory_without_drive():
    sc = _undriven()
    traj = propagate(sc, grid_points=200)
    np.testing.assert_allclose(traj.states, np.broadcast_to(KET0, traj.states.shape), atol=1e-14)


def test_full_charge_2ls():
    traj = propagate(_scenario(TWO_LEVEL), grid_points=1000)
    assert traj.states[-1, 1, 1].real >= 0.999
    assert traj.times[0] == 0 and np.all(np.diff(traj.times) > 0)
    assert len(traj) == 1001


@pytest.mark.parametrize("base, rates", [
    (TWO_LEVEL, dict(gamma=1e-2, eta=1e-3)),
    (THREE_LEVEL, dict(gamma=1e-2, eta=1e-3)),
    (BIPARTITE, dict(eta=0.5, duration=3.0)),
])
def test_oracle_equivalence(base, rates):
    sc = _scenario(base, **rates)
    traj = propagate(sc, grid_points=64)
    _, states = propagate_expm(sc, grid_points=64)
    assert np.abs(traj.states - states).max() <= 1e-6


@pytest.mark.parametrize("base", [TWO_LEVEL, THREE_LEVEL])
def test_interaction_picture_matches_lab_basis(base):
    sc = _scenario(base, gamma=1e-3, eta=1e-3)
    a = propagate(sc, grid_points=200)
    b = propagate(sc, grid_points=200, interaction_picture=False)
    assert a.metadata["picture"] == "interaction" and b.metadata["picture"] == "lab"
    assert np.abs(a.states - b.states).max() <= 1e-7


def test_non_covariant_dissipator_falls_back():
    sc = _scenario(TWO_LEVEL, gamma=1e-2)
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    assert covariant_energies(sc.hamiltonian, (DissipatorSpec(sx, 0.1),)) is None
    assert covariant_energies(sc.hamiltonian, sc.dissipators) is not None


def test_physicality_invariants():
    sc = _scenario(TWO_LEVEL, gamma=1e-2, eta=1e-2)
    phys = propagate(sc, grid_points=500).physicality()
    assert phys["trace_error"] <= 1e-8
    assert phys["min_eigenvalue"] >= -1e-8
    assert phys["hermiticity_error"] <= 1e-9


def test_zero_rate_purity():
    traj = propagate(_scenario(THREE_LEVEL, a=0.5, c=0.2, phi=1.0), grid_points=500)
    pur = np.real(np.einsum("kij,kji->k", traj.states, traj.states))
    assert np.abs(pur - 1).max() <= 1e-8


def test_tolerance_halving_converged():
    sc = _scenario(TWO_LEVEL, gamma=1e-3, eta=1e-4)
    a = propagate(sc, grid_points=200)
    b = propagate(sc, grid_points=200, rtol=5e-11, atol=5e-13)
    assert np.abs(a.states[-1] - b.states[-1]).max() <= 1e-8


def test_physicality_guard_trips():
    bad = np.stack([np.eye(2) / 2, np.diag([1.2, -0.2])]).astype(complex)
    with pytest.raises(PhysicalityViolation) as err:
        check_physicality(Trajectory(np.array([0.0, 1.0]), bad))
    assert err.value.time == 1.0
    trace_bad = np.stack([np.eye(2) / 2, np.eye(2) * 0.6]).astype(complex)
    with pytest.raises(PhysicalityViolation):
        check_physicality(Trajectory(np.array([0.0, 1.0]), trace_bad))


# ---- propagate_pure -------------------------------------------------------

def test_pure_rejects_rates():
    with pytest.raises(NonzeroRates):
        propagate_pure(_scenario(TWO_LEVEL, gamma=1e-3))


def test_pure_without_drive_is_static():
    pure = propagate_pure(_undriven(), grid_points=100)
    np.testing.assert_allclose(pure.vectors, np.broadcast_to([1, 0], pure.vectors.shape), atol=1e-14)


def test_pure_vs_analytic_state():
    cfg = ScenarioConfig(name="t", **dict(TWO_LEVEL, a=0.3, phi=2.0))
    pure = propagate_pure(build_scenario(cfg), grid_points=1000)
    exact = analytic_state_2ls(pure.times, build_params(cfg), exact_quadrature=True)
    fid = np.abs(np.sum(np.conj(exact) * pure.vectors, axis=1)) ** 2
    assert 1 - fid.min() <= 1e-8
    assert pure.norm_drift <= 1e-9


@pytest.mark.parametrize("base", [TWO_LEVEL, THREE_LEVEL])
def test_pure_vs_lindblad(base):
    sc = _scenario(base, a=0.6, phi=0.4)
    pure = propagate_pure(sc, grid_points=500).to_density()
    mixed = propagate(sc, grid_points=500)
    assert np.abs(pure.states - mixed.states).max() <= 1e-7


def test_pure_lab_frame_matches_lindblad():
    sc = _scenario(TWO_LEVEL, frame="lab")
    pure = propagate_pure(sc, grid_points=300).to_density()
    mixed = propagate(sc, grid_points=300)
    assert np.abs(pure.states - mixed.states).max() <= 1e-7
