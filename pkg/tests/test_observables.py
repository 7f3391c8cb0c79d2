import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qbphase.analytic import analytic_state_2ls
from qbphase.errors import DimensionMismatch
from qbphase.experiments import ScenarioConfig, build_params, build_scenario
from qbphase.experiments.registry import BIPARTITE, THREE_LEVEL, TWO_LEVEL
from qbphase.models import pulse_area_2ls
from qbphase.observables import (EnergySeries, charge_stability, oscillation_amplitude, populations,
                                 purity, reduced_qb_trajectory, stored_energy, stored_energy_qb_subsystem)
from qbphase.propagator import Trajectory, propagate


def _cfg(base, **kw):
    return ScenarioConfig(name="t", **dict(base, **kw))


def _constant(rho, n=50):
    return Trajectory(np.linspace(0, 1, n), np.broadcast_to(rho, (n,) + rho.shape).astype(complex))


def test_constant_state_stores_nothing():
    rho = np.diag([0.7, 0.3])
    e = stored_energy(_constant(rho), np.diag([0, 5.0]))
    np.testing.assert_array_equal(e.stored, 0)
    np.testing.assert_array_equal(e.integral, 0)
    assert charge_stability(e) == 0.0


def test_full_charge_closed_forms():
    e = stored_energy(Trajectory(np.array([0.0, 1.0]), np.array([np.diag([1, 0]), np.diag([0, 1])], dtype=complex)),
                      np.diag([0, 3.0]))
    assert e.stored[-1] == 3.0
    e3 = stored_energy(Trajectory(np.array([0.0, 1.0]),
                                  np.array([np.diag([1, 0, 0]), np.diag([0, 0, 1])], dtype=complex)),
                       np.diag([0, 3.0, 5.5]))
    assert e3.stored[-1] == 5.5


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        stored_energy(_constant(np.eye(2) / 2), np.eye(3))
    with pytest.raises(DimensionMismatch):
        reduced_qb_trajectory(_constant(np.eye(2) / 2))


@pytest.mark.parametrize("base", [TWO_LEVEL, THREE_LEVEL])
def test_trace_formula_matches_population_forms(base):
    cfg = _cfg(base, gamma=1e-2, eta=1e-3, a=0.6, phi=0.5)
    sc = build_scenario(cfg)
    traj = propagate(sc, grid_points=400)
    e = stored_energy(traj, sc.bare_hamiltonian)
    pops = populations(traj)
    p = build_params(cfg)
    if cfg.model == "two_level":
        closed = p.gap * pops[:, 1]
    else:
        closed = p.gap01 * pops[:, 1] + (p.gap01 + p.gap12) * pops[:, 2]
    assert np.abs(e.stored - (closed - closed[0])).max() <= 1e-12 * max(1, np.abs(closed).max())


def test_unitary_energy_is_sin_squared():
    cfg = _cfg(TWO_LEVEL)
    p = build_params(cfg)
    times = np.linspace(0, 1, 801)
    psi = analytic_state_2ls(times, p, exact_quadrature=True)
    traj = Trajectory(times, np.einsum("ki,kj->kij", psi, psi.conj()))
    e = stored_energy(traj, np.diag([0, p.gap]))
    theta = pulse_area_2ls(times, p.drive, exact_quadrature=True)
    assert np.abs(e.stored - p.gap * np.sin(theta) ** 2).max() <= 1e-8


def test_integral_starts_at_zero_and_grows():
    sc = build_scenario(_cfg(TWO_LEVEL))
    e = stored_energy(propagate(sc, grid_points=500), sc.bare_hamiltonian)
    assert e.integral[0] == 0
    assert np.all(np.diff(e.integral) >= -1e-12)


def test_integral_grid_convergence():
    cfg = _cfg(TWO_LEVEL, gamma=1e-2, eta=1e-3)
    sc = build_scenario(cfg)
    coarse = stored_energy(propagate(sc, grid_points=2000), sc.bare_hamiltonian).integral[-1]
    fine = stored_energy(propagate(sc, grid_points=4000), sc.bare_hamiltonian).integral[-1]
    assert abs(coarse - fine) <= 1e-6 * build_params(cfg).gap * sc.duration


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-2, 2), min_size=3, max_size=30))
def test_integral_exact_on_quadratics(coeffs):
    times = np.linspace(0, 1, len(coeffs))
    _, c1, c2 = coeffs[:3]
    h = np.diag([0.0, 1.0])
    # populations shaped so that E(t) = c1 t + c2 t^2 with E(0) = 0
    e = c1 * times + c2 * times ** 2
    scale = 1 + np.abs(e).max()
    p1 = 0.5 + 0.5 * e / scale
    states = np.zeros((len(times), 2, 2), dtype=complex)
    states[:, 0, 0], states[:, 1, 1] = 1 - p1, p1
    series = stored_energy(Trajectory(times, states), h)
    exact = (c1 * times ** 2 / 2 + c2 * times ** 3 / 3) * 0.5 / scale
    np.testing.assert_allclose(series.integral, exact, atol=1e-12)


def test_bipartite_partial_trace_energy():
    cfg = _cfg(BIPARTITE, eta=0.2, duration=3.0, grid_points=600)
    sc = build_scenario(cfg)
    traj = propagate(sc, grid_points=600)
    p = build_params(cfg)
    e = stored_energy_qb_subsystem(traj, p)
    assert e.stored[0] == 0
    full = np.kron(np.eye(2), np.diag([0, p.omega_qb]))
    direct = np.real(np.einsum("ij,kji->k", full, traj.states))
    assert np.abs(e.stored - (direct - direct[0])).max() <= 1e-12
    red = reduced_qb_trajectory(traj)
    assert red.dim == 2 and "reduced" in red.metadata


def test_bipartite_oscillates_without_dephasing():
    cfg = _cfg(BIPARTITE, eta=0.0, duration=10.0, grid_points=2000)
    traj = propagate(build_scenario(cfg), grid_points=2000)
    e = stored_energy_qb_subsystem(traj, build_params(cfg))
    assert oscillation_amplitude(e) > 0.2


def test_purity_and_populations():
    rho = np.diag([0.5, 0.25, 0.25])
    traj = _constant(rho, 3)
    np.testing.assert_allclose(purity(traj), 0.375)
    np.testing.assert_allclose(populations(traj), np.tile([0.5, 0.25, 0.25], (3, 1)))


def test_charge_stability_cases():
    t = np.linspace(0, 1, 1001)
    settled = EnergySeries(t, np.tanh(20 * t), None)
    ramp = EnergySeries(t, t, None)
    assert charge_stability(settled) < 1e-6
    assert charge_stability(ramp) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        charge_stability(ramp, window=0.7)


def test_charge_stability_regimes():
    sc = build_scenario(_cfg(TWO_LEVEL))
    unitary = stored_energy(propagate(sc, grid_points=2000), sc.bare_hamiltonian)
    assert charge_stability(unitary) < 1e-3
    sc = build_scenario(_cfg(TWO_LEVEL, gamma=1e-2, eta=1e-3))
    relaxing = stored_energy(propagate(sc, grid_points=2000), sc.bare_hamiltonian)
    assert charge_stability(relaxing) > 0


def test_oscillation_amplitude_of_sine():
    t = np.linspace(0, 3, 3001)
    series = EnergySeries(t, 1 + 0.5 * np.sin(2 * np.pi * 4 * t), None)
    assert oscillation_amplitude(series) == pytest.approx(0.5 / 1.5, rel=1e-4)
