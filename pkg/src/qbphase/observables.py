"""Stored energy, populations, purity and charge-stability diagnostics."""

from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_simpson, cumulative_trapezoid

from .errors import DimensionMismatch
from .linalg import ketbra, partial_trace_charger
from .propagator import Trajectory


@dataclass
class EnergySeries:
    """Stored energy ``E(t) = tr(H rho(t)) - tr(H rho(0))`` and its running integral."""

    times: np.ndarray
    stored: np.ndarray
    integral: np.ndarray


def _integrate(values, times):
    # same cumulative rule as the precession integral of the geometric phase
    if len(times) < 2:
        return np.zeros_like(values)
    if len(times) < 3:
        return cumulative_trapezoid(values, times, initial=0.0)
    return cumulative_simpson(values, x=times, initial=0.0)


def stored_energy(traj, h_qb):
    h_qb = np.asarray(h_qb)
    if h_qb.shape != (traj.dim, traj.dim):
        raise DimensionMismatch(f"battery Hamiltonian {h_qb.shape} does not act on {traj.dim}-level states")
    expect = np.real(np.einsum("ij,kji->k", h_qb, traj.states))
    stored = expect - expect[0]
    return EnergySeries(traj.times, stored, _integrate(stored, traj.times))


def reduced_qb_trajectory(traj):
    """Battery-qubit trajectory obtained by tracing the charger out of every state."""
    if traj.dim != 4:
        raise DimensionMismatch(f"expected a charger--battery trajectory, got dimension {traj.dim}")
    meta = dict(traj.metadata, reduced="charger traced out")
    return Trajectory(traj.times, partial_trace_charger(traj.states, tol=1e-9), meta)


def stored_energy_qb_subsystem(traj, p):
    """Energy stored in the battery qubit of a bipartite run, ``H = omega_qb |1><1|``."""
    return stored_energy(reduced_qb_trajectory(traj), p.omega_qb * ketbra(2, 1, 1))


def populations(traj):
    """Diagonal of every state, shape ``(n_times, dim)``."""
    return np.real(np.diagonal(traj.states, axis1=-2, axis2=-1)).copy()


def purity(traj):
    return np.real(np.einsum("kij,kji->k", traj.states, traj.states))


def _check_window(window):
    if not 0 < window <= 0.5:
        raise ValueError(f"window must lie in (0, 0.5], got {window}")


def charge_stability(series, window=0.1):
    """Largest ``|dE/dt|`` over the final ``window`` fraction of the grid, divided by ``max E``.

    Small values mean the stored charge has settled. A series that never stores
    energy returns 0.
    """
    _check_window(window)
    e = np.asarray(series.stored, dtype=float)
    t = np.asarray(series.times, dtype=float)
    peak = np.abs(e).max(initial=0.0)
    if peak == 0 or len(t) < 3:
        return 0.0
    de = np.gradient(e, t)
    start = int(np.floor((1.0 - window) * (len(t) - 1)))
    return float(np.abs(de[start:]).max() / peak)


def oscillation_amplitude(series, window=1.0 / 3.0):
    """Half the peak-to-peak swing of ``E`` over the final ``window`` fraction, divided by ``max E``."""
    if not 0 < window <= 1:
        raise ValueError(f"window must lie in (0, 1], got {window}")
    e = np.asarray(series.stored, dtype=float)
    peak = np.abs(e).max(initial=0.0)
    if peak == 0:
        return 0.0
    start = int(np.floor((1.0 - window) * (len(e) - 1)))
    tail = e[start:]
    return float(0.5 * (tail.max() - tail.min()) / peak)
