"""Geometric phase of pure and mixed-state paths.

For a path of state vectors ``psi_k`` on a time grid the phase is

    Phi_g(t_n) = arg<psi_0|psi_n> - Im int_0^{t_n} <psi|d psi/dt> dt,

evaluated through the gauge-invariant Pancharatnam product. For open evolution
the path is the eigenvector of ``rho(t)`` continuously connected to the pure
initial state.

Fast free precession under a diagonal reference Hamiltonian ``H_ref`` (the
bare battery levels) can be split off exactly: with ``chi = exp(i H_ref t) psi``,

    Im <psi|psi'> = Im <chi|chi'> - <psi|H_ref|psi>,

so the local Pancharatnam arguments are taken between the slowly varying
``chi_k`` and the precession enters through the smooth integrand
``<psi|H_ref|psi>`` (cumulative Simpson rule). Without a reference this reduces to the
plain product ``arg<psi_0|psi_n> - sum_k arg<psi_k|psi_k+1>``.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.integrate import cumulative_simpson, cumulative_trapezoid

from .errors import BranchAmbiguity, GridMismatch, InitialStateNotPure, OrthogonalNeighbors
from .linalg import eig_hermitian

PURITY_TOL = 1e-6
AMBIGUITY_TOL = 1e-3
NEIGHBOR_TOL = 1e-6
# Below this modulus arg<psi_0|psi_n> is dominated by propagation error.
OVERLAP_FLOOR = 1e-6


@dataclass
class EigenPath:
    """The tracked eigenbranch of a density-matrix trajectory.

    ``vectors`` are in the lab basis, in the gauge obtained by parallel
    transport of ``exp(i H_ref t) psi`` along the grid.
    """

    times: np.ndarray
    vectors: np.ndarray
    eigenvalues: np.ndarray
    gaps: np.ndarray
    separations: np.ndarray
    reference_hamiltonian: Optional[np.ndarray] = None
    warnings: list = field(default_factory=list)

    @property
    def min_gap(self):
        return float(self.gaps.min()) if self.gaps.size else float("inf")

    @property
    def min_separation(self):
        return float(self.separations.min()) if self.separations.size else 1.0


@dataclass
class PhaseRecord:
    """Unwrapped geometric phase with its Pancharatnam and dynamical parts.

    ``total_gp == pancharatnam_part - dynamical_part`` holds elementwise.
    ``unresolved`` marks grid points where ``|<psi_0|psi_n>|`` fell below the
    overlap floor and the Pancharatnam argument was held at its last value.
    """

    times: np.ndarray
    total_gp: np.ndarray
    pancharatnam_part: np.ndarray
    dynamical_part: np.ndarray
    unresolved: np.ndarray


def _reference_energies(reference, dim):
    if reference is None:
        return np.zeros(dim)
    ref = np.asarray(reference)
    if ref.ndim == 1:
        return ref.astype(float)
    off = ref - np.diag(np.diag(ref))
    if np.abs(off).max(initial=0.0) > 0:
        raise ValueError("reference Hamiltonian must be diagonal")
    return np.real(np.diag(ref)).astype(float)


def _frame_phases(times, energies):
    # exp(i H_ref t) for diagonal H_ref, as (n_times, dim)
    return np.exp(1j * np.outer(times, energies))


def track_eigenstate(traj, reference_hamiltonian=None, purity_tol=PURITY_TOL,
                     ambiguity_tol=AMBIGUITY_TOL, strict=True):
    """Follow the eigenvector of ``rho(t)`` that starts on the pure initial state.

    At ``t = 0`` the eigenvector with eigenvalue closest to 1 is taken; at every
    later grid point the new eigenvector with the largest overlap modulus with
    the previous one. Overlaps are compared in the frame co-rotating with
    ``reference_hamiltonian`` (diagonal, optional), and the phase of each new
    vector is fixed so that its overlap with the previous one is real positive.

    Parameters
    ----------
    traj : Trajectory-like
        Anything with ``times`` and ``states`` arrays.
    reference_hamiltonian : array_like, optional
        Diagonal matrix or vector of level energies.
    strict : bool
        Raise :class:`BranchAmbiguity` on a near-degenerate step; otherwise the
        step is recorded in ``warnings`` and the best overlap is kept.

    Returns
    -------
    EigenPath
    """
    times = np.asarray(traj.times, dtype=float)
    states = np.asarray(traj.states)
    dim = states.shape[-1]
    energies = _reference_energies(reference_hamiltonian, dim)
    eig = eig_hermitian(states, tol=1e-9)
    values = eig.values
    frame = _frame_phases(times, energies)
    # rotated eigenvectors chi = exp(i H_ref t) v, columns per time
    rotated = frame[:, :, None] * eig.vectors

    j0 = int(np.argmin(np.abs(values[0] - 1.0)))
    if abs(values[0, j0] - 1.0) > purity_tol:
        raise InitialStateNotPure(
            f"largest eigenvalue of rho(0) is {values[0].max():.9f}; a pure initial state is required")

    n = len(times)
    chi = np.empty((n, dim), dtype=complex)
    eps = np.empty(n)
    gaps = np.empty(n)
    seps = np.ones(max(n - 1, 0))
    warn = []

    def gap_at(k, j):
        others = np.delete(values[k], j)
        return float(np.abs(others - values[k, j]).min()) if others.size else np.inf

    chi[0] = rotated[0][:, j0]
    eps[0] = values[0, j0]
    gaps[0] = gap_at(0, j0)
    for k in range(1, n):
        cols = rotated[k]
        amps = np.conj(cols.T) @ chi[k - 1]
        mods = np.abs(amps)
        order = np.argsort(mods)
        j = int(order[-1])
        if dim > 1:
            seps[k - 1] = mods[order[-1]] - mods[order[-2]]
            if seps[k - 1] < ambiguity_tol:
                if strict:
                    raise BranchAmbiguity(float(times[k]), float(seps[k - 1]), gap_at(k, j))
                warn.append((float(times[k]), float(seps[k - 1])))
        # gauge: <chi_{k-1}|chi_k> real positive
        chi[k] = cols[:, j] * np.exp(1j * np.angle(amps[j]))
        eps[k] = values[k, j]
        gaps[k] = gap_at(k, j)

    # tiny negative eigenvalues are numerical; floor them for reporting
    eps = np.where((eps < 0) & (eps > -1e-8), 0.0, eps)
    vectors = np.conj(frame) * chi
    ref = None if reference_hamiltonian is None else energies
    return EigenPath(times, vectors, eps, gaps, seps, ref, warn)


def geometric_phase(path, reference_hamiltonian=None, overlap_floor=OVERLAP_FLOOR):
    """Discrete, gauge-invariant geometric phase along a path of state vectors.

    Parameters
    ----------
    path : EigenPath or PureTrajectory
        Anything with ``times`` and ``vectors`` (shape ``(n, d)``).
    reference_hamiltonian : array_like, optional
        Diagonal reference Hamiltonian whose precession is integrated
        analytically; defaults to the one stored on an :class:`EigenPath`.
    overlap_floor : float
        Minimum ``|<psi_0|psi_n>|`` for which the Pancharatnam argument is
        trusted; below it the last resolved value is held.

    Returns
    -------
    PhaseRecord
    """
    times = np.asarray(path.times, dtype=float)
    psi = np.asarray(path.vectors, dtype=complex)
    if reference_hamiltonian is None:
        reference_hamiltonian = getattr(path, "reference_hamiltonian", None)
    energies = _reference_energies(reference_hamiltonian, psi.shape[1])
    chi = _frame_phases(times, energies) * psi

    links = np.sum(np.conj(chi[:-1]) * chi[1:], axis=1)
    weak = np.flatnonzero(np.abs(links) < NEIGHBOR_TOL)
    if weak.size:
        k = weak[0]
        raise OrthogonalNeighbors(
            f"|<psi_k|psi_k+1>| = {abs(links[k]):.3e} between t={times[k]:.6g} and t={times[k + 1]:.6g}")
    local = np.concatenate(([0.0], np.cumsum(np.angle(links))))

    # parallel-transported frame vectors: <chi_k|chi_k+1> real positive
    transported = chi * np.exp(-1j * local)[:, None]
    # <psi_0|psi_n> in the transported gauge
    overlaps = np.sum(np.conj(psi[0]) * np.conj(_frame_phases(times, energies)) * transported, axis=1)
    unresolved = np.abs(overlaps) < overlap_floor
    unresolved[0] = False

    winding = _winding(times, transported, psi[0], energies, overlaps, unresolved)
    precession = np.sum(np.abs(psi) ** 2 * energies, axis=1)
    free_phase = _cumulative(precession, times)

    # arg<psi_0|psi_n> continued along the path, and the summed local arguments
    panch = winding + local
    dynamical = local - free_phase
    # total defined from the parts so that the split holds bit for bit
    return PhaseRecord(times, panch - dynamical, panch, dynamical, unresolved)


def continued_turns(func, lo, hi, f_lo, f_hi, rel_step=0.1, max_level=48):
    """Continuous change of ``arg f`` across each interval ``[lo_j, hi_j]``.

    ``func(times, index)`` evaluates ``f`` at the given times inside intervals
    ``index``. An interval is bisected until the chord ``|f_b - f_a|`` is below
    ``rel_step * min(|f_a|, |f_b|)``, which keeps every chord away from the
    origin, so the summed principal arguments count the winding correctly.
    Whole turns hidden inside a single base interval (equal end values) are
    not detected; callers choose base intervals finer than the fastest phase
    rotation.
    """
    lo, hi = np.asarray(lo, dtype=float), np.asarray(hi, dtype=float)
    turns = np.zeros(lo.shape)
    idx = np.arange(lo.size)
    a, b, fa, fb = lo, hi, np.asarray(f_lo, dtype=complex), np.asarray(f_hi, dtype=complex)
    for level in range(max_level + 1):
        if idx.size == 0:
            break
        split = np.abs(fb - fa) > rel_step * np.minimum(np.abs(fa), np.abs(fb))
        if level == max_level:
            split[:] = False
        done = ~split
        np.add.at(turns, idx[done], np.angle(fb[done] * np.conj(fa[done])))
        idx, a, b, fa, fb = idx[split], a[split], b[split], fa[split], fb[split]
        mid = 0.5 * (a + b)
        fm = func(mid, idx)
        idx = np.concatenate((idx, idx))
        a, b = np.concatenate((a, mid)), np.concatenate((mid, b))
        fa, fb = np.concatenate((fa, fm)), np.concatenate((fm, fb))
    return turns


def _winding(times, chi, psi0, energies, overlaps, unresolved):
    """Continuous argument of ``f(t) = <psi_0|exp(-i H_ref t) chi(t)>`` on the grid.

    Between grid points the slowly varying ``chi`` is interpolated linearly
    while the fast exponentials stay exact, so ``f`` may swing past the origin
    within one grid step without confusing the branch. The endpoints are
    exact; the refinement only decides the multiple of ``2 pi``. Intervals
    touching an unresolved point hold the last resolved argument.
    """
    ang = _held_angle(np.angle(overlaps), unresolved)
    if len(times) < 2:
        return ang
    weights = np.conj(psi0)

    def f(t, k):
        s = ((t - times[k]) / (times[k + 1] - times[k]))[:, None]
        vec = (1 - s) * chi[k] + s * chi[k + 1]
        return np.sum(weights * np.exp(-1j * t[:, None] * energies) * vec, axis=1)

    safe = ~(unresolved[:-1] | unresolved[1:])
    inc = np.angle(np.exp(1j * np.diff(ang)))
    k = np.flatnonzero(safe)
    if k.size:
        inc[k] = continued_turns(f, times[k], times[k + 1], overlaps[k], overlaps[k + 1])
    return ang[0] + np.concatenate(([0.0], np.cumsum(inc)))


def _held_angle(angles, unresolved):
    out = angles.copy()
    for k in np.flatnonzero(unresolved):
        out[k] = out[k - 1]
    return out


def gp_deviation(open_record, unitary_record):
    """Pointwise difference of the total phases of two records on one grid."""
    if open_record.times.shape != unitary_record.times.shape or not np.allclose(
            open_record.times, unitary_record.times, rtol=0, atol=1e-12):
        raise GridMismatch("phase records live on different time grids")
    return open_record.total_gp - unitary_record.total_gp


def _cumulative(values, times):
    # fourth order on uniform grids; the precession term dominates the discretization error
    if len(times) < 3:
        return cumulative_trapezoid(values, times, initial=0.0) if len(times) > 1 else np.zeros(1)
    return cumulative_simpson(values, x=times, initial=0.0)
