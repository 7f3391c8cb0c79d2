"""Lindblad and Schroedinger propagation on a uniform output grid.

The density matrix is integrated in a real orthonormal basis of Hermitian
matrices, so every state handed back is Hermitian by construction. The
integrator is scipy's DOP853 embedded pair; its dense output is sampled on the
uniform grid, which decouples the geometric-phase grid from the adaptive steps.

By default the integration runs in the interaction picture of the diagonal
part ``H_0`` of the static Hamiltonian, ``rho = U_0 rho_I U_0^+`` with
``U_0 = exp(-i H_0 t)``. On resonance the interaction-picture state moves only
at the drive rate, so the step count no longer scales with the level
spacing. This needs every jump operator to pick up a single phase under
``U_0`` (true for ``|i><j|`` operators); otherwise the lab basis is used.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .errors import NonzeroRates, PhysicalityViolation, ToleranceFailure

TRACE_TOL = 1e-8
POSITIVITY_TOL = 1e-8
DEFAULT_GRID = 4000


@dataclass
class Trajectory:
    """Density matrices ``states[k]`` at ``times[k]``."""

    times: np.ndarray
    states: np.ndarray
    metadata: dict = field(default_factory=dict)

    @property
    def dim(self):
        return self.states.shape[-1]

    def __len__(self):
        return len(self.times)

    def physicality(self):
        """Worst trace deviation, Hermiticity error and most negative eigenvalue."""
        tr = np.real(np.trace(self.states, axis1=-2, axis2=-1))
        herm = np.abs(self.states - np.conj(np.swapaxes(self.states, -1, -2))).max()
        sym = 0.5 * (self.states + np.conj(np.swapaxes(self.states, -1, -2)))
        mins = np.linalg.eigvalsh(sym)[:, 0]
        return {
            "trace_error": float(np.abs(tr - 1).max()),
            "hermiticity_error": float(herm),
            "min_eigenvalue": float(mins.min()),
        }


@dataclass
class PureTrajectory:
    """State vectors of a closed-system run; ``norm_drift`` is measured before renormalising."""

    times: np.ndarray
    vectors: np.ndarray
    norm_drift: float = 0.0
    metadata: dict = field(default_factory=dict)

    def to_density(self):
        states = np.einsum("ki,kj->kij", self.vectors, np.conj(self.vectors))
        return Trajectory(self.times, states, dict(self.metadata))


def lindblad_rhs(t, rho, hamiltonian, dissipators):
    """Right-hand side ``-i[H(t), rho] + sum_k r_k (L rho L^+ - {L^+ L, rho}/2)``.

    ``hamiltonian`` is either a fixed matrix or a callable of time.
    """
    h = hamiltonian(t) if callable(hamiltonian) else np.asarray(hamiltonian)
    out = -1j * (h @ rho - rho @ h)
    for d in dissipators:
        if d.rate == 0:
            continue
        op = d.jump_operator
        opd = np.conj(op.T)
        ld = opd @ op
        out = out + d.rate * (op @ rho @ opd - 0.5 * (ld @ rho + rho @ ld))
    return out


def hermitian_basis(dim):
    """Columns are ``vec(B_a)`` (row-major) for a Hilbert--Schmidt orthonormal Hermitian basis."""
    mats = []
    for i in range(dim):
        m = np.zeros((dim, dim), dtype=complex)
        m[i, i] = 1.0
        mats.append(m)
    s = 1.0 / np.sqrt(2.0)
    for i in range(dim):
        for j in range(i + 1, dim):
            m = np.zeros((dim, dim), dtype=complex)
            m[i, j] = m[j, i] = s
            mats.append(m)
            m = np.zeros((dim, dim), dtype=complex)
            m[i, j], m[j, i] = -1j * s, 1j * s
            mats.append(m)
    return np.stack([m.ravel() for m in mats], axis=1)


def _commutator_super(h):
    ident = np.eye(h.shape[0])
    return -1j * (np.kron(h, ident) - np.kron(ident, h.T))


def _dissipator_super(op, rate):
    ident = np.eye(op.shape[0])
    ld = np.conj(op.T) @ op
    return rate * (np.kron(op, np.conj(op)) - 0.5 * np.kron(ld, ident) - 0.5 * np.kron(ident, ld.T))


class RealGenerator:
    """Lindblad generator acting on real Hermitian-basis coordinates."""

    def __init__(self, hamiltonian, dissipators):
        d = hamiltonian.dim
        self.dim = d
        self.basis = hermitian_basis(d)
        bdag = np.conj(self.basis.T)

        def to_real(sup):
            g = bdag @ sup @ self.basis
            return np.ascontiguousarray(g.real)

        static = _commutator_super(hamiltonian.static)
        for spec in dissipators:
            if spec.rate > 0:
                static = static + _dissipator_super(spec.jump_operator, spec.rate)
        self.static = to_real(static)
        self.coeffs = [c for _, c in hamiltonian.terms]
        ops = [to_real(_commutator_super(op)) for op, _ in hamiltonian.terms]
        n = d * d
        self.stacked = np.concatenate(ops, axis=0) if ops else np.zeros((0, n))
        self.n_terms = len(ops)

    def __call__(self, t, x):
        out = self.static @ x
        if self.n_terms:
            c = np.array([coeff(t) for coeff in self.coeffs])
            out += c @ (self.stacked @ x).reshape(self.n_terms, -1)
        return out

    def to_real(self, rho):
        return np.real(np.conj(self.basis.T) @ np.asarray(rho).ravel())

    def from_real(self, x):
        """Coordinates ``(..., d^2)`` back to Hermitian matrices ``(..., d, d)``."""
        vec = np.asarray(x) @ self.basis.T
        return vec.reshape(vec.shape[:-1] + (self.dim, self.dim))


class InteractionGenerator:
    """Lindblad right-hand side in the interaction picture of ``diag(energies)``.

    Acts on real Hermitian-basis coordinates of ``rho_I``.
    """

    def __init__(self, hamiltonian, dissipators, energies):
        d = hamiltonian.dim
        self.dim = d
        self.energies = np.asarray(energies, dtype=float)
        self.basis = hermitian_basis(d)
        self.bdag = np.conj(self.basis.T)
        self.offdiag = hamiltonian.static - np.diag(np.diag(hamiltonian.static))
        self.ops = [op for op, _ in hamiltonian.terms]
        self.coeffs = [c for _, c in hamiltonian.terms]
        self.freqs = self.energies[:, None] - self.energies[None, :]
        self.jumps = []
        for spec in dissipators:
            if spec.rate > 0:
                op = np.asarray(spec.jump_operator, dtype=complex)
                self.jumps.append((spec.rate, op, np.conj(op.T), np.conj(op.T) @ op))

    def hamiltonian(self, t):
        h = self.offdiag.copy()
        for op, coeff in zip(self.ops, self.coeffs):
            h = h + coeff(t) * op
        return h * np.exp(1j * self.freqs * t)

    def __call__(self, t, x):
        rho = (self.basis @ x).reshape(self.dim, self.dim)
        h = self.hamiltonian(t)
        out = -1j * (h @ rho - rho @ h)
        for rate, op, opd, ld in self.jumps:
            out = out + rate * (op @ rho @ opd - 0.5 * (ld @ rho + rho @ ld))
        return np.real(self.bdag @ out.ravel())

    def to_real(self, rho):
        return np.real(self.bdag @ np.asarray(rho).ravel())

    def from_real(self, x, times):
        vec = np.asarray(x) @ self.basis.T
        rho = vec.reshape(vec.shape[:-1] + (self.dim, self.dim))
        return rho * np.exp(-1j * self.freqs[None] * np.asarray(times)[:, None, None])


def covariant_energies(hamiltonian, dissipators, tol=1e-12):
    """Diagonal of the static part if every jump operator is frame covariant, else ``None``.

    Covariant means all nonzero entries ``L_ij`` share one frequency
    ``E_i - E_j``, so ``U_0^+ L U_0`` differs from ``L`` by a phase only.
    """
    energies = np.real(np.diag(hamiltonian.static))
    scale = max(1.0, float(np.abs(energies).max(initial=0.0)))
    for spec in dissipators:
        if spec.rate == 0:
            continue
        i, j = np.nonzero(np.abs(spec.jump_operator) > 0)
        freqs = energies[i] - energies[j]
        if freqs.size and np.ptp(freqs) > tol * scale:
            return None
    return energies


def uniform_grid(duration, grid_points):
    """``grid_points`` intervals, i.e. ``grid_points + 1`` samples on ``[0, duration]``."""
    if grid_points < 1:
        raise ValueError("grid_points must be at least 1")
    return np.linspace(0.0, duration, int(grid_points) + 1)


def check_physicality(traj, trace_tol=TRACE_TOL, positivity_tol=POSITIVITY_TOL):
    """Raise :class:`PhysicalityViolation` at the first offending grid time."""
    tr = np.real(np.trace(traj.states, axis1=-2, axis2=-1))
    bad = np.flatnonzero(np.abs(tr - 1) > trace_tol)
    if bad.size:
        k = bad[0]
        raise PhysicalityViolation("trace", float(traj.times[k]), float(abs(tr[k] - 1)))
    mins = np.linalg.eigvalsh(traj.states)[:, 0]
    bad = np.flatnonzero(mins < -positivity_tol)
    if bad.size:
        k = bad[0]
        raise PhysicalityViolation("positivity", float(traj.times[k]), float(-mins[k]))


def propagate(scenario, grid_points=DEFAULT_GRID, rtol=1e-10, atol=1e-12, check=True,
              interaction_picture=True):
    """Integrate the Lindblad equation of ``scenario`` over ``[0, duration]``.

    Parameters
    ----------
    scenario : qbphase.models.Scenario
    grid_points : int
        Number of uniform output intervals.
    rtol, atol : float
        Tolerances of the DOP853 embedded pair.
    check : bool
        Enforce trace and positivity guards on every output state.
    interaction_picture : bool
        Integrate in the frame of the diagonal static Hamiltonian when the
        dissipators allow it (see the module notes).

    Returns
    -------
    Trajectory
    """
    times = uniform_grid(scenario.duration, grid_points)
    energies = covariant_energies(scenario.hamiltonian, scenario.dissipators) if interaction_picture else None
    if energies is None:
        gen = RealGenerator(scenario.hamiltonian, scenario.dissipators)
    else:
        gen = InteractionGenerator(scenario.hamiltonian, scenario.dissipators, energies)
    x0 = gen.to_real(scenario.rho0)
    sol = solve_ivp(gen, (0.0, scenario.duration), x0, method="DOP853", t_eval=times,
                    rtol=rtol, atol=atol)
    if sol.status != 0:
        raise ToleranceFailure(f"integration failed: {sol.message}")
    states = gen.from_real(sol.y.T) if energies is None else gen.from_real(sol.y.T, times)
    meta = {
        "model": scenario.model,
        "frame": scenario.frame,
        "method": "DOP853",
        "picture": "lab" if energies is None else "interaction",
        "rtol": rtol,
        "atol": atol,
        "nfev": int(sol.nfev),
        "grid_points": int(grid_points),
    }
    traj = Trajectory(times, states, meta)
    if check:
        check_physicality(traj)
    return traj


def propagate_pure(scenario, grid_points=DEFAULT_GRID, rtol=1e-10, atol=1e-12,
                   interaction_picture=True):
    """Schroedinger integration of the initial state vector (closed scenarios only).

    The sampled vectors are renormalised; the largest norm deviation seen before
    renormalising is kept as ``norm_drift``.
    """
    if any(d.rate > 0 for d in scenario.dissipators):
        raise NonzeroRates("propagate_pure needs every dissipation rate to be zero")
    ham = scenario.hamiltonian
    energies = np.real(np.diag(ham.static)) if interaction_picture else np.zeros(ham.dim)
    gen = InteractionGenerator(ham, (), energies)

    def rhs(t, phi):
        return -1j * (gen.hamiltonian(t) @ phi)

    times = uniform_grid(scenario.duration, grid_points)
    sol = solve_ivp(rhs, (0.0, scenario.duration), scenario.initial.astype(complex),
                    method="DOP853", t_eval=times, rtol=rtol, atol=atol)
    if sol.status != 0:
        raise ToleranceFailure(f"integration failed: {sol.message}")
    vecs = sol.y.T * np.exp(-1j * np.outer(times, energies))
    norms = np.linalg.norm(vecs, axis=1)
    drift = float(np.abs(norms - 1).max())
    meta = {"model": scenario.model, "frame": scenario.frame, "method": "DOP853",
            "picture": "interaction" if interaction_picture else "lab",
            "rtol": rtol, "atol": atol, "nfev": int(sol.nfev)}
    return PureTrajectory(times, vecs / norms[:, None], drift, meta)
