"""Quick oracle and invariant checks behind ``qbphase check``.

Each check returns ``(passed, detail)``. The full suites live under ``tests/``;
these are the fast subset worth running on a fresh install.
"""

import math

import numpy as np

from .. import analytic, linalg, oracles
from ..observables import stored_energy
from ..phase import geometric_phase, track_eigenstate
from ..propagator import PureTrajectory, propagate, propagate_pure
from .config import ScenarioConfig, build_params, build_scenario
from .registry import THREE_LEVEL, TWO_LEVEL


def check_expm():
    rng = np.random.default_rng(7)
    m = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    err = np.abs(linalg.expm(m) - oracles.taylor_expm(m)).max()
    return err <= 1e-10, f"Pade vs Taylor max difference {err:.2e}"


def check_eig():
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    es = linalg.eig_hermitian(0.5 * (np.eye(2) + 0.6 * sx))
    err = np.abs(es.values - [0.8, 0.2]).max()
    return err <= 1e-12, f"eigenvalue error {err:.2e}"


def check_identity_2ls():
    cfg = ScenarioConfig(name="check-2ls", **TWO_LEVEL)
    sc = build_scenario(cfg)
    traj = propagate(sc)
    rec = geometric_phase(track_eigenstate(traj, sc.bare_hamiltonian))
    ie = stored_energy(traj, sc.bare_hamiltonian).integral
    err = np.abs(rec.total_gp - ie).max()
    return err <= 1e-4, f"max |GP - I_E| = {err:.2e} rad"


def check_analytic_states():
    worst = 0.0
    for base in (TWO_LEVEL, THREE_LEVEL):
        cfg = ScenarioConfig(name="check", **dict(base, a=0.4, phi=0.7,
                                                  **({"c": 0.3, "varphi": -1.1} if base is THREE_LEVEL else {})))
        sc = build_scenario(cfg)
        pure = propagate_pure(sc, grid_points=400)
        p = build_params(cfg)
        exact = (analytic.analytic_state_2ls if cfg.model == "two_level" else analytic.analytic_state_3ls)(pure.times, p)
        fid = np.abs(np.sum(np.conj(exact) * pure.vectors, axis=1)) ** 2
        worst = max(worst, float(1 - fid.min()))
    return worst <= 1e-8, f"worst infidelity {worst:.2e}"


def check_solid_angle():
    n1, n2, n3 = np.eye(3)
    psi = oracles.triangle_path(n1, n2, n3, 400)
    times = np.arange(len(psi), dtype=float)
    rec = geometric_phase(PureTrajectory(times, psi))
    expected = -0.5 * oracles.signed_solid_angle(n1, n2, n3)
    err = abs(math.remainder(rec.total_gp[-1] - expected, 2 * math.pi))
    return err <= 1e-4, f"octant triangle phase error {err:.2e} rad"


def check_propagator_oracle():
    cfg = ScenarioConfig(name="check", gamma=1e-2, eta=1e-3, **TWO_LEVEL)
    sc = build_scenario(cfg)
    traj = propagate(sc, grid_points=64)
    _, states = oracles.propagate_expm(sc, grid_points=64)
    err = np.abs(traj.states - states).max()
    return err <= 1e-6, f"Lindblad vs Magnus-expm max entry difference {err:.2e}"


CHECKS = {
    "expm": check_expm,
    "eig_hermitian": check_eig,
    "gp_energy_identity_2ls": check_identity_2ls,
    "analytic_states": check_analytic_states,
    "solid_angle": check_solid_angle,
    "propagator_oracle": check_propagator_oracle,
}


def run_checks(stream=None):
    """Run every check, print one line each, return the number of failures."""
    failures = 0
    for name, fn in CHECKS.items():
        try:
            ok, detail = fn()
        except Exception as exc:  # report and keep going
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        failures += not ok
        line = f"{'PASS' if ok else 'FAIL'}  {name}: {detail}"
        print(line, file=stream)
    return failures
