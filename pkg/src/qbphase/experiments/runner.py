"""Run one scenario or a sweep: propagate, track, phase, energies, table."""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np

from ..errors import QBPhaseError, ScenarioError
from ..observables import charge_stability, purity, reduced_qb_trajectory, stored_energy
from ..phase import geometric_phase, gp_deviation, track_eigenstate
from ..propagator import propagate
from .config import build_scenario


@dataclass
class RunResult:
    """Config echo, per-time columns and a summary of one scenario.

    ``error`` is set (and ``columns`` empty) when the scenario failed inside a sweep.
    """

    config: object
    columns: dict = field(default_factory=dict)
    summary: dict = field(default_factory=dict)
    error: Optional[ScenarioError] = None

    @property
    def ok(self):
        return self.error is None

    def column_names(self):
        return list(self.columns)


def column_names(dim):
    pops = [f"pop_{i}" for i in range(dim)]
    return (["t"] + pops + ["energy", "energy_integral", "gp", "pancharatnam", "dynamical",
                            "delta_gp", "purity", "eps_plus", "gap"])


def _analyse(cfg, frame, grid):
    """Propagate one config and return (battery trajectory, path, record, energy, raw trajectory)."""
    sc = build_scenario(cfg, frame)
    traj = propagate(sc, grid_points=grid)
    battery = reduced_qb_trajectory(traj) if cfg.model == "bipartite" else traj
    path = track_eigenstate(battery, sc.bare_hamiltonian, strict=True)
    record = geometric_phase(path)
    energy = stored_energy(battery, sc.bare_hamiltonian)
    return battery, path, record, energy, traj


def _closed_key(cfg):
    return cfg.replace(name="unitary", figure=None, output=None, gamma=0.0, eta=0.0,
                       gamma21=None, eta2=None)


@lru_cache(maxsize=32)
def _unitary_record(closed_cfg, frame, grid):
    return _analyse(closed_cfg, frame, grid)[2]


def run_scenario(cfg, frame=None, grid_points=None):
    """Full pipeline for one config.

    Parameters
    ----------
    cfg : ScenarioConfig
    frame : {"rwa", "lab"}, optional
        Overrides ``cfg.frame``.
    grid_points : int, optional
        Overrides ``cfg.grid_points``.

    Raises
    ------
    ScenarioError
        Wrapping any failure, with the scenario name attached.
    """
    frame = cfg.frame if frame is None else frame
    grid = cfg.grid_points if grid_points is None else int(grid_points)
    if frame != cfg.frame or grid != cfg.grid_points:
        cfg = cfg.replace(frame=frame, grid_points=grid)
    try:
        battery, path, record, energy, traj = _analyse(cfg, frame, grid)
        if _is_closed(cfg):
            reference = record
        else:
            reference = _unitary_record(_closed_key(cfg), frame, grid)
        delta = gp_deviation(record, reference)
    except QBPhaseError as exc:
        raise ScenarioError(cfg.name, exc) from exc
    except (ValueError, ArithmeticError) as exc:
        raise ScenarioError(cfg.name, exc) from exc

    pops = np.real(np.diagonal(battery.states, axis1=-2, axis2=-1))
    cols = {"t": battery.times}
    for i in range(battery.dim):
        cols[f"pop_{i}"] = pops[:, i].copy()
    cols.update({
        "energy": energy.stored,
        "energy_integral": energy.integral,
        "gp": record.total_gp,
        "pancharatnam": record.pancharatnam_part,
        "dynamical": record.dynamical_part,
        "delta_gp": delta,
        "purity": purity(battery),
        "eps_plus": path.eigenvalues,
        "gap": path.gaps,
    })
    phys = traj.physicality()
    summary = {
        "final_gp": float(record.total_gp[-1]),
        "final_energy_integral": float(energy.integral[-1]),
        "final_delta_gp": float(delta[-1]),
        "final_energy": float(energy.stored[-1]),
        "max_energy": float(energy.stored.max()),
        "charge_stability": charge_stability(energy),
        "min_gap": path.min_gap,
        "min_separation": path.min_separation,
        "branch_warnings": len(path.warnings),
        "unresolved_points": int(record.unresolved.sum()),
        "trace_error": phys["trace_error"],
        "min_eigenvalue": phys["min_eigenvalue"],
        "nfev": traj.metadata.get("nfev", 0),
    }
    return RunResult(cfg, cols, summary)


def _is_closed(cfg):
    return cfg.gamma == 0 and cfg.eta == 0 and not cfg.upper_gamma and not cfg.upper_eta


def _run_or_capture(args):
    cfg, frame, grid = args
    try:
        return run_scenario(cfg, frame, grid)
    except ScenarioError as exc:
        return RunResult(cfg, error=exc)


def run_sweep(cfgs, parallelism=1, frame=None, grid_points=None):
    """Run many configs; results come back in input order.

    Failures do not abort the batch: the matching :class:`RunResult` carries
    the :class:`ScenarioError` in ``error``. ``parallelism`` above 1 uses a
    process pool; the output is identical either way.
    """
    if parallelism < 1:
        raise ValueError(f"parallelism must be at least 1, got {parallelism}")
    jobs = [(cfg, frame, grid_points) for cfg in cfgs]
    if parallelism == 1 or len(jobs) <= 1:
        return [_run_or_capture(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=min(parallelism, len(jobs))) as pool:
        return list(pool.map(_run_or_capture, jobs))
