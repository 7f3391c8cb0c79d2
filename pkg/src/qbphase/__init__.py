"""Geometric phase and stored energy of driven open quantum batteries.

Typical use::

    from qbphase import models, propagator, phase, observables
    sc = models.scenario("two_level", params)
    traj = propagator.propagate(sc)
    path = phase.track_eigenstate(traj, sc.bare_hamiltonian)
    record = phase.geometric_phase(path)
"""

from . import analytic, linalg, models, observables, oracles, phase, propagator
from .errors import *  # noqa: F401,F403
from .models import scenario
from .phase import geometric_phase, track_eigenstate
from .propagator import propagate, propagate_pure

__version__ = "0.1.0"
