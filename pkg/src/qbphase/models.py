"""Hamiltonians, drive pulses, dissipators and initial states for the battery models.

Three models are provided:

* a driven two-level battery (``two_level``),
* a driven three-level ladder with a simultaneous two-tone drive (``three_level``),
* a two-qubit charger--battery pair with a driven, dephased charger (``bipartite``).

Energies are measured from the ground level (``omega_0 = 0``); only the gaps
enter. Time-dependent Hamiltonians are returned as :class:`DrivenHamiltonian`
objects, a static part plus Hermitian operators with real scalar coefficients,
which the propagator turns into superoperators once per run.
"""

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Tuple

import numpy as np
from scipy.special import erf

from .errors import DimensionMismatch, InvalidAmplitudes, NegativeRate
from .linalg import ketbra

MODELS = ("two_level", "three_level", "bipartite")
FRAMES = ("rwa", "lab")

_AMPLITUDE_TOL = 1e-12


@dataclass(frozen=True)
class DrivePulse:
    """Gaussian drive envelope ``A exp(-(t - center)^2 / (2 width^2))``.

    ``amplitude_eff`` is the product ``g A`` of coupling and envelope height.
    The pulse is assumed to be centred in a charging window of length
    ``2 * center``.
    """

    amplitude_eff: float
    center: float
    width: float
    carrier_freq: float
    amplitude: float = 1.0

    def __post_init__(self):
        if not self.width > 0:
            raise ValueError(f"pulse width must be positive, got {self.width}")
        if self.amplitude == 0:
            raise ValueError("envelope amplitude must be nonzero")
        if self.width > self.duration / 4:
            warnings.warn(
                f"pulse width {self.width:g} exceeds a quarter of the charging window "
                f"{self.duration:g}; the Erf pulse-area form loses accuracy",
                stacklevel=3,
            )

    @classmethod
    def for_two_level(cls, area, width, carrier_freq, duration=1.0):
        """Pulse whose two-level area ``(g/2) int f`` reaches ``area``."""
        return cls(area / (width * math.sqrt(math.pi / 2)), duration / 2, width, carrier_freq)

    @classmethod
    def for_three_level(cls, area, width, carrier_freq, duration=1.0):
        """Pulse whose ladder area ``(g/sqrt 2) int f`` reaches ``area``."""
        return cls(area / (width * math.sqrt(math.pi)), duration / 2, width, carrier_freq)

    @property
    def coupling(self):
        return self.amplitude_eff / self.amplitude

    @property
    def duration(self):
        return 2.0 * self.center

    @property
    def pulse_area_max(self):
        # two-level convention
        return self.amplitude_eff * self.width * math.sqrt(math.pi / 2)

    @property
    def pulse_area_max_3ls(self):
        return self.amplitude_eff * self.width * math.sqrt(math.pi)


@dataclass(frozen=True)
class TwoLevelParams:
    gap: float
    drive: DrivePulse
    gamma: float = 0.0
    eta: float = 0.0
    a: float = 1.0
    phi: float = 0.0

    def __post_init__(self):
        if not self.gap > 0:
            raise ValueError(f"gap must be positive, got {self.gap}")

    @property
    def resonant(self):
        return math.isclose(self.drive.carrier_freq, self.gap, rel_tol=1e-12)

    @property
    def dim(self):
        return 2


@dataclass(frozen=True)
class ThreeLevelParams:
    gap01: float
    gap12: float
    drive01: DrivePulse
    drive12: DrivePulse
    gamma10: float = 0.0
    gamma21: float = 0.0
    eta1: float = 0.0
    eta2: float = 0.0
    a: float = 1.0
    c: float = 0.0
    phi: float = 0.0
    varphi: float = 0.0

    def __post_init__(self):
        if not (self.gap01 > 0 and self.gap12 > 0):
            raise ValueError("both gaps must be positive")

    @property
    def dim(self):
        return 3


@dataclass(frozen=True)
class BipartiteParams:
    omega_qb: float
    omega_c: float
    omega_d: float
    coupling: float
    drive_strength: float
    eta_charger: float = 0.0

    def __post_init__(self):
        if not (math.isclose(self.omega_qb, self.omega_c) and math.isclose(self.omega_d, self.omega_qb)):
            warnings.warn(
                "off-resonant charger/battery/drive frequencies; only the resonant case "
                "omega_d = omega_qb = omega_c is a supported configuration",
                stacklevel=3,
            )

    @property
    def dim(self):
        return 4


@dataclass(frozen=True)
class DissipatorSpec:
    jump_operator: np.ndarray
    rate: float

    def __post_init__(self):
        if self.rate < 0:
            raise NegativeRate(f"dissipation rate must be non-negative, got {self.rate}")


@dataclass(frozen=True)
class DrivenHamiltonian:
    """``H(t) = static + sum_j coeff_j(t) * operator_j``.

    Every operator is Hermitian and every coefficient real, so ``H(t)`` is
    Hermitian for all ``t``. Coefficients accept scalar or array times.
    """

    static: np.ndarray
    terms: Tuple[Tuple[np.ndarray, Callable], ...] = ()

    @property
    def dim(self):
        return self.static.shape[0]

    def __call__(self, t):
        h = np.array(self.static, dtype=complex)
        for op, coeff in self.terms:
            h = h + coeff(t) * op
        return h

    def stack(self, times):
        """``H`` at every time in ``times`` as an array ``(len(times), d, d)``."""
        times = np.asarray(times, dtype=float)
        h = np.broadcast_to(self.static, times.shape + self.static.shape).astype(complex)
        for op, coeff in self.terms:
            h = h + np.asarray(coeff(times))[..., None, None] * op
        return h


@dataclass(frozen=True)
class Scenario:
    """Everything the propagator needs for one open-system run."""

    model: str
    params: object
    frame: str
    hamiltonian: DrivenHamiltonian
    dissipators: Tuple[DissipatorSpec, ...]
    initial: np.ndarray
    duration: float
    bare_hamiltonian: np.ndarray
    metadata: dict = field(default_factory=dict)

    @property
    def dim(self):
        return self.hamiltonian.dim

    @property
    def rho0(self):
        return np.outer(self.initial, np.conj(self.initial))

    def closed(self):
        """Copy of this scenario with every dissipation rate set to zero."""
        zeroed = tuple(DissipatorSpec(d.jump_operator, 0.0) for d in self.dissipators)
        return Scenario(self.model, self.params, self.frame, self.hamiltonian, zeroed,
                        self.initial, self.duration, self.bare_hamiltonian, dict(self.metadata))


def envelope(t, p):
    """Gaussian envelope ``f(t)``, dimensionless before multiplication by ``g``."""
    t = np.asarray(t, dtype=float)
    return p.amplitude * np.exp(-((t - p.center) ** 2) / (2.0 * p.width ** 2))


def adaptive_simpson(f, a, b, tol=1e-10, max_depth=50):
    """Integrate a scalar function on ``[a, b]`` by adaptive Simpson quadrature."""

    def simpson(fa, fm, fb, lo, hi):
        return (hi - lo) / 6.0 * (fa + 4.0 * fm + fb)

    def recurse(lo, hi, fa, fm, fb, whole, eps, depth):
        mid = 0.5 * (lo + hi)
        lm, rm = 0.5 * (lo + mid), 0.5 * (mid + hi)
        flm, frm = f(lm), f(rm)
        left = simpson(fa, flm, fm, lo, mid)
        right = simpson(fm, frm, fb, mid, hi)
        if depth >= max_depth or abs(left + right - whole) <= 15.0 * eps:
            return left + right + (left + right - whole) / 15.0
        return (recurse(lo, mid, fa, flm, fm, left, eps / 2, depth + 1)
                + recurse(mid, hi, fm, frm, fb, right, eps / 2, depth + 1))

    if a == b:
        return 0.0
    fa, fb, fm = f(a), f(b), f(0.5 * (a + b))
    return recurse(a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, 0)


def _envelope_integral(t, p, tol=1e-10):
    """``int_0^t f`` for scalar or array ``t`` by adaptive Simpson."""
    t = np.asarray(t, dtype=float)
    flat = t.ravel()
    if np.any(flat < 0):
        raise ValueError("pulse area is defined for t >= 0")
    order = np.argsort(flat)
    f = lambda s: float(envelope(s, p))
    out = np.empty_like(flat)
    acc, prev = 0.0, 0.0
    for idx in order:
        acc += adaptive_simpson(f, prev, flat[idx], tol)
        prev = flat[idx]
        out[idx] = acc
    return out.reshape(t.shape)


def _erf_area(t, p, area_max):
    t = np.asarray(t, dtype=float)
    return 0.5 * area_max * (erf((t - p.center) / (math.sqrt(2.0) * p.width)) + 1.0)


def pulse_area_2ls(t, p, exact_quadrature=False):
    """Two-level pulse area ``theta(t) = (g/2) int_0^t f``.

    The default is the Erf closed form, which extends the integral to
    ``-inf``; ``exact_quadrature`` integrates from 0 numerically instead.
    """
    if exact_quadrature:
        return 0.5 * p.coupling * _envelope_integral(t, p)
    return _erf_area(t, p, p.pulse_area_max)


def pulse_area_3ls(t, p, exact_quadrature=False):
    """Ladder pulse area ``Theta(t) = (g/sqrt 2) int_0^t f``; see :func:`pulse_area_2ls`."""
    if exact_quadrature:
        return p.coupling / math.sqrt(2.0) * _envelope_integral(t, p)
    return _erf_area(t, p, p.pulse_area_max_3ls)


def _check_frame(frame):
    if frame not in FRAMES:
        raise ValueError(f"frame must be one of {FRAMES}, got {frame!r}")


def _pauli_pair(dim, i, j):
    """Hermitian ``X_ij = |i><j| + |j><i|`` and ``Y_ij = -i|i><j| + i|j><i|``."""
    x = ketbra(dim, i, j) + ketbra(dim, j, i)
    y = -1j * ketbra(dim, i, j) + 1j * ketbra(dim, j, i)
    return x, y


def _drive_terms(dim, i, j, pulse, frame):
    x, y = _pauli_pair(dim, i, j)
    g, omega = pulse.coupling, pulse.carrier_freq
    if frame == "lab":
        return ((x, lambda t: g * envelope(t, pulse) * np.cos(omega * t)),)
    # co-rotating half amplitude: (g f/2)(e^{i omega t}|i><j| + h.c.)
    return (
        (x, lambda t: 0.5 * g * envelope(t, pulse) * np.cos(omega * t)),
        (y, lambda t: -0.5 * g * envelope(t, pulse) * np.sin(omega * t)),
    )


def hamiltonian_2ls_terms(p, frame="rwa"):
    _check_frame(frame)
    static = np.diag([0.0, p.gap]).astype(complex)
    return DrivenHamiltonian(static, _drive_terms(2, 0, 1, p.drive, frame))


def hamiltonian_2ls(t, p, frame="rwa"):
    """Two-level Hamiltonian at time ``t``.

    ``lab``: ``diag(0, gap) + g f(t) cos(Omega t) sigma_x``.
    ``rwa``: ``diag(0, gap) + (g f(t)/2)(e^{i Omega t}|0><1| + h.c.)``.
    """
    return hamiltonian_2ls_terms(p, frame)(t)


def hamiltonian_3ls_terms(p, frame="rwa"):
    _check_frame(frame)
    static = np.diag([0.0, p.gap01, p.gap01 + p.gap12]).astype(complex)
    terms = _drive_terms(3, 0, 1, p.drive01, frame) + _drive_terms(3, 1, 2, p.drive12, frame)
    return DrivenHamiltonian(static, terms)


def hamiltonian_3ls(t, p, frame="rwa"):
    """Ladder Hamiltonian; each tone couples one pair of consecutive levels only."""
    return hamiltonian_3ls_terms(p, frame)(t)


def hamiltonian_bipartite_terms(p):
    proj1 = ketbra(2, 1, 1)
    ident = np.eye(2)
    static = p.omega_c * np.kron(proj1, ident) + p.omega_qb * np.kron(ident, proj1)
    # g |1_C 0_B><0_C 1_B| + h.c.; charger-major index = 2 c + b
    static = static + p.coupling * (ketbra(4, 2, 1) + ketbra(4, 1, 2))
    x, y = _pauli_pair(2, 0, 1)
    f, w = p.drive_strength, p.omega_d
    terms = (
        (np.kron(x, ident), lambda t: f * np.cos(w * np.asarray(t, dtype=float))),
        (np.kron(y, ident), lambda t: -f * np.sin(w * np.asarray(t, dtype=float))),
    )
    return DrivenHamiltonian(static.astype(complex), terms)


def hamiltonian_bipartite(t, p):
    """Charger--battery Hamiltonian in the basis ``|0_C 0>, |0_C 1>, |1_C 0>, |1_C 1>``."""
    return hamiltonian_bipartite_terms(p)(t)


def bare_hamiltonian(model, p):
    """The undriven battery Hamiltonian used for stored energy.

    For the bipartite model this is the battery qubit alone, ``omega_qb |1><1|``.
    """
    if model == "two_level":
        return np.diag([0.0, p.gap]).astype(complex)
    if model == "three_level":
        return np.diag([0.0, p.gap01, p.gap01 + p.gap12]).astype(complex)
    if model == "bipartite":
        return p.omega_qb * ketbra(2, 1, 1)
    raise ValueError(f"unknown model {model!r}")


def _check_model(model, p):
    expected = {"two_level": TwoLevelParams, "three_level": ThreeLevelParams,
                "bipartite": BipartiteParams}
    if model not in expected:
        raise ValueError(f"unknown model {model!r}")
    if not isinstance(p, expected[model]):
        raise TypeError(f"{model} expects {expected[model].__name__}, got {type(p).__name__}")


def dissipators_for(model, p):
    """Jump operators with their rates, in a fixed order per model.

    two_level: relaxation ``|0><1|`` (gamma), dephasing ``|1><1|`` (eta).
    three_level: ``|0><1|`` (gamma10), ``|1><2|`` (gamma21), ``|1><1|`` (eta1), ``|2><2|`` (eta2).
    bipartite: charger dephasing ``|1_C><1_C| (x) I`` (eta_charger).
    """
    _check_model(model, p)
    if model == "two_level":
        return [DissipatorSpec(ketbra(2, 0, 1), p.gamma), DissipatorSpec(ketbra(2, 1, 1), p.eta)]
    if model == "three_level":
        return [
            DissipatorSpec(ketbra(3, 0, 1), p.gamma10),
            DissipatorSpec(ketbra(3, 1, 2), p.gamma21),
            DissipatorSpec(ketbra(3, 1, 1), p.eta1),
            DissipatorSpec(ketbra(3, 2, 2), p.eta2),
        ]
    return [DissipatorSpec(np.kron(ketbra(2, 1, 1), np.eye(2)), p.eta_charger)]


def initial_state(model, p):
    """Pure initial state vector of the model."""
    _check_model(model, p)
    if model == "bipartite":
        psi = np.zeros(4, dtype=complex)
        psi[0] = 1.0
        return psi
    if model == "two_level":
        if not -_AMPLITUDE_TOL <= p.a <= 1 + _AMPLITUDE_TOL:
            raise InvalidAmplitudes(f"a must lie in [0, 1], got {p.a}")
        a = min(max(p.a, 0.0), 1.0)
        return np.array([math.sqrt(a), math.sqrt(1 - a) * np.exp(1j * p.phi)])
    a, c = p.a, p.c
    if a < -_AMPLITUDE_TOL or c < -_AMPLITUDE_TOL or a + c > 1 + _AMPLITUDE_TOL:
        raise InvalidAmplitudes(f"need a, c >= 0 and a + c <= 1, got a={a}, c={c}")
    a, c = max(a, 0.0), max(c, 0.0)
    b = max(1.0 - a - c, 0.0)
    return np.array([math.sqrt(a), math.sqrt(b) * np.exp(1j * p.phi), math.sqrt(c) * np.exp(1j * p.varphi)])


def scenario(model, p, frame="rwa", duration=None):
    """Bundle Hamiltonian, dissipators and initial state of one model.

    ``duration`` defaults to the charging window ``2 * center`` of the drive
    for the driven single-battery models and is required for ``bipartite``.
    """
    _check_model(model, p)
    _check_frame(frame)
    if model == "two_level":
        ham = hamiltonian_2ls_terms(p, frame)
        default = p.drive.duration
    elif model == "three_level":
        ham = hamiltonian_3ls_terms(p, frame)
        default = p.drive01.duration
    else:
        ham = hamiltonian_bipartite_terms(p)
        default = None
    if duration is None:
        if default is None:
            raise ValueError("bipartite scenarios need an explicit duration")
        duration = default
    if not duration > 0:
        raise ValueError(f"duration must be positive, got {duration}")
    dissipators = tuple(dissipators_for(model, p))
    for d in dissipators:
        if d.jump_operator.shape != (ham.dim, ham.dim):
            raise DimensionMismatch("jump operator does not match the model dimension")
    return Scenario(model, p, frame, ham, dissipators, initial_state(model, p), float(duration),
                    bare_hamiltonian(model, p))
