"""Closed-form unitary (RWA) states and geometric phases of the driven batteries.

The states solve the Schroedinger equation of the co-rotating Hamiltonians in
:mod:`qbphase.models` exactly. With coupling ``+g`` on ``|0><1|e^{i Omega t}`` the
two-level amplitudes rotate as ``c' = -i theta' sigma_x c``; the three-level
ladder rotates with frequency ``Theta'`` in the ``{|0>, |1>, |2>}`` chain.

Both geometric phases follow from ``Phi = arg<psi_0|psi> - Im int <psi|psi'>``
and the conserved drive expectation ``<c|M|c>`` of the coupling matrix ``M``:

* two-level:  ``Phi = arg{...} + 2 sqrt(a(1-a)) cos(phi) theta + gap (1-a) t + int E``
* three-level: ``Phi = arg{...} + sqrt(1-a-c) Theta [sqrt(2a) cos phi + sqrt(2c) cos(phi - varphi)]
  + (1-a-c) gap01 t + c (gap01 + gap12) t + int E``
"""

import math

import numpy as np

from .models import pulse_area_2ls, pulse_area_3ls
from .phase import continued_turns


def _amplitudes_2ls(p):
    a = min(max(p.a, 0.0), 1.0)
    return math.sqrt(a), math.sqrt(1.0 - a) * np.exp(1j * p.phi)


def _amplitudes_3ls(p):
    a, c = max(p.a, 0.0), max(p.c, 0.0)
    b = max(1.0 - a - c, 0.0)
    return math.sqrt(a), math.sqrt(b) * np.exp(1j * p.phi), math.sqrt(c) * np.exp(1j * p.varphi)


def analytic_state_2ls(t, p, exact_quadrature=False):
    """Two-level state ``(c_0, c_1 e^{-i gap t})`` at time(s) ``t``; shape ``(..., 2)``."""
    t = np.asarray(t, dtype=float)
    th = pulse_area_2ls(t, p.drive, exact_quadrature)
    s0, s1 = _amplitudes_2ls(p)
    c0 = s0 * np.cos(th) - 1j * s1 * np.sin(th)
    c1 = -1j * s0 * np.sin(th) + s1 * np.cos(th)
    return np.stack([c0, c1 * np.exp(-1j * p.gap * t)], axis=-1)


def _coefficients_3ls(th, p):
    s0, s1, s2 = _amplitudes_3ls(p)
    cos, sin = np.cos(th), np.sin(th)
    r2 = math.sqrt(2.0)
    c0 = 0.5 * (s0 * (cos + 1) - 1j * r2 * s1 * sin) + 0.5 * s2 * (cos - 1)
    c1 = (-1j * s0 * sin + r2 * s1 * cos) / r2 - 1j * s2 * sin / r2
    c2 = 0.5 * (s0 * (cos - 1) - 1j * r2 * s1 * sin) + 0.5 * s2 * (cos + 1)
    return c0, c1, c2


def analytic_state_3ls(t, p, exact_quadrature=False):
    """Ladder state ``(C_0, C_1 e^{-i gap01 t}, C_2 e^{-i (gap01 + gap12) t})``; shape ``(..., 3)``."""
    t = np.asarray(t, dtype=float)
    th = pulse_area_3ls(t, p.drive01, exact_quadrature)
    c0, c1, c2 = _coefficients_3ls(th, p)
    return np.stack([c0, c1 * np.exp(-1j * p.gap01 * t),
                     c2 * np.exp(-1j * (p.gap01 + p.gap12) * t)], axis=-1)


def analytic_energy_2ls(t, p, exact_quadrature=False):
    """Stored energy ``gap (|<1|psi(t)>|^2 - |<1|psi(0)>|^2)``."""
    psi = analytic_state_2ls(t, p, exact_quadrature)
    return p.gap * (np.abs(psi[..., 1]) ** 2 - (1.0 - min(max(p.a, 0.0), 1.0)))


def analytic_energy_3ls(t, p, exact_quadrature=False):
    psi = analytic_state_3ls(t, p, exact_quadrature)
    s0, s1, s2 = _amplitudes_3ls(p)
    levels = np.array([0.0, p.gap01, p.gap01 + p.gap12])
    e0 = levels[1] * abs(s1) ** 2 + levels[2] * abs(s2) ** 2
    return np.abs(psi) ** 2 @ levels - e0


def _sorted_request(t):
    t = np.asarray(t, dtype=float)
    flat = np.atleast_1d(t).ravel()
    if np.any(flat < 0):
        raise ValueError("times must be non-negative")
    grid, inverse = np.unique(flat, return_inverse=True)
    return t, grid, inverse


def energy_integral(energy, t, exact_quadrature=False, panel=None, order=8):
    """Cumulative ``int_0^t E`` by composite Gauss--Legendre quadrature.

    ``energy(s, exact_quadrature)`` must accept an array of times. Panels end
    on every requested time and are at most ``panel`` long (default: a
    twentieth of the largest requested time), so a smooth ``E`` is
    integrated to rounding level.
    """
    t, grid, inverse = _sorted_request(t)
    top = grid[-1]
    if top == 0:
        return np.zeros(t.shape)
    panel = top / 20.0 if panel is None else panel
    breaks = np.union1d(np.concatenate(([0.0], grid)), np.arange(0.0, top, panel))
    x, w = np.polynomial.legendre.leggauss(order)
    half = 0.5 * np.diff(breaks)
    mid = 0.5 * (breaks[1:] + breaks[:-1])
    nodes = mid[:, None] + half[:, None] * x[None, :]
    vals = np.asarray(energy(nodes.ravel(), exact_quadrature), dtype=float).reshape(nodes.shape)
    cum = np.concatenate(([0.0], np.cumsum((vals @ w) * half)))
    out = cum[np.searchsorted(breaks, grid)]
    return out[inverse].reshape(t.shape)


def _continuous_arg(overlap, t, max_rate, step=0.5):
    """Argument of ``overlap(s)`` continued from ``s = 0`` to every requested time.

    A base grid with ``max_rate * ds <= step`` is refined adaptively wherever
    the overlap passes close to zero.
    """
    t, grid, inverse = _sorted_request(t)
    base = np.union1d(np.concatenate(([0.0], grid)), np.arange(0.0, grid[-1], step / max_rate))
    vals = overlap(base)
    turns = continued_turns(lambda s, _: overlap(s), base[:-1], base[1:], vals[:-1], vals[1:])
    ang = np.angle(vals[0]) + np.concatenate(([0.0], np.cumsum(turns)))
    return ang[np.searchsorted(base, grid)][inverse].reshape(t.shape)


def analytic_gp_2ls(t, p, exact_quadrature=False):
    """Unitary two-level geometric phase at time(s) ``t``.

    The Pancharatnam argument is continued from ``t = 0`` on an internal grid
    that resolves the free precession, so scalar and array calls agree.
    """
    t = np.asarray(t, dtype=float)
    a = min(max(p.a, 0.0), 1.0)
    mix = math.sqrt(a * (1.0 - a))

    def overlap(s):
        th = pulse_area_2ls(s, p.drive, exact_quadrature)
        ds = p.gap * s
        return ((a + (1 - a) * np.exp(-1j * ds)) * np.cos(th)
                - 1j * (np.exp(1j * p.phi) + np.exp(-1j * (ds + p.phi))) * mix * np.sin(th))

    th = pulse_area_2ls(t, p.drive, exact_quadrature)
    integral = energy_integral(lambda s, e: analytic_energy_2ls(s, p, e), t, exact_quadrature,
                               panel=p.drive.width / 4)
    rate = p.gap + p.drive.amplitude_eff
    return (_continuous_arg(overlap, t, rate) + 2.0 * mix * math.cos(p.phi) * th
            + p.gap * (1.0 - a) * t + integral)


def analytic_gp_3ls(t, p, exact_quadrature=False):
    """Unitary three-level geometric phase at time(s) ``t``; see :func:`analytic_gp_2ls`."""
    t = np.asarray(t, dtype=float)
    a, c = max(p.a, 0.0), max(p.c, 0.0)
    b = max(1.0 - a - c, 0.0)
    top = p.gap01 + p.gap12

    def overlap(s):
        c0, c1, c2 = _coefficients_3ls(pulse_area_3ls(s, p.drive01, exact_quadrature), p)
        return (math.sqrt(a) * c0
                + math.sqrt(b) * np.exp(-1j * (p.gap01 * s + p.phi)) * c1
                + math.sqrt(c) * np.exp(-1j * (top * s + p.varphi)) * c2)

    th = pulse_area_3ls(t, p.drive01, exact_quadrature)
    drive = math.sqrt(b) * th * (math.sqrt(2 * a) * math.cos(p.phi)
                                 + math.sqrt(2 * c) * math.cos(p.phi - p.varphi))
    integral = energy_integral(lambda s, e: analytic_energy_3ls(s, p, e), t, exact_quadrature,
                               panel=p.drive01.width / 4)
    rate = top + p.drive01.amplitude_eff
    return _continuous_arg(overlap, t, rate) + drive + b * p.gap01 * t + c * top * t + integral
