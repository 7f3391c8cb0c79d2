"""Independent reference computations used to cross-check the main pipeline.

None of these share code paths with :mod:`qbphase.propagator` or
:mod:`qbphase.phase` beyond the model builders and :func:`qbphase.linalg.expm`.
"""

import math

import numpy as np

from .linalg import expm


def taylor_expm(m, terms=60):
    """Plain truncated Taylor series of ``exp(M)``; accurate for modest ``||M||``."""
    m = np.asarray(m, dtype=complex)
    out = np.eye(m.shape[0], dtype=complex)
    term = np.eye(m.shape[0], dtype=complex)
    for k in range(1, terms + 1):
        term = term @ m / k
        out = out + term
    return out


def liouvillian_columns(h, dissipators):
    """Column-stacking Lindblad generator, ``vec(A X B) = (B^T kron A) vec(X)``.

    ``h`` may be a stack ``(..., d, d)``.
    """
    h = np.asarray(h, dtype=complex)
    d = h.shape[-1]
    ident = np.eye(d)
    hl = np.einsum("ab,...ij->...aibj", ident, h).reshape(h.shape[:-2] + (d * d, d * d))
    hr = np.einsum("...ba,ij->...aibj", h, ident).reshape(h.shape[:-2] + (d * d, d * d))
    gen = -1j * (hl - hr)
    for spec in dissipators:
        if spec.rate == 0:
            continue
        op = np.asarray(spec.jump_operator, dtype=complex)
        ld = np.conj(op.T) @ op
        sup = (np.kron(np.conj(op), op)
               - 0.5 * np.kron(ident, ld)
               - 0.5 * np.kron(ld.T, ident))
        gen = gen + spec.rate * sup
    return gen


def propagate_expm(scenario, grid_points=64, substeps=None, max_phase=0.05, chunk=20000):
    """Piecewise-constant generator propagation with fourth-order Magnus steps.

    Each output interval is split into ``substeps`` pieces; on each piece the
    generator is frozen to the two-point Gauss Magnus exponent
    ``h (A1 + A2)/2 + sqrt(3) h^2 [A2, A1] / 12`` and exponentiated.
    By default ``substeps`` is chosen so that ``h * max ||H(t)||_2 <= max_phase``.

    Returns
    -------
    times : ndarray, shape (grid_points + 1,)
    states : ndarray, shape (grid_points + 1, d, d)
    """
    ham = scenario.hamiltonian
    d = ham.dim
    times = np.linspace(0.0, scenario.duration, grid_points + 1)
    dt = times[1] - times[0]
    if substeps is None:
        probe = np.linspace(0.0, scenario.duration, 2001)
        scale = np.abs(np.linalg.eigvalsh(ham.stack(probe))).max()
        rates = sum(s.rate * np.linalg.norm(s.jump_operator, 2) ** 2 for s in scenario.dissipators)
        substeps = max(1, int(math.ceil(dt * (scale + rates) / max_phase)))
    h = dt / substeps
    starts = (np.arange(grid_points * substeps) * h)
    c1, c2 = 0.5 - math.sqrt(3) / 6, 0.5 + math.sqrt(3) / 6

    vec = scenario.rho0.T.reshape(-1)  # column stacking
    states = [scenario.rho0.copy()]
    total = len(starts)
    for lo in range(0, total, chunk):
        seg = starts[lo:lo + chunk]
        a1 = liouvillian_columns(ham.stack(seg + c1 * h), scenario.dissipators)
        a2 = liouvillian_columns(ham.stack(seg + c2 * h), scenario.dissipators)
        omega = 0.5 * h * (a1 + a2) + (math.sqrt(3) / 12.0) * h * h * (a2 @ a1 - a1 @ a2)
        props = expm(omega)
        for k, prop in enumerate(props):
            vec = prop @ vec
            if (lo + k + 1) % substeps == 0:
                states.append(vec.reshape(d, d).T.copy())
    return times, np.array(states)


def bloch_vector_to_state(n):
    """Spinor ``(cos(b/2), e^{i a} sin(b/2))`` pointing along the unit vector ``n``."""
    x, y, z = n
    beta = math.acos(max(-1.0, min(1.0, z)))
    alpha = math.atan2(y, x)
    return np.array([math.cos(beta / 2), np.exp(1j * alpha) * math.sin(beta / 2)])


def geodesic(n1, n2, samples):
    """Points on the shorter great-circle arc from ``n1`` to ``n2`` (both included)."""
    n1, n2 = np.asarray(n1, float), np.asarray(n2, float)
    omega = math.acos(max(-1.0, min(1.0, float(n1 @ n2))))
    s = np.linspace(0.0, 1.0, samples)
    if omega < 1e-12:
        return np.tile(n1, (samples, 1))
    return (np.sin((1 - s) * omega)[:, None] * n1 + np.sin(s * omega)[:, None] * n2) / math.sin(omega)


def signed_solid_angle(n1, n2, n3):
    """Solid angle of the geodesic triangle, positive for counter-clockwise order seen from outside."""
    n1, n2, n3 = (np.asarray(v, float) for v in (n1, n2, n3))
    num = float(n1 @ np.cross(n2, n3))
    den = 1.0 + float(n1 @ n2) + float(n2 @ n3) + float(n3 @ n1)
    return 2.0 * math.atan2(num, den)


def triangle_path(n1, n2, n3, samples_per_edge=200):
    """State vectors along the closed geodesic triangle ``n1 -> n2 -> n3 -> n1``."""
    pts = [geodesic(n1, n2, samples_per_edge)[:-1],
           geodesic(n2, n3, samples_per_edge)[:-1],
           geodesic(n3, n1, samples_per_edge)]
    pts = np.concatenate(pts)
    return np.array([bloch_vector_to_state(p) for p in pts])
