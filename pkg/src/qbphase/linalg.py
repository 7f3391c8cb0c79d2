"""Small dense complex linear algebra.

Everything here works on plain ``numpy`` arrays. Functions that make sense on
stacks accept ``(..., n, n)`` input so that whole trajectories can be handled in
one call.
"""

from typing import NamedTuple

import numpy as np

from .errors import DimensionMismatch, DimensionTooLarge, NonHermitianInput

MAX_DIM = 4


class EigenSystem(NamedTuple):
    """Eigenpairs of a Hermitian matrix, eigenvalues in descending order.

    ``vectors[..., :, k]`` is the eigenvector belonging to ``values[..., k]``.
    """

    values: np.ndarray
    vectors: np.ndarray


def dagger(m):
    return np.conj(np.swapaxes(m, -1, -2))


def hermiticity_error(m):
    """Largest entry of ``|M - M^dagger|`` (over the whole stack)."""
    m = np.asarray(m)
    return float(np.max(np.abs(m - dagger(m)), initial=0.0))


def ketbra(dim, i, j):
    """The matrix unit ``|i><j|`` in a ``dim``-level space."""
    out = np.zeros((dim, dim), dtype=complex)
    out[i, j] = 1.0
    return out


def eig_hermitian(m, tol=1e-10):
    """Eigen-decomposition of a Hermitian matrix or a stack of them.

    Parameters
    ----------
    m : array_like, shape (..., n, n)
    tol : float
        Maximum allowed ``max |M - M^dagger|``.

    Returns
    -------
    EigenSystem
        Real eigenvalues sorted in descending order and the matching
        orthonormal eigenvectors as columns.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim < 2 or m.shape[-1] != m.shape[-2]:
        raise DimensionMismatch(f"expected square matrices, got shape {m.shape}")
    err = hermiticity_error(m)
    if err > tol:
        raise NonHermitianInput(f"matrix is not Hermitian (max |M - M^dagger| = {err:.3e})")
    values, vectors = np.linalg.eigh(m)
    return EigenSystem(values[..., ::-1].copy(), vectors[..., ::-1].copy())


# Pade-13 coefficients and the matching scaling threshold (Higham 2005).
_PADE13 = np.array([
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
    1187353796428800.0, 129060195264000.0, 10559470521600.0,
    670442572800.0, 33522128640.0, 1323241920.0, 40840800.0,
    960960.0, 16380.0, 182.0, 1.0,
])
_THETA13 = 5.371920351148152


def expm(m):
    """Matrix exponential by scaling and squaring with a [13/13] Pade approximant.

    Accepts a single square matrix or a stack ``(..., n, n)``; each matrix in a
    stack gets its own scaling exponent.
    """
    a = np.asarray(m, dtype=complex)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise DimensionMismatch(f"expected square matrices, got shape {a.shape}")
    n = a.shape[-1]
    batch = a.shape[:-2]
    a = a.reshape((-1, n, n))

    norms = np.abs(a).sum(axis=-2).max(axis=-1)
    with np.errstate(divide="ignore"):
        s = np.where(norms > _THETA13, np.ceil(np.log2(norms / _THETA13)), 0.0).astype(int)
    a = a / (2.0 ** s)[:, None, None]

    b = _PADE13
    ident = np.broadcast_to(np.eye(n, dtype=complex), a.shape)
    a2 = a @ a
    a4 = a2 @ a2
    a6 = a4 @ a2
    u = a @ (a6 @ (b[13] * a6 + b[11] * a4 + b[9] * a2)
             + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident)
    v = a6 @ (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident
    r = np.linalg.solve(v - u, v + u)
    r[norms == 0] = np.eye(n)  # exact, where the solve would leave rounding

    for step in range(int(s.max(initial=0))):
        active = s > step
        r[active] = r[active] @ r[active]
    return r.reshape(batch + (n, n))


def kron(a, b):
    """Kronecker product ``A (x) B`` with the ``A`` index major.

    Raises
    ------
    DimensionTooLarge
        If the product exceeds the supported dimension of 4.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    dim = a.shape[0] * b.shape[0]
    if dim > MAX_DIM:
        raise DimensionTooLarge(f"product dimension {dim} exceeds {MAX_DIM}")
    return np.kron(a, b)


def partial_trace_charger(rho, tol=1e-10):
    """Trace out the charger from a charger-major two-qubit state.

    The basis order is ``|c b>`` with ``c`` the charger index, so the result is
    ``sum_c <c|rho|c>`` acting on the battery qubit. Stacks ``(..., 4, 4)`` are
    reduced element-wise.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape[-2:] != (4, 4):
        raise DimensionMismatch(f"expected a 4x4 two-qubit state, got shape {rho.shape}")
    err = hermiticity_error(rho)
    if err > tol:
        raise NonHermitianInput(f"state is not Hermitian (max |rho - rho^dagger| = {err:.3e})")
    blocks = rho.reshape(rho.shape[:-2] + (2, 2, 2, 2))
    return np.einsum("...cicj->...ij", blocks)
