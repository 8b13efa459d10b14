"""Dense complex linear algebra for small systems (dimension <= 16).

Matrices are plain ``numpy`` complex arrays. Every public function validates
its inputs (square, finite, within the size limit) and raises
:class:`~gravcoherence.errors.DimensionError` on mismatches.

The Hermitian eigensolver is a cyclic Jacobi iteration, run by the compiled
kernel when available (see :mod:`gravcoherence._backend`).
"""
from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np

from ._backend import get_kernels
from .errors import DimensionError, InvalidStateError, NotHermitianError

MAX_DIM = 16
HERMITIAN_TOL = 1e-10
JACOBI_TOL = 1e-14
NEGATIVE_EIGENVALUE_TOL = 1e-10


class HermitianEigensystem(NamedTuple):
    """Eigenvalues sorted descending with matching orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_matrix(A, name="matrix") -> np.ndarray:
    """Coerce to a validated square complex128 array."""
    if hasattr(A, "matrix"):
        A = A.matrix
    M = np.asarray(A, dtype=np.complex128)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] == 0:
        raise DimensionError(f"{name} must be a non-empty square matrix, got shape {M.shape}")
    if M.shape[0] > MAX_DIM:
        raise DimensionError(f"{name} has dimension {M.shape[0]} > supported maximum {MAX_DIM}")
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} contains NaN or Inf entries")
    return M


def as_ket(psi, name="ket") -> np.ndarray:
    v = np.asarray(psi, dtype=np.complex128)
    if v.ndim == 2 and 1 in v.shape:
        v = v.reshape(-1)
    if v.ndim != 1 or v.size == 0:
        raise DimensionError(f"{name} must be a 1-D vector, got shape {v.shape}")
    if v.size > MAX_DIM:
        raise DimensionError(f"{name} has dimension {v.size} > supported maximum {MAX_DIM}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} contains NaN or Inf entries")
    return v


def _check_same_dim(A, B, op):
    if A.shape != B.shape:
        raise DimensionError(f"cannot {op} matrices of dimension {A.shape[0]} and {B.shape[0]}")


def multiply(A, B) -> np.ndarray:
    A, B = as_matrix(A, "A"), as_matrix(B, "B")
    _check_same_dim(A, B, "multiply")
    return A @ B


def add(A, B) -> np.ndarray:
    A, B = as_matrix(A, "A"), as_matrix(B, "B")
    _check_same_dim(A, B, "add")
    return A + B


def scale(A, z: complex) -> np.ndarray:
    return complex(z) * as_matrix(A)


def adjoint(A) -> np.ndarray:
    return as_matrix(A).conj().T


def trace(A) -> complex:
    return complex(np.trace(as_matrix(A)))


def hermiticity_error(A) -> float:
    """Max-abs entry of ``A - A^dagger``."""
    A = as_matrix(A)
    return float(np.max(np.abs(A - A.conj().T)))


def kron(A, B) -> np.ndarray:
    """Tensor product with entry ``[(i*dB + k), (j*dB + l)] = A[i, j] * B[k, l]``."""
    A, B = as_matrix(A, "A"), as_matrix(B, "B")
    da, db = A.shape[0], B.shape[0]
    if da * db > MAX_DIM:
        raise DimensionError(f"kron of dimension {da} and {db} exceeds maximum {MAX_DIM}")
    return (A[:, None, :, None] * B[None, :, None, :]).reshape(da * db, da * db)


def kron_ket(a, b) -> np.ndarray:
    a, b = as_ket(a, "a"), as_ket(b, "b")
    if a.size * b.size > MAX_DIM:
        raise DimensionError(f"kron of dimension {a.size} and {b.size} exceeds maximum {MAX_DIM}")
    return (a[:, None] * b[None, :]).reshape(-1)


def kron_all(*mats) -> np.ndarray:
    out = as_matrix(mats[0])
    for M in mats[1:]:
        out = kron(out, M)
    return out


def _check_dims(dims: Sequence[int], total: int) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if not dims or any(d < 1 for d in dims):
        raise DimensionError(f"subsystem dimensions must be positive integers, got {dims}")
    if int(np.prod(dims)) != total:
        raise DimensionError(f"subsystem dimensions {dims} multiply to {int(np.prod(dims))}, not {total}")
    return dims


def partial_trace(rho, dims: Sequence[int], keep) -> np.ndarray:
    """Trace out every subsystem not listed in ``keep``.

    ``keep`` may be an int or an iterable of subsystem indices; kept
    subsystems retain their original relative order. Passing an empty
    ``keep`` is an error; use :func:`trace` for the full trace.
    """
    rho = as_matrix(rho, "rho")
    dims = _check_dims(dims, rho.shape[0])
    keep = (keep,) if isinstance(keep, (int, np.integer)) else tuple(sorted(set(int(k) for k in keep)))
    if not keep:
        raise DimensionError("keep must name at least one subsystem")
    if keep[0] < 0 or keep[-1] >= len(dims):
        raise DimensionError(f"keep indices {keep} out of range for {len(dims)} subsystems")

    n = len(dims)
    T = rho.reshape(dims + dims)
    letters = "abcdefghijklmnopqrstuvwxyz"
    row = list(letters[:n])
    col = list(letters[n:2 * n])
    for i in range(n):
        if i not in keep:
            col[i] = row[i]
    out_sub = "".join(row[i] for i in keep) + "".join(col[i] for i in keep)
    reduced = np.einsum("".join(row) + "".join(col) + "->" + out_sub, T)
    dk = int(np.prod([dims[i] for i in keep]))
    return reduced.reshape(dk, dk)


def hermitian_eigensystem(H, backend=None) -> HermitianEigensystem:
    """Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Eigenvalues are returned in descending order. Raises
    :class:`NotHermitianError` if ``max|H - H^dagger| >= 1e-10``.
    """
    H = as_matrix(H, "H")
    dev = hermiticity_error(H)
    if dev >= HERMITIAN_TOL:
        raise NotHermitianError(f"matrix is not Hermitian: max|H - H^dagger| = {dev:.3e}")
    H = 0.5 * (H + H.conj().T)
    w, V, _ = get_kernels(backend).jacobi_eigh(H, JACOBI_TOL)
    order = np.argsort(-w, kind="stable")
    return HermitianEigensystem(w[order], V[:, order])


def eigvalsh(H, backend=None) -> np.ndarray:
    return hermitian_eigensystem(H, backend).eigenvalues


def matrix_function(H, f) -> np.ndarray:
    """Apply a scalar function to a Hermitian matrix through its eigenbasis."""
    w, V = hermitian_eigensystem(H)
    return (V * f(w)) @ V.conj().T


def inverse_hermitian(H) -> np.ndarray:
    w, V = hermitian_eigensystem(H)
    if np.any(w == 0.0):
        raise ValueError("matrix is singular")
    return (V / w) @ V.conj().T


def entropy_from_spectrum(eigenvalues) -> float:
    """``-sum(l * log2(l))`` with eigenvalues in [-1e-10, 0) clipped to zero."""
    lam = np.asarray(eigenvalues, dtype=np.float64)
    if np.any(lam < -NEGATIVE_EIGENVALUE_TOL):
        raise InvalidStateError(f"negative eigenvalue {lam.min():.3e}: not a density operator")
    lam = lam[lam > 0.0]
    s = float(-np.sum(lam * np.log2(lam)))
    return s if s > 0.0 else 0.0


def von_neumann_entropy(rho) -> float:
    """Von Neumann entropy in bits."""
    return entropy_from_spectrum(eigvalsh(rho))


def _unitary_factor(H, t, hbar):
    w, V = hermitian_eigensystem(H)
    # shift by the top eigenvalue so the relative phases are exact and a
    # multiple of the identity yields exactly the identity
    ref = w[0]
    phases = np.exp(-1j * (w - ref) * (t / hbar))
    U = (V * phases) @ V.conj().T
    return U, ref * t / hbar


def evolution_operator(H, t: float, hbar: float = 1.0) -> np.ndarray:
    """``exp(-i H t / hbar)`` including its global phase."""
    U, theta = _unitary_factor(H, t, hbar)
    return np.exp(-1j * theta) * U


def unitary_evolve(H, t: float, state, hbar: float = 1.0):
    """Evolve a ket, a density matrix or a ``DensityOperator`` for time ``t``.

    For kets the full ``exp(-iHt/hbar)`` is applied. For density matrices the
    global phase cancels and is dropped before multiplication, so ``H = E*I``
    leaves the input bit-for-bit unchanged.
    """
    H = as_matrix(H, "H")
    if t == 0:
        return state
    U, theta = _unitary_factor(H, t, hbar)
    if hasattr(state, "matrix"):
        if state.matrix.shape != H.shape:
            raise DimensionError(f"cannot evolve state of dimension {state.matrix.shape[0]} with H of dimension {H.shape[0]}")
        return type(state)(U @ state.matrix @ U.conj().T, state.dims)
    arr = np.asarray(state, dtype=np.complex128)
    if arr.ndim == 1:
        v = as_ket(arr)
        if v.size != H.shape[0]:
            raise DimensionError(f"cannot evolve ket of dimension {v.size} with H of dimension {H.shape[0]}")
        return np.exp(-1j * theta) * (U @ v)
    rho = as_matrix(arr, "rho")
    _check_same_dim(rho, H, "evolve")
    return U @ rho @ U.conj().T
