"""Validated density operators, reference bases, dephasing and depolarising."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import qmat
from .errors import DimensionError, InvalidStateError

# Shared validation tolerance for state positivity and ket normalisation.
# Read at call time, so it can be overridden by assigning the module attribute.
STATE_TOL = 1e-10
# Hermiticity and unit-trace checks on density operators.
MATRIX_TOL = 1e-12

SQRT_HALF = np.sqrt(0.5)
KET_L = np.array([1.0, 0.0], dtype=np.complex128)
KET_R = np.array([0.0, 1.0], dtype=np.complex128)
KET_PLUS = np.array([SQRT_HALF, SQRT_HALF], dtype=np.complex128)
KET_MINUS = np.array([SQRT_HALF, -SQRT_HALF], dtype=np.complex128)


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Hermitian, unit-trace, positive semidefinite matrix.

    ``dims`` lists the subsystem dimensions (product must equal the matrix
    dimension); it defaults to a single subsystem.
    """

    matrix: np.ndarray
    dims: tuple = field(default=None)

    def __post_init__(self):
        M = qmat.as_matrix(self.matrix, "density matrix")
        n = M.shape[0]
        dims = (n,) if self.dims is None else tuple(int(d) for d in self.dims)
        if int(np.prod(dims)) != n:
            raise DimensionError(f"subsystem dims {dims} do not multiply to {n}")
        herm = qmat.hermiticity_error(M)
        if herm > MATRIX_TOL:
            raise InvalidStateError(f"density matrix not Hermitian (deviation {herm:.3e})")
        tr = np.trace(M)
        if abs(tr - 1.0) > MATRIX_TOL:
            raise InvalidStateError(f"density matrix trace is {tr:.15g}, expected 1")
        lam = qmat.eigvalsh(M)
        if lam[-1] < -STATE_TOL:
            raise InvalidStateError(f"density matrix has negative eigenvalue {lam[-1]:.3e}")
        M = M.copy()
        M.setflags(write=False)
        object.__setattr__(self, "matrix", M)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "_eigenvalues", lam)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def eigenvalues(self) -> np.ndarray:
        return self._eigenvalues

    def entropy(self) -> float:
        return qmat.entropy_from_spectrum(self._eigenvalues)

    def is_pure(self, tol=STATE_TOL) -> bool:
        return abs(self._eigenvalues[0] - 1.0) < tol

    def ptrace(self, keep) -> "DensityOperator":
        """Reduced state on the subsystems in ``keep``."""
        reduced = qmat.partial_trace(self.matrix, self.dims, keep)
        keep = (keep,) if isinstance(keep, (int, np.integer)) else sorted(set(keep))
        return DensityOperator(reduced, tuple(self.dims[i] for i in keep))

    def tensor(self, other: "DensityOperator") -> "DensityOperator":
        return DensityOperator(qmat.kron(self.matrix, other.matrix), self.dims + other.dims)

    def allclose(self, other, atol=1e-12) -> bool:
        other = other.matrix if isinstance(other, DensityOperator) else np.asarray(other)
        return other.shape == self.matrix.shape and bool(np.max(np.abs(self.matrix - other)) <= atol)

    def __repr__(self):
        return f"DensityOperator(dims={self.dims}, matrix=\n{np.array2string(self.matrix, precision=6)})"


@dataclass(frozen=True, eq=False)
class Basis:
    """Ordered orthonormal basis; ``kets[i]`` is the i-th basis vector."""

    kets: np.ndarray
    name: str = ""

    def __post_init__(self):
        K = np.asarray(self.kets, dtype=np.complex128)
        if K.ndim != 2 or K.shape[0] != K.shape[1]:
            raise DimensionError(f"a basis needs dim kets of length dim, got array of shape {K.shape}")
        gram = K.conj() @ K.T
        err = float(np.max(np.abs(gram - np.eye(K.shape[0]))))
        if err > MATRIX_TOL:
            raise InvalidStateError(f"basis '{self.name}' is not orthonormal (Gram deviation {err:.3e})")
        K = K.copy()
        K.setflags(write=False)
        object.__setattr__(self, "kets", K)

    @property
    def dim(self) -> int:
        return self.kets.shape[0]

    @property
    def matrix(self) -> np.ndarray:
        """Unitary whose columns are the basis kets."""
        return self.kets.T

    @classmethod
    def computational(cls, dim: int, name=None) -> "Basis":
        return cls(np.eye(dim, dtype=np.complex128), name or f"computational{dim}")

    @classmethod
    def lr(cls) -> "Basis":
        return cls(np.array([KET_L, KET_R]), "lr")

    @classmethod
    def pm(cls) -> "Basis":
        return cls(np.array([KET_PLUS, KET_MINUS]), "pm")

    def permuted(self, order: Sequence[int]) -> "Basis":
        return Basis(self.kets[list(order)], self.name)

    def transformed(self, U) -> "Basis":
        """Basis with every ket mapped by the unitary ``U``."""
        U = qmat.as_matrix(U, "U")
        return Basis((U @ self.kets.T).T, self.name)


BASES = {"lr": Basis.lr, "pm": Basis.pm}


def get_basis(name_or_basis) -> Basis:
    if isinstance(name_or_basis, Basis):
        return name_or_basis
    try:
        return BASES[name_or_basis]()
    except KeyError:
        raise ValueError(f"unknown basis {name_or_basis!r}; choose from {sorted(BASES)}") from None


def _as_density(rho) -> DensityOperator:
    return rho if isinstance(rho, DensityOperator) else DensityOperator(rho)


def density_from_ket(psi, dims=None) -> DensityOperator:
    """Projector onto ``psi``.

    Kets whose norm is within ``STATE_TOL`` of one are renormalised; any other
    norm is rejected.
    """
    v = qmat.as_ket(psi)
    norm = float(np.linalg.norm(v))
    if norm == 0.0:
        raise InvalidStateError("cannot build a state from the zero vector")
    if abs(norm - 1.0) > STATE_TOL:
        raise InvalidStateError(f"ket has norm {norm:.15g}, expected 1")
    v = v / norm
    return DensityOperator(np.outer(v, v.conj()), dims)


def maximally_mixed(dim: int, dims=None) -> DensityOperator:
    return DensityOperator(np.eye(dim, dtype=np.complex128) / dim, dims)


def change_basis(rho, basis) -> np.ndarray:
    """Matrix elements ``<b_i| rho |b_j>``."""
    basis = get_basis(basis)
    M = qmat.as_matrix(rho, "rho")
    if M.shape[0] != basis.dim:
        raise DimensionError(f"state of dimension {M.shape[0]} does not match basis of dimension {basis.dim}")
    B = basis.matrix
    return B.conj().T @ M @ B


def from_basis(matrix, basis) -> np.ndarray:
    """Inverse of :func:`change_basis`: back to the computational frame."""
    basis = get_basis(basis)
    M = qmat.as_matrix(matrix, "matrix")
    if M.shape[0] != basis.dim:
        raise DimensionError(f"matrix of dimension {M.shape[0]} does not match basis of dimension {basis.dim}")
    B = basis.matrix
    return B @ M @ B.conj().T


def dephase(rho, basis) -> DensityOperator:
    """Remove all off-diagonal elements of ``rho`` written in ``basis``."""
    rho = _as_density(rho)
    diag = np.diag(np.diag(change_basis(rho, basis)).real)
    return DensityOperator(from_basis(diag, basis), rho.dims)


def depolarize(rho, p: float) -> DensityOperator:
    """Depolarising mixture ``p * rho + (1 - p) * I / dim``."""
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"depolarizing parameter p must lie in [0, 1], got {p}")
    rho = _as_density(rho)
    n = rho.dim
    return DensityOperator(p * rho.matrix + (1.0 - p) * np.eye(n) / n, rho.dims)
