"""Coherence and entanglement quantifiers.

Both coherence measures are basis dependent; ``basis`` accepts a
:class:`~gravcoherence.qstate.Basis` or one of the names ``"lr"``/``"pm"``.
"""
from __future__ import annotations

import numpy as np

from . import qmat
from .errors import InvalidStateError
from .qstate import STATE_TOL, DensityOperator, change_basis, dephase

# Threshold below which a coherence value counts as zero.
INCOHERENT_TOL = 1e-10


def _as_density(rho):
    return rho if isinstance(rho, DensityOperator) else DensityOperator(rho)


def c_rel_ent(rho, basis) -> float:
    """Relative entropy of coherence ``S(rho_diag) - S(rho)`` in bits."""
    rho = _as_density(rho)
    value = dephase(rho, basis).entropy() - rho.entropy()
    # rounding can push a zero result a few ulp negative
    return value if value > 0.0 else 0.0


def c_l1(rho, basis) -> float:
    """Sum of the moduli of the off-diagonal elements in ``basis``."""
    M = change_basis(rho, basis)
    A = np.abs(M)
    return float(A.sum() - np.trace(A))


def coherences(rho, basis) -> dict:
    return {"c_l1": c_l1(rho, basis), "c_rel_ent": c_rel_ent(rho, basis)}


def is_incoherent(rho, basis, tol=INCOHERENT_TOL) -> bool:
    M = change_basis(rho, basis)
    off = M - np.diag(np.diag(M))
    return bool(np.max(np.abs(off)) < tol)


def entanglement_entropy(psi, dims) -> float:
    """Entropy of entanglement (bits) of a pure bipartite ket.

    The reduced state of the first factor is formed directly from the
    ``dims[0] x dims[1]`` coefficient matrix.
    """
    v = qmat.as_ket(psi)
    if len(dims) != 2:
        raise ValueError(f"entanglement_entropy needs exactly two subsystems, got dims {tuple(dims)}")
    da, db = int(dims[0]), int(dims[1])
    if da * db != v.size:
        raise ValueError(f"dims {tuple(dims)} do not match ket of length {v.size}")
    norm = float(np.linalg.norm(v))
    if abs(norm - 1.0) > STATE_TOL:
        raise InvalidStateError(f"ket has norm {norm:.15g}, expected 1")
    C = (v / norm).reshape(da, db)
    rho_a = C @ C.conj().T
    return qmat.entropy_from_spectrum(qmat.eigvalsh(rho_a))
