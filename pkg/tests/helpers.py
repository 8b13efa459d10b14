"""Independent test utilities: these use numpy.linalg, never the package solver."""
import numpy as np


def random_matrix(n, rng):
    return rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))


def random_hermitian(n, rng):
    X = random_matrix(n, rng)
    return 0.5 * (X + X.conj().T)


def random_unitary(n, rng):
    """exp(iH) for a random Hermitian generator, via numpy.linalg.eigh."""
    w, V = np.linalg.eigh(random_hermitian(n, rng))
    return (V * np.exp(1j * w)) @ V.conj().T


def random_density(n, rng, rank=None):
    X = rng.normal(size=(n, rank or n)) + 1j * rng.normal(size=(n, rank or n))
    rho = X @ X.conj().T
    return rho / np.trace(rho).real


def random_ket(n, rng):
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    return v / np.linalg.norm(v)


def kron_oracle(A, B):
    da, db = A.shape[0], B.shape[0]
    out = np.zeros((da * db, da * db), dtype=complex)
    for i in range(da):
        for j in range(da):
            for k in range(db):
                for l in range(db):
                    out[i * db + k, j * db + l] = A[i, j] * B[k, l]
    return out


def ptrace_keep_first_oracle(rho, da, db):
    out = np.zeros((da, da), dtype=complex)
    for i in range(da):
        for j in range(da):
            for k in range(db):
                out[i, j] += rho[i * db + k, j * db + k]
    return out


def ptrace_keep_second_oracle(rho, da, db):
    out = np.zeros((db, db), dtype=complex)
    for k in range(db):
        for l in range(db):
            for i in range(da):
                out[k, l] += rho[i * db + k, i * db + l]
    return out
