"""Pure numpy versions of the compiled kernels in ``_kernels.pyx``.

Same signatures and return values; used when the extension is unavailable
or when ``GRAVCOHERENCE_BACKEND=python`` is set.
"""
import numpy as np


def jacobi_eigh(H, tol=1e-14, max_sweeps=100):
    A = np.array(H, dtype=np.complex128, copy=True)
    n = A.shape[0]
    V = np.eye(n, dtype=np.complex128)
    A[np.diag_indices(n)] = A.diagonal().real
    target = tol * tol * float(np.sum(np.abs(A) ** 2))
    offmask = ~np.eye(n, dtype=bool)

    sweep = 0
    while sweep < max_sweeps:
        off2 = float(np.sum(np.abs(A[offmask]) ** 2))
        if off2 <= target or off2 == 0.0:
            break
        sweep += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                r = abs(A[p, q])
                if r == 0.0:
                    continue
                e = A[p, q] / r
                app = A[p, p].real
                aqq = A[q, q].real
                theta = (aqq - app) / (2.0 * r)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                ec = np.conj(e)

                colp = A[:, p].copy()
                colq = A[:, q].copy()
                A[:, p] = c * colp - s * ec * colq
                A[:, q] = s * e * colp + c * colq
                rowp = A[p, :].copy()
                rowq = A[q, :].copy()
                A[p, :] = c * rowp - s * e * rowq
                A[q, :] = s * ec * rowp + c * rowq
                colp = V[:, p].copy()
                colq = V[:, q].copy()
                V[:, p] = c * colp - s * ec * colq
                V[:, q] = s * e * colp + c * colq

                A[p, q] = 0.0
                A[q, p] = 0.0
                A[p, p] = app - t * r
                A[q, q] = aqq + t * r

    return A.diagonal().real.copy(), V, sweep


def branch_amplitudes(x, psi, mode_l, mode_r, ks, hbar, dx, reseed=128, chunk=256):
    x = np.asarray(x, dtype=np.float64)
    psi = np.asarray(psi, dtype=np.complex128)
    weights = np.stack([np.conj(mode_l) * psi, np.conj(mode_r) * psi], axis=1)
    ks = np.asarray(ks, dtype=np.float64)
    out = np.empty((ks.size, 2), dtype=np.complex128)
    for start in range(0, ks.size, chunk):
        kk = ks[start:start + chunk] / hbar
        phase = np.exp(-1j * np.outer(kk, x))
        # row-wise reduction; a BLAS product may round rows differently by position
        out[start:start + chunk, 0] = np.sum(phase * weights[:, 0], axis=1) * dx
        out[start:start + chunk, 1] = np.sum(phase * weights[:, 1], axis=1) * dx
    return out
