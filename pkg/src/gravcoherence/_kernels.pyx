# cython: language_level=3
"""Compiled hot loops: complex Hermitian Jacobi and ensemble branch overlaps."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs, cos, sin

cnp.import_array()


cdef inline double abs2(double complex z) nogil:
    return z.real * z.real + z.imag * z.imag


def jacobi_eigh(H, double tol=1e-14, int max_sweeps=100):
    """Cyclic Jacobi diagonalisation of a Hermitian matrix.

    Returns ``(eigenvalues, eigenvectors, sweeps)`` with eigenvalues unsorted
    and eigenvectors as columns.
    """
    cdef double complex[:, ::1] A = np.array(H, dtype=np.complex128, order="C", copy=True)
    cdef Py_ssize_t n = A.shape[0]
    V_arr = np.eye(n, dtype=np.complex128)
    cdef double complex[:, ::1] V = V_arr
    cdef Py_ssize_t p, q, k
    cdef int sweep = 0
    cdef double norm2 = 0.0, off2, r, theta, t, c, s, app, aqq
    cdef double complex e, ec, akp, akq, apk, aqk

    for p in range(n):
        A[p, p] = A[p, p].real
        for q in range(n):
            norm2 += abs2(A[p, q])
    cdef double target = tol * tol * norm2

    while sweep < max_sweeps:
        off2 = 0.0
        for p in range(n):
            for q in range(n):
                if p != q:
                    off2 += abs2(A[p, q])
        if off2 <= target or off2 == 0.0:
            break
        sweep += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                r = sqrt(abs2(A[p, q]))
                if r == 0.0:
                    continue
                e = A[p, q] / r
                app = A[p, p].real
                aqq = A[q, q].real
                theta = (aqq - app) / (2.0 * r)
                if fabs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = 1.0 / (fabs(theta) + sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / sqrt(t * t + 1.0)
                ec = e.conjugate()
                s = t * c
                for k in range(n):
                    akp = A[k, p]
                    akq = A[k, q]
                    A[k, p] = c * akp - s * ec * akq
                    A[k, q] = s * e * akp + c * akq
                for k in range(n):
                    apk = A[p, k]
                    aqk = A[q, k]
                    A[p, k] = c * apk - s * e * aqk
                    A[q, k] = s * ec * apk + c * aqk
                for k in range(n):
                    akp = V[k, p]
                    akq = V[k, q]
                    V[k, p] = c * akp - s * ec * akq
                    V[k, q] = s * e * akp + c * akq
                A[p, q] = 0.0
                A[q, p] = 0.0
                A[p, p] = app - t * r
                A[q, q] = aqq + t * r

    w = np.empty(n, dtype=np.float64)
    for p in range(n):
        w[p] = A[p, p].real
    return w, V_arr, sweep


def branch_amplitudes(x, psi, mode_l, mode_r, ks, double hbar, double dx,
                      int reseed=128):
    """Overlaps of two fixed modes with ``exp(-i k x / hbar) psi`` for each k.

    Returns a ``(len(ks), 2)`` complex array. The plane-wave factor is
    advanced by complex multiplication and re-seeded from sin/cos every
    ``reseed`` grid points.
    """
    cdef const double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef double complex[::1] wl = np.ascontiguousarray(np.conj(mode_l) * psi, dtype=np.complex128)
    cdef double complex[::1] wr = np.ascontiguousarray(np.conj(mode_r) * psi, dtype=np.complex128)
    cdef const double[::1] kv = np.ascontiguousarray(ks, dtype=np.float64)
    cdef Py_ssize_t n = xv.shape[0], m = kv.shape[0], i, j
    out_arr = np.empty((m, 2), dtype=np.complex128)
    cdef double complex[:, ::1] out = out_arr
    cdef double complex z, step, al, ar
    cdef double kk, ph

    for j in range(m):
        kk = kv[j] / hbar
        ph = kk * dx
        step = cos(ph) - 1j * sin(ph)
        al = 0.0
        ar = 0.0
        for i in range(n):
            if i % reseed == 0:
                ph = kk * xv[i]
                z = cos(ph) - 1j * sin(ph)
            al = al + wl[i] * z
            ar = ar + wr[i] * z
            z = z * step
        out[j, 0] = al * dx
        out[j, 1] = ar * dx
    return out_arr
