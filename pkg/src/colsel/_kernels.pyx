# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops. ``colsel._pykernels`` mirrors every function here."""
import numpy as np

from libc.math cimport sqrt, fabs


def jacobi_eigh(const double[:, ::1] a_in, double tol, int max_sweeps):
    """Cyclic Jacobi on a symmetric matrix.

    Returns ``(diagonal, rotations, sweeps, converged)``; eigenvalues are the
    diagonal, unsorted, and column ``i`` of ``rotations`` pairs with entry ``i``.
    """
    cdef Py_ssize_t n = a_in.shape[0]
    cdef Py_ssize_t i, j, p, q, r
    cdef double fro = 0.0, off, thresh
    cdef double apq, app, aqq, theta, t, c, s, arp, arq, vrp, vrq
    cdef int sweep
    cdef bint converged = False

    a_arr = np.array(a_in, dtype=np.float64, order="C", copy=True)
    v_arr = np.eye(n, dtype=np.float64)
    cdef double[:, ::1] a = a_arr
    cdef double[:, ::1] v = v_arr

    for i in range(n):
        for j in range(n):
            fro += a[i, j] * a[i, j]
    fro = sqrt(fro)
    if fro == 0.0:
        return np.zeros(n), v_arr, 0, True
    thresh = tol * fro

    for sweep in range(max_sweeps + 1):
        off = 0.0
        for i in range(n):
            for j in range(i + 1, n):
                off += a[i, j] * a[i, j]
        off = sqrt(2.0 * off)
        if off <= thresh:
            converged = True
            break
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                app = a[p, p]
                aqq = a[q, q]
                theta = (aqq - app) / (2.0 * apq)
                if fabs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = 1.0 / (fabs(theta) + sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / sqrt(t * t + 1.0)
                s = t * c
                for r in range(n):
                    if r == p or r == q:
                        continue
                    arp = a[r, p]
                    arq = a[r, q]
                    a[r, p] = c * arp - s * arq
                    a[p, r] = a[r, p]
                    a[r, q] = s * arp + c * arq
                    a[q, r] = a[r, q]
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0
                for r in range(n):
                    vrp = v[r, p]
                    vrq = v[r, q]
                    v[r, p] = c * vrp - s * vrq
                    v[r, q] = s * vrp + c * vrq

    diag = np.empty(n, dtype=np.float64)
    for i in range(n):
        diag[i] = a[i, i]
    return diag, v_arr, sweep, converged


def secular_terms(const double[::1] lam, const double[::1] w, double x):
    """``(sum w/(x - lam), sum w/(x - lam)**2)``."""
    cdef Py_ssize_t i, n = lam.shape[0]
    cdef double d, s1 = 0.0, s2 = 0.0
    for i in range(n):
        d = x - lam[i]
        s1 += w[i] / d
        s2 += w[i] / (d * d)
    return s1, s2
