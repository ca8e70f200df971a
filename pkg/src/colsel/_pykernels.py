"""Pure-Python fallbacks for the compiled kernels in ``_kernels.pyx``.

Same algorithms and same argument conventions; used when the extension is
not built or when ``COLSEL_PURE_PYTHON=1`` is set.
"""
import math

import numpy as np


def jacobi_eigh(a_in, tol, max_sweeps):
    a = np.array(a_in, dtype=np.float64, order="C", copy=True)
    n = a.shape[0]
    v = np.eye(n)
    fro = math.sqrt(float(np.sum(a * a)))
    if fro == 0.0:
        return np.zeros(n), v, 0, True
    thresh = tol * fro
    iu = np.triu_indices(n, 1)

    sweep = 0
    converged = False
    for sweep in range(max_sweeps + 1):
        off = math.sqrt(2.0 * float(np.sum(a[iu] ** 2)))
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
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                ap = a[:, p].copy()
                aq = a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                a[p, :] = a[:, p]
                a[q, :] = a[:, q]
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    return np.diag(a).copy(), v, sweep, converged


def secular_terms(lam, w, x):
    d = x - lam
    return float(np.sum(w / d)), float(np.sum(w / (d * d)))
