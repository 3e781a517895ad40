# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled projection kernel.

Same contract as hullcert._kernels_py.fw_project; the inner loop runs in C
with BLAS matrix-vector products, which matters both for many small
projections (low-d hull builds) and for wide feature matrices.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, sqrt
from scipy.linalg.cython_blas cimport daxpy, ddot, dgemv

cnp.import_array()

BACKEND_NAME = "cython"


cdef inline void _matvec_t(double* B, int d, int K, double alpha,
                           double* x, double* y) noexcept nogil:
    # y = alpha * C @ x where C is (K, d) row-major == (d, K) col-major B
    cdef char trans = b'T'
    cdef int inc = 1
    cdef double beta = 0.0
    dgemv(&trans, &d, &K, &alpha, B, &d, x, &inc, &beta, y, &inc)


cdef inline void _matvec_n(double* B, int d, int K, double* lam,
                           double* y) noexcept nogil:
    # y = lam @ C
    cdef char trans = b'N'
    cdef int inc = 1
    cdef double one = 1.0
    cdef double beta = 0.0
    dgemv(&trans, &d, &K, &one, B, &d, lam, &inc, &beta, y, &inc)


def fw_project(hull_pts, query, double gap_tol, int max_iter, lam0=None,
               double dist_tol=0.0):
    """Frank-Wolfe with away steps; see the python backend for the spec."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] C = \
        np.ascontiguousarray(hull_pts, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1, mode="c"] q = \
        np.ascontiguousarray(query, dtype=np.float64)
    cdef int K = C.shape[0]
    cdef int d = C.shape[1]
    cdef int inc = 1

    cdef cnp.ndarray[cnp.float64_t, ndim=1, mode="c"] lam = np.zeros(K)
    cdef cnp.ndarray[cnp.float64_t, ndim=1, mode="c"] x = np.empty(d)
    cdef cnp.ndarray[cnp.float64_t, ndim=1, mode="c"] r = np.empty(d)
    cdef cnp.ndarray[cnp.float64_t, ndim=1, mode="c"] g = np.empty(K)
    cdef cnp.ndarray[cnp.float64_t, ndim=1, mode="c"] dx = np.empty(d)

    cdef double* Cp = &C[0, 0]
    cdef double* qp = &q[0]
    cdef double* lamp = &lam[0]
    cdef double* xp = &x[0]
    cdef double* rp = &r[0]
    cdef double* gp = &g[0]
    cdef double* dxp = &dx[0]

    cdef double total, best, v, gl, gap, gap_away, dd, rd, gamma, gamma_max, la
    cdef double thresh
    cdef int i, j, k0, s, a, n_iter
    cdef bint converged = False, away

    # initial iterate: warm start or nearest vertex
    cdef bint warm = False
    cdef cnp.ndarray[cnp.float64_t, ndim=1, mode="c"] l0
    if lam0 is not None:
        l0 = np.ascontiguousarray(lam0, dtype=np.float64)
        if l0.shape[0] == K:
            total = 0.0
            for i in range(K):
                if l0[i] > 0.0:
                    total += l0[i]
            if total > 0.0:
                for i in range(K):
                    lam[i] = l0[i] / total if l0[i] > 0.0 else 0.0
                warm = True
    if not warm:
        best = INFINITY
        k0 = 0
        for i in range(K):
            v = 0.0
            for j in range(d):
                v += (C[i, j] - q[j]) * (C[i, j] - q[j])
            if v < best:
                best = v
                k0 = i
        lam[k0] = 1.0

    with nogil:
        _matvec_n(Cp, d, K, lamp, xp)
        for j in range(d):
            rp[j] = xp[j] - qp[j]

        n_iter = 0
        gap = INFINITY
        while n_iter < max_iter:
            n_iter += 1
            _matvec_t(Cp, d, K, 2.0, rp, gp)
            gl = ddot(&K, gp, &inc, lamp, &inc)
            s = 0
            for i in range(1, K):
                if gp[i] < gp[s]:
                    s = i
            gap = gl - gp[s]
            thresh = gap_tol
            if dist_tol > 0.0:
                v = dist_tol * sqrt(ddot(&d, rp, &inc, rp, &inc))
                if v > thresh:
                    thresh = v
            if gap <= thresh:
                converged = True
                break

            a = -1
            for i in range(K):
                if lamp[i] > 0.0 and (a < 0 or gp[i] > gp[a]):
                    a = i
            gap_away = gp[a] - gl

            if gap >= gap_away:
                away = False
                gamma_max = 1.0
                for j in range(d):
                    dxp[j] = C[s, j] - xp[j]
            else:
                la = lamp[a]
                if la >= 1.0:
                    break
                away = True
                gamma_max = la / (1.0 - la)
                for j in range(d):
                    dxp[j] = xp[j] - C[a, j]

            dd = ddot(&d, dxp, &inc, dxp, &inc)
            if dd <= 0.0:
                gamma = gamma_max
            else:
                rd = ddot(&d, rp, &inc, dxp, &inc)
                gamma = -rd / dd
                if gamma < 0.0:
                    gamma = 0.0
                elif gamma > gamma_max:
                    gamma = gamma_max
            if gamma <= 0.0:
                break

            if away:
                for i in range(K):
                    lamp[i] *= 1.0 + gamma
                lamp[a] -= gamma
                if gamma >= gamma_max:
                    lamp[a] = 0.0
            else:
                for i in range(K):
                    lamp[i] *= 1.0 - gamma
                lamp[s] += gamma
            daxpy(&d, &gamma, dxp, &inc, xp, &inc)
            daxpy(&d, &gamma, dxp, &inc, rp, &inc)

            if n_iter % 64 == 0:
                total = 0.0
                for i in range(K):
                    if lamp[i] < 0.0:
                        lamp[i] = 0.0
                    total += lamp[i]
                for i in range(K):
                    lamp[i] /= total
                _matvec_n(Cp, d, K, lamp, xp)
                for j in range(d):
                    rp[j] = xp[j] - qp[j]

        # final cleanup: clip, renormalize, recompute residual and gap
        total = 0.0
        for i in range(K):
            if lamp[i] < 0.0:
                lamp[i] = 0.0
            total += lamp[i]
        for i in range(K):
            lamp[i] /= total
        _matvec_n(Cp, d, K, lamp, xp)
        for j in range(d):
            rp[j] = xp[j] - qp[j]
        v = ddot(&d, rp, &inc, rp, &inc)
        _matvec_t(Cp, d, K, 2.0, rp, gp)
        gl = ddot(&K, gp, &inc, lamp, &inc)
        best = gp[0]
        for i in range(1, K):
            if gp[i] < best:
                best = gp[i]
        gap = gl - best
        thresh = gap_tol
        if dist_tol > 0.0 and dist_tol * sqrt(v) > thresh:
            thresh = dist_tol * sqrt(v)
        if gap <= thresh:
            converged = True

    return lam, sqrt(v), gap, n_iter, bool(converged)
