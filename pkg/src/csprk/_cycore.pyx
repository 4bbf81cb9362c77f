# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled stage solver with C-level gradient kernels.

Mirrors csprk._pycore.solve_stage step for step: same sweep, same stopping
rule, same final residual pass, same status codes. Only the built-in systems
have kernels here (1 = linear(a, b, c), 2 = henon_heiles, 3 = kepler); the
Stepper falls back to the numpy path for anything else.
"""

import numpy as np

from libc.math cimport isfinite, sqrt


cdef int _gradients(int kind, const double[::1] params, const double[:, ::1] p, const double[:, ::1] q,
                    double[:, ::1] gq, double[:, ::1] gp, Py_ssize_t k) noexcept:
    """Fill gq = grad_q H, gp = grad_p H at k node states. 0 ok, 2 non-finite."""
    cdef Py_ssize_t i
    cdef double a, b, c, q1, q2, p1v, p2v, r2, r3
    if kind == 1:
        a = params[0]
        b = params[1]
        c = params[2]
        for i in range(k):
            gq[i, 0] = c * q[i, 0] - b * p[i, 0]
            gp[i, 0] = a * p[i, 0] - b * q[i, 0]
            if not (isfinite(gq[i, 0]) and isfinite(gp[i, 0])):
                return 2
    elif kind == 2:
        for i in range(k):
            q1 = q[i, 0]
            q2 = q[i, 1]
            gq[i, 0] = q1 + 2.0 * q1 * q2
            gq[i, 1] = q2 + q1 * q1 - q2 * q2
            gp[i, 0] = p[i, 0]
            gp[i, 1] = p[i, 1]
            if not (isfinite(gq[i, 0]) and isfinite(gq[i, 1])
                    and isfinite(gp[i, 0]) and isfinite(gp[i, 1])):
                return 2
    elif kind == 3:
        for i in range(k):
            q1 = q[i, 0]
            q2 = q[i, 1]
            r2 = q1 * q1 + q2 * q2
            if r2 <= 0.0:
                return 2
            r3 = r2 * sqrt(r2)
            gq[i, 0] = q1 / r3
            gq[i, 1] = q2 / r3
            gp[i, 0] = p[i, 0]
            gp[i, 1] = p[i, 1]
            if not (isfinite(gq[i, 0]) and isfinite(gq[i, 1])
                    and isfinite(gp[i, 0]) and isfinite(gp[i, 1])):
                return 2
    else:
        return -1
    return 0


cdef void _stage_values(const double[:, ::1] v, const double[:, ::1] coeff, double[:, ::1] out,
                        Py_ssize_t k, Py_ssize_t n, Py_ssize_t d) noexcept:
    cdef Py_ssize_t i, j, m
    cdef double acc
    for i in range(k):
        for j in range(d):
            acc = 0.0
            for m in range(n):
                acc += v[i, m] * coeff[m, j]
            out[i, j] = acc


cdef double _project(const double[:, ::1] w, const double[:, ::1] g, const double[::1] z0, double sign_h,
                     const double[:, ::1] coeff, double[:, ::1] scratch,
                     Py_ssize_t n, Py_ssize_t k, Py_ssize_t d) noexcept:
    """scratch = sign_h * (w @ g) + e0 z0; returns max |scratch - coeff|."""
    cdef Py_ssize_t i, j, m
    cdef double acc, diff, delta = 0.0
    for i in range(n):
        for j in range(d):
            acc = 0.0
            for m in range(k):
                acc += w[i, m] * g[m, j]
            acc *= sign_h
            if i == 0:
                acc += z0[j]
            scratch[i, j] = acc
            diff = acc - coeff[i, j]
            if diff < 0.0:
                diff = -diff
            if diff > delta:
                delta = diff
    return delta


def solve_stage(const double[:, ::1] vp, const double[:, ::1] vq, const double[:, ::1] wab,
                const double[:, ::1] whb, const double[::1] bw_b, const double[::1] bw_bhat,
                int kind, const double[::1] params, const double[::1] p0, const double[::1] q0,
                double h, double[:, ::1] lam, double[:, ::1] mu,
                double tol, int max_iter):
    cdef Py_ssize_t k = vp.shape[0]
    cdef Py_ssize_t nl = lam.shape[0]
    cdef Py_ssize_t nm = mu.shape[0]
    cdef Py_ssize_t d = lam.shape[1]
    if kind == 1 and d != 1:
        raise ValueError("linear kernel expects dimension 1")
    if kind in (2, 3) and d != 2:
        raise ValueError("kernel expects dimension 2")

    pst_arr = np.empty((k, d))
    qst_arr = np.empty((k, d))
    gq_arr = np.empty((k, d))
    gp_arr = np.empty((k, d))
    lnew_arr = np.empty((nl, d))
    mnew_arr = np.empty((nm, d))
    cdef double[:, ::1] pst = pst_arr
    cdef double[:, ::1] qst = qst_arr
    cdef double[:, ::1] gq = gq_arr
    cdef double[:, ::1] gp = gp_arr
    cdef double[:, ::1] lnew = lnew_arr
    cdef double[:, ::1] mnew = mnew_arr

    cdef int iterations = 0
    cdef int status
    cdef bint converged = False
    cdef double delta = np.inf
    cdef double d1, d2
    cdef Py_ssize_t i, j

    while iterations < max_iter:
        iterations += 1
        _stage_values(vp, lam, pst, k, nl, d)
        _stage_values(vq, mu, qst, k, nm, d)
        status = _gradients(kind, params, pst, qst, gq, gp, k)
        if status != 0:
            return None, None, iterations, delta, (2 if status == 2 else -1)
        d1 = _project(wab, gq, p0, -h, lam, lnew, nl, k, d)
        d2 = _project(whb, gp, q0, h, mu, mnew, nm, k, d)
        delta = d1 if d1 > d2 else d2
        lam[...] = lnew
        mu[...] = mnew
        if delta <= tol:
            converged = True
            break
    if not converged:
        return None, None, iterations, delta, 1

    _stage_values(vp, lam, pst, k, nl, d)
    _stage_values(vq, mu, qst, k, nm, d)
    status = _gradients(kind, params, pst, qst, gq, gp, k)
    if status != 0:
        return None, None, iterations, delta, (2 if status == 2 else -1)
    d1 = _project(wab, gq, p0, -h, lam, lnew, nl, k, d)
    d2 = _project(whb, gp, q0, h, mu, mnew, nm, k, d)
    cdef double residual = d1 if d1 > d2 else d2

    p1_arr = np.empty(d)
    q1_arr = np.empty(d)
    cdef double[::1] p1 = p1_arr
    cdef double[::1] q1 = q1_arr
    cdef double acc
    for j in range(d):
        acc = 0.0
        for i in range(k):
            acc += bw_b[i] * gq[i, j]
        p1[j] = p0[j] - h * acc
        acc = 0.0
        for i in range(k):
            acc += bw_bhat[i] * gp[i, j]
        q1[j] = q0[j] + h * acc
    return p1_arr, q1_arr, iterations, residual, 0
