# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled stepping kernels (1-D and 3-D specializations).

Same contract as illg._kernels_py: each function runs the full
lagged-Laplacian fixed-point loop for one time step and returns
(m_next_full, diffs, converged, max_len_dev).
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()


def run_illg_step(prev, curr, he, forcing, double alpha, double tau,
                  double k, inv_h2, double vol, double eps, int max_iters):
    if prev.ndim == 2:
        return _illg_1d(prev, curr, he, forcing, alpha, tau, k,
                        inv_h2[0], vol, eps, max_iters)
    return _illg_3d(prev, curr, he, forcing, alpha, tau, k,
                    inv_h2[0], inv_h2[1], inv_h2[2], vol, eps, max_iters)


def run_llg_step(curr, he, double alpha, double k, inv_h2, double vol,
                 double eps, int max_iters):
    if curr.ndim == 2:
        return _llg_1d(curr, he, alpha, k, inv_h2[0], vol, eps, max_iters)
    return _llg_3d(curr, he, alpha, k, inv_h2[0], inv_h2[1], inv_h2[2],
                   vol, eps, max_iters)


def _illg_1d(double[:, ::1] prev, double[:, ::1] curr, double[::1] he,
             forcing, double alpha, double tau, double k, double ih2,
             double vol, double eps, int max_iters):
    cdef Py_ssize_t n = prev.shape[0] - 2
    cdef Py_ssize_t i, c
    cdef double ctk = 2.0 * alpha * tau / k
    cdef double hk = 0.5 * k
    cdef double he0 = 2.0 * he[0], he1 = 2.0 * he[1], he2 = 2.0 * he[2]
    cdef double g0, g1, g2, a0, a1, a2, r0, r1, r2, v0, v1, v2
    cdef double asq, adr, den, d2, diff, dev, d
    cdef bint has_f = forcing is not None
    cdef double[:, ::1] f = forcing if has_f else np.empty((1, 3))

    ab_arr = np.empty((n + 2, 3))
    rb_arr = np.empty((n + 2, 3))
    s_arr = np.empty((n + 2, 3))
    buf_p = np.zeros((n + 2, 3))
    buf_n = np.zeros((n + 2, 3))
    cdef double[:, ::1] ab = ab_arr, rb = rb_arr, s = s_arr
    cdef double[:, ::1] mp = buf_p, mn = buf_n, tmpv

    for i in range(1, n + 1):
        for c in range(3):
            ab[i, c] = alpha * prev[i, c] + ctk * curr[i, c]
        rb[i, 0] = prev[i, 0] + ctk * (curr[i, 1] * prev[i, 2] - curr[i, 2] * prev[i, 1])
        rb[i, 1] = prev[i, 1] + ctk * (curr[i, 2] * prev[i, 0] - curr[i, 0] * prev[i, 2])
        rb[i, 2] = prev[i, 2] + ctk * (curr[i, 0] * prev[i, 1] - curr[i, 1] * prev[i, 0])
        if has_f:
            for c in range(3):
                rb[i, c] += 2.0 * k * f[i - 1, c]
        for c in range(3):
            mp[i, c] = 2.0 * curr[i, c] - prev[i, c]

    diffs = []
    cdef bint converged = False
    cdef int p
    for p in range(max_iters):
        for i in range(1, n + 1):
            for c in range(3):
                s[i, c] = mp[i, c] + prev[i, c]
        for c in range(3):
            s[0, c] = s[1, c]
            s[n + 1, c] = s[n, c]
        d2 = 0.0
        for i in range(1, n + 1):
            g0 = (s[i + 1, 0] - 2.0 * s[i, 0] + s[i - 1, 0]) * ih2 + he0
            g1 = (s[i + 1, 1] - 2.0 * s[i, 1] + s[i - 1, 1]) * ih2 + he1
            g2 = (s[i + 1, 2] - 2.0 * s[i, 2] + s[i - 1, 2]) * ih2 + he2
            a0 = ab[i, 0] + hk * g0
            a1 = ab[i, 1] + hk * g1
            a2 = ab[i, 2] + hk * g2
            r0 = rb[i, 0] - hk * (prev[i, 1] * g2 - prev[i, 2] * g1)
            r1 = rb[i, 1] - hk * (prev[i, 2] * g0 - prev[i, 0] * g2)
            r2 = rb[i, 2] - hk * (prev[i, 0] * g1 - prev[i, 1] * g0)
            asq = a0 * a0 + a1 * a1 + a2 * a2
            adr = a0 * r0 + a1 * r1 + a2 * r2
            den = 1.0 + asq
            v0 = (r0 + a1 * r2 - a2 * r1 + adr * a0) / den
            v1 = (r1 + a2 * r0 - a0 * r2 + adr * a1) / den
            v2 = (r2 + a0 * r1 - a1 * r0 + adr * a2) / den
            d = v0 - mp[i, 0]
            d2 += d * d
            d = v1 - mp[i, 1]
            d2 += d * d
            d = v2 - mp[i, 2]
            d2 += d * d
            mn[i, 0] = v0
            mn[i, 1] = v1
            mn[i, 2] = v2
        diff = sqrt(vol * d2)
        diffs.append(diff)
        tmpv = mp
        mp = mn
        mn = tmpv
        buf_p, buf_n = buf_n, buf_p
        if diff <= eps:
            converged = True
            break

    dev = 0.0
    for i in range(1, n + 1):
        d = mp[i, 0] * mp[i, 0] + mp[i, 1] * mp[i, 1] + mp[i, 2] * mp[i, 2] - 1.0
        if d < 0.0:
            d = -d
        if d > dev:
            dev = d
    return buf_p, np.asarray(diffs), converged, dev


def _illg_3d(double[:, :, :, ::1] prev, double[:, :, :, ::1] curr,
             double[::1] he, forcing, double alpha, double tau, double k,
             double ih2x, double ih2y, double ih2z, double vol, double eps,
             int max_iters):
    cdef Py_ssize_t nx = prev.shape[0] - 2
    cdef Py_ssize_t ny = prev.shape[1] - 2
    cdef Py_ssize_t nz = prev.shape[2] - 2
    cdef Py_ssize_t i, j, l, c
    cdef double ctk = 2.0 * alpha * tau / k
    cdef double hk = 0.5 * k
    cdef double he0 = 2.0 * he[0], he1 = 2.0 * he[1], he2 = 2.0 * he[2]
    cdef double g0, g1, g2, a0, a1, a2, r0, r1, r2, v0, v1, v2
    cdef double asq, adr, den, d2, diff, dev, d
    cdef bint has_f = forcing is not None
    cdef double[:, :, :, ::1] f = forcing if has_f else np.empty((1, 1, 1, 3))

    shape = (nx + 2, ny + 2, nz + 2, 3)
    ab_arr = np.empty(shape)
    rb_arr = np.empty(shape)
    s_arr = np.empty(shape)
    buf_p = np.zeros(shape)
    buf_n = np.zeros(shape)
    cdef double[:, :, :, ::1] ab = ab_arr, rb = rb_arr, s = s_arr
    cdef double[:, :, :, ::1] mp = buf_p, mn = buf_n, tmpv

    for i in range(1, nx + 1):
        for j in range(1, ny + 1):
            for l in range(1, nz + 1):
                for c in range(3):
                    ab[i, j, l, c] = alpha * prev[i, j, l, c] + ctk * curr[i, j, l, c]
                rb[i, j, l, 0] = prev[i, j, l, 0] + ctk * (
                    curr[i, j, l, 1] * prev[i, j, l, 2] - curr[i, j, l, 2] * prev[i, j, l, 1])
                rb[i, j, l, 1] = prev[i, j, l, 1] + ctk * (
                    curr[i, j, l, 2] * prev[i, j, l, 0] - curr[i, j, l, 0] * prev[i, j, l, 2])
                rb[i, j, l, 2] = prev[i, j, l, 2] + ctk * (
                    curr[i, j, l, 0] * prev[i, j, l, 1] - curr[i, j, l, 1] * prev[i, j, l, 0])
                if has_f:
                    for c in range(3):
                        rb[i, j, l, c] += 2.0 * k * f[i - 1, j - 1, l - 1, c]
                for c in range(3):
                    mp[i, j, l, c] = 2.0 * curr[i, j, l, c] - prev[i, j, l, c]

    diffs = []
    cdef bint converged = False
    cdef int p
    for p in range(max_iters):
        for i in range(1, nx + 1):
            for j in range(1, ny + 1):
                for l in range(1, nz + 1):
                    for c in range(3):
                        s[i, j, l, c] = mp[i, j, l, c] + prev[i, j, l, c]
        _fill_ghosts_3d(s, nx, ny, nz)
        d2 = 0.0
        for i in range(1, nx + 1):
            for j in range(1, ny + 1):
                for l in range(1, nz + 1):
                    g0 = ((s[i + 1, j, l, 0] - 2.0 * s[i, j, l, 0] + s[i - 1, j, l, 0]) * ih2x
                          + (s[i, j + 1, l, 0] - 2.0 * s[i, j, l, 0] + s[i, j - 1, l, 0]) * ih2y
                          + (s[i, j, l + 1, 0] - 2.0 * s[i, j, l, 0] + s[i, j, l - 1, 0]) * ih2z
                          + he0)
                    g1 = ((s[i + 1, j, l, 1] - 2.0 * s[i, j, l, 1] + s[i - 1, j, l, 1]) * ih2x
                          + (s[i, j + 1, l, 1] - 2.0 * s[i, j, l, 1] + s[i, j - 1, l, 1]) * ih2y
                          + (s[i, j, l + 1, 1] - 2.0 * s[i, j, l, 1] + s[i, j, l - 1, 1]) * ih2z
                          + he1)
                    g2 = ((s[i + 1, j, l, 2] - 2.0 * s[i, j, l, 2] + s[i - 1, j, l, 2]) * ih2x
                          + (s[i, j + 1, l, 2] - 2.0 * s[i, j, l, 2] + s[i, j - 1, l, 2]) * ih2y
                          + (s[i, j, l + 1, 2] - 2.0 * s[i, j, l, 2] + s[i, j, l - 1, 2]) * ih2z
                          + he2)
                    a0 = ab[i, j, l, 0] + hk * g0
                    a1 = ab[i, j, l, 1] + hk * g1
                    a2 = ab[i, j, l, 2] + hk * g2
                    r0 = rb[i, j, l, 0] - hk * (prev[i, j, l, 1] * g2 - prev[i, j, l, 2] * g1)
                    r1 = rb[i, j, l, 1] - hk * (prev[i, j, l, 2] * g0 - prev[i, j, l, 0] * g2)
                    r2 = rb[i, j, l, 2] - hk * (prev[i, j, l, 0] * g1 - prev[i, j, l, 1] * g0)
                    asq = a0 * a0 + a1 * a1 + a2 * a2
                    adr = a0 * r0 + a1 * r1 + a2 * r2
                    den = 1.0 + asq
                    v0 = (r0 + a1 * r2 - a2 * r1 + adr * a0) / den
                    v1 = (r1 + a2 * r0 - a0 * r2 + adr * a1) / den
                    v2 = (r2 + a0 * r1 - a1 * r0 + adr * a2) / den
                    d = v0 - mp[i, j, l, 0]
                    d2 += d * d
                    d = v1 - mp[i, j, l, 1]
                    d2 += d * d
                    d = v2 - mp[i, j, l, 2]
                    d2 += d * d
                    mn[i, j, l, 0] = v0
                    mn[i, j, l, 1] = v1
                    mn[i, j, l, 2] = v2
        diff = sqrt(vol * d2)
        diffs.append(diff)
        tmpv = mp
        mp = mn
        mn = tmpv
        buf_p, buf_n = buf_n, buf_p
        if diff <= eps:
            converged = True
            break

    dev = 0.0
    for i in range(1, nx + 1):
        for j in range(1, ny + 1):
            for l in range(1, nz + 1):
                d = (mp[i, j, l, 0] * mp[i, j, l, 0] + mp[i, j, l, 1] * mp[i, j, l, 1]
                     + mp[i, j, l, 2] * mp[i, j, l, 2] - 1.0)
                if d < 0.0:
                    d = -d
                if d > dev:
                    dev = d
    return buf_p, np.asarray(diffs), converged, dev


cdef void _fill_ghosts_3d(double[:, :, :, ::1] s, Py_ssize_t nx,
                          Py_ssize_t ny, Py_ssize_t nz) noexcept:
    cdef Py_ssize_t i, j, l, c
    for j in range(ny + 2):
        for l in range(nz + 2):
            for c in range(3):
                s[0, j, l, c] = s[1, j, l, c]
                s[nx + 1, j, l, c] = s[nx, j, l, c]
    for i in range(nx + 2):
        for l in range(nz + 2):
            for c in range(3):
                s[i, 0, l, c] = s[i, 1, l, c]
                s[i, ny + 1, l, c] = s[i, ny, l, c]
    for i in range(nx + 2):
        for j in range(ny + 2):
            for c in range(3):
                s[i, j, 0, c] = s[i, j, 1, c]
                s[i, j, nz + 1, c] = s[i, j, nz, c]


def _llg_1d(double[:, ::1] curr, double[::1] he, double alpha, double k,
            double ih2, double vol, double eps, int max_iters):
    cdef Py_ssize_t n = curr.shape[0] - 2
    cdef Py_ssize_t i, c
    cdef double qk = 0.25 * k
    cdef double he0 = 2.0 * he[0], he1 = 2.0 * he[1], he2 = 2.0 * he[2]
    cdef double g0, g1, g2, a0, a1, a2, r0, r1, r2, v0, v1, v2
    cdef double asq, adr, den, d2, diff, dev, d

    s_arr = np.empty((n + 2, 3))
    buf_p = np.zeros((n + 2, 3))
    buf_n = np.zeros((n + 2, 3))
    cdef double[:, ::1] s = s_arr
    cdef double[:, ::1] mp = buf_p, mn = buf_n, tmpv

    for i in range(1, n + 1):
        for c in range(3):
            mp[i, c] = curr[i, c]

    diffs = []
    cdef bint converged = False
    cdef int p
    for p in range(max_iters):
        for i in range(1, n + 1):
            for c in range(3):
                s[i, c] = mp[i, c] + curr[i, c]
        for c in range(3):
            s[0, c] = s[1, c]
            s[n + 1, c] = s[n, c]
        d2 = 0.0
        for i in range(1, n + 1):
            g0 = (s[i + 1, 0] - 2.0 * s[i, 0] + s[i - 1, 0]) * ih2 + he0
            g1 = (s[i + 1, 1] - 2.0 * s[i, 1] + s[i - 1, 1]) * ih2 + he1
            g2 = (s[i + 1, 2] - 2.0 * s[i, 2] + s[i - 1, 2]) * ih2 + he2
            a0 = alpha * curr[i, 0] + qk * g0
            a1 = alpha * curr[i, 1] + qk * g1
            a2 = alpha * curr[i, 2] + qk * g2
            r0 = curr[i, 0] - qk * (curr[i, 1] * g2 - curr[i, 2] * g1)
            r1 = curr[i, 1] - qk * (curr[i, 2] * g0 - curr[i, 0] * g2)
            r2 = curr[i, 2] - qk * (curr[i, 0] * g1 - curr[i, 1] * g0)
            asq = a0 * a0 + a1 * a1 + a2 * a2
            adr = a0 * r0 + a1 * r1 + a2 * r2
            den = 1.0 + asq
            v0 = (r0 + a1 * r2 - a2 * r1 + adr * a0) / den
            v1 = (r1 + a2 * r0 - a0 * r2 + adr * a1) / den
            v2 = (r2 + a0 * r1 - a1 * r0 + adr * a2) / den
            d = v0 - mp[i, 0]
            d2 += d * d
            d = v1 - mp[i, 1]
            d2 += d * d
            d = v2 - mp[i, 2]
            d2 += d * d
            mn[i, 0] = v0
            mn[i, 1] = v1
            mn[i, 2] = v2
        diff = sqrt(vol * d2)
        diffs.append(diff)
        tmpv = mp
        mp = mn
        mn = tmpv
        buf_p, buf_n = buf_n, buf_p
        if diff <= eps:
            converged = True
            break

    dev = 0.0
    for i in range(1, n + 1):
        d = mp[i, 0] * mp[i, 0] + mp[i, 1] * mp[i, 1] + mp[i, 2] * mp[i, 2] - 1.0
        if d < 0.0:
            d = -d
        if d > dev:
            dev = d
    return buf_p, np.asarray(diffs), converged, dev


def _llg_3d(double[:, :, :, ::1] curr, double[::1] he, double alpha,
            double k, double ih2x, double ih2y, double ih2z, double vol,
            double eps, int max_iters):
    cdef Py_ssize_t nx = curr.shape[0] - 2
    cdef Py_ssize_t ny = curr.shape[1] - 2
    cdef Py_ssize_t nz = curr.shape[2] - 2
    cdef Py_ssize_t i, j, l, c
    cdef double qk = 0.25 * k
    cdef double he0 = 2.0 * he[0], he1 = 2.0 * he[1], he2 = 2.0 * he[2]
    cdef double g0, g1, g2, a0, a1, a2, r0, r1, r2, v0, v1, v2
    cdef double asq, adr, den, d2, diff, dev, d

    shape = (nx + 2, ny + 2, nz + 2, 3)
    s_arr = np.empty(shape)
    buf_p = np.zeros(shape)
    buf_n = np.zeros(shape)
    cdef double[:, :, :, ::1] s = s_arr
    cdef double[:, :, :, ::1] mp = buf_p, mn = buf_n, tmpv

    for i in range(1, nx + 1):
        for j in range(1, ny + 1):
            for l in range(1, nz + 1):
                for c in range(3):
                    mp[i, j, l, c] = curr[i, j, l, c]

    diffs = []
    cdef bint converged = False
    cdef int p
    for p in range(max_iters):
        for i in range(1, nx + 1):
            for j in range(1, ny + 1):
                for l in range(1, nz + 1):
                    for c in range(3):
                        s[i, j, l, c] = mp[i, j, l, c] + curr[i, j, l, c]
        _fill_ghosts_3d(s, nx, ny, nz)
        d2 = 0.0
        for i in range(1, nx + 1):
            for j in range(1, ny + 1):
                for l in range(1, nz + 1):
                    g0 = ((s[i + 1, j, l, 0] - 2.0 * s[i, j, l, 0] + s[i - 1, j, l, 0]) * ih2x
                          + (s[i, j + 1, l, 0] - 2.0 * s[i, j, l, 0] + s[i, j - 1, l, 0]) * ih2y
                          + (s[i, j, l + 1, 0] - 2.0 * s[i, j, l, 0] + s[i, j, l - 1, 0]) * ih2z
                          + he0)
                    g1 = ((s[i + 1, j, l, 1] - 2.0 * s[i, j, l, 1] + s[i - 1, j, l, 1]) * ih2x
                          + (s[i, j + 1, l, 1] - 2.0 * s[i, j, l, 1] + s[i, j - 1, l, 1]) * ih2y
                          + (s[i, j, l + 1, 1] - 2.0 * s[i, j, l, 1] + s[i, j, l - 1, 1]) * ih2z
                          + he1)
                    g2 = ((s[i + 1, j, l, 2] - 2.0 * s[i, j, l, 2] + s[i - 1, j, l, 2]) * ih2x
                          + (s[i, j + 1, l, 2] - 2.0 * s[i, j, l, 2] + s[i, j - 1, l, 2]) * ih2y
                          + (s[i, j, l + 1, 2] - 2.0 * s[i, j, l, 2] + s[i, j, l - 1, 2]) * ih2z
                          + he2)
                    a0 = alpha * curr[i, j, l, 0] + qk * g0
                    a1 = alpha * curr[i, j, l, 1] + qk * g1
                    a2 = alpha * curr[i, j, l, 2] + qk * g2
                    r0 = curr[i, j, l, 0] - qk * (curr[i, j, l, 1] * g2 - curr[i, j, l, 2] * g1)
                    r1 = curr[i, j, l, 1] - qk * (curr[i, j, l, 2] * g0 - curr[i, j, l, 0] * g2)
                    r2 = curr[i, j, l, 2] - qk * (curr[i, j, l, 0] * g1 - curr[i, j, l, 1] * g0)
                    asq = a0 * a0 + a1 * a1 + a2 * a2
                    adr = a0 * r0 + a1 * r1 + a2 * r2
                    den = 1.0 + asq
                    v0 = (r0 + a1 * r2 - a2 * r1 + adr * a0) / den
                    v1 = (r1 + a2 * r0 - a0 * r2 + adr * a1) / den
                    v2 = (r2 + a0 * r1 - a1 * r0 + adr * a2) / den
                    d = v0 - mp[i, j, l, 0]
                    d2 += d * d
                    d = v1 - mp[i, j, l, 1]
                    d2 += d * d
                    d = v2 - mp[i, j, l, 2]
                    d2 += d * d
                    mn[i, j, l, 0] = v0
                    mn[i, j, l, 1] = v1
                    mn[i, j, l, 2] = v2
        diff = sqrt(vol * d2)
        diffs.append(diff)
        tmpv = mp
        mp = mn
        mn = tmpv
        buf_p, buf_n = buf_n, buf_p
        if diff <= eps:
            converged = True
            break

    dev = 0.0
    for i in range(1, nx + 1):
        for j in range(1, ny + 1):
            for l in range(1, nz + 1):
                d = (mp[i, j, l, 0] * mp[i, j, l, 0] + mp[i, j, l, 1] * mp[i, j, l, 1]
                     + mp[i, j, l, 2] * mp[i, j, l, 2] - 1.0)
                if d < 0.0:
                    d = -d
                if d > dev:
                    dev = d
    return buf_p, np.asarray(diffs), converged, dev
