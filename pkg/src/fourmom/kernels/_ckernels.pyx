# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled per-step kernels; same contracts as ``_pykernels``."""
import numpy as np

from libc.math cimport sqrt, fabs, copysign

cdef double E_NEG_RTOL = 1e-12
cdef double E_NEG_ATOL = 2.2250738585072014e-308
cdef double CLAMP_ULPS = 64.0
cdef double _EPS = 2.220446049250313e-16


def invert_cells(const double[:, ::1] M, double eps1, double vacuum_m0):
    cdef Py_ssize_t n = M.shape[0], j
    U_arr = np.zeros((n, 4))
    cdef double[:, ::1] U = U_arr
    cdef double m0, m1, m2, m3, e, q, s, u, aq, light, far, near, scale
    cdef Py_ssize_t bad = -1
    with nogil:
        for j in range(n):
            m0 = M[j, 0]
            if m0 < -vacuum_m0:
                if bad < 0:
                    bad = j
                continue
            if m0 <= vacuum_m0:
                continue
            m1 = M[j, 1]
            m2 = M[j, 2]
            m3 = M[j, 3]
            e = m0 * m2 - m1 * m1
            q = (m3 * m0 * m0 - m1 * m1 * m1) - 3.0 * m1 * e
            if e < 0.0:
                scale = m0 * m2 if m0 * m2 > m1 * m1 else m1 * m1
                if e <= -E_NEG_RTOL * scale - E_NEG_ATOL and bad < 0:
                    bad = j
                e = 0.0
            u = m1 / m0
            if e > eps1 * m0 * m0:
                s = sqrt(q * q + 4.0 * e * e * e)
                aq = fabs(q)
                light = 2.0 * m0 * e * e * e / (s * (s + aq))
                far = (aq + s) / (2.0 * m0 * e)
                near = 2.0 * e * e / (m0 * (s + aq))
                if q >= 0.0:
                    U[j, 0] = light
                    U[j, 1] = m0 - light
                    U[j, 2] = u + far
                    U[j, 3] = u - near
                else:
                    U[j, 0] = m0 - light
                    U[j, 1] = light
                    U[j, 2] = u + near
                    U[j, 3] = u - far
            else:
                U[j, 0] = 0.5 * m0
                U[j, 1] = 0.5 * m0
                U[j, 2] = u
                U[j, 3] = u
    return U_arr, int(bad)


def max_speed(const double[:, ::1] U):
    cdef Py_ssize_t j
    cdef double vmax = 0.0
    with nogil:
        for j in range(U.shape[0]):
            if fabs(U[j, 2]) > vmax:
                vmax = fabs(U[j, 2])
            if fabs(U[j, 3]) > vmax:
                vmax = fabs(U[j, 3])
    return vmax


cdef inline void _node_parts(const double[:, ::1] U, Py_ssize_t j, double* pos, double* neg) noexcept nogil:
    cdef int i, k
    cdef double rho, v, vp, vm, vi
    for i in range(4):
        pos[i] = 0.0
        neg[i] = 0.0
    for k in range(2):
        rho = U[j, k]
        v = U[j, 2 + k]
        vp = v if v > 0.0 else 0.0
        vm = v if v < 0.0 else 0.0
        vi = 1.0
        for i in range(4):
            pos[i] += rho * vp * vi
            neg[i] += rho * vm * vi
            vi = vi * v


def interface_fluxes(const double[:, ::1] U_ext):
    cdef Py_ssize_t n = U_ext.shape[0] - 1, j
    F_arr = np.empty((n, 4))
    cdef double[:, ::1] F = F_arr
    cdef double pos[4]
    cdef double neg[4]
    cdef double dummy[4]
    cdef int i
    with nogil:
        for j in range(n):
            _node_parts(U_ext, j, pos, dummy)
            _node_parts(U_ext, j + 1, dummy, neg)
            for i in range(4):
                F[j, i] = pos[i] + neg[i]
    return F_arr


def conservative_update(const double[:, ::1] M, const double[:, ::1] U_ext, double lam):
    cdef Py_ssize_t n = M.shape[0], j
    out_arr = np.empty((n, 4))
    cdef double[:, ::1] out = out_arr
    F_arr = interface_fluxes(U_ext)
    cdef double[:, ::1] F = F_arr
    cdef int i
    with nogil:
        for j in range(n):
            for i in range(4):
                out[j, i] = M[j, i] - lam * (F[j + 1, i] - F[j, i])
    return out_arr, F_arr[0].copy(), F_arr[n].copy()


def postprocess(double[:, ::1] M, double eps1, double eta, double vacuum_m0, bint clamp=True):
    cdef Py_ssize_t n = M.shape[0], j
    cdef double m0, m1, m2, m3, e, q, scale, ratio, bound, qscale, qc
    cdef double max_ratio = 0.0
    cdef Py_ssize_t n_clamped = 0
    cdef Py_ssize_t bad = -1
    with nogil:
        for j in range(n):
            m0 = M[j, 0]
            if m0 < -vacuum_m0 and bad < 0:
                bad = j
            if m0 <= vacuum_m0:
                continue
            m1 = M[j, 1]
            m2 = M[j, 2]
            m3 = M[j, 3]
            e = m0 * m2 - m1 * m1
            q = (m3 * m0 * m0 - m1 * m1 * m1) - 3.0 * m1 * e
            if e < 0.0:
                scale = m0 * m2 if m0 * m2 > m1 * m1 else m1 * m1
                if e <= -E_NEG_RTOL * scale - E_NEG_ATOL and bad < 0:
                    bad = j
                continue
            if not e > eps1 * m0 * m0:
                continue
            ratio = fabs(q) / (m0 * e)
            if ratio > max_ratio:
                max_ratio = ratio
            if clamp:
                bound = eta * m0 * e
                qscale = m0 * m0 * fabs(m3) + fabs(m1) * fabs(m1) * fabs(m1) + 3.0 * fabs(m1) * m0 * m2
                if fabs(q) - bound > CLAMP_ULPS * _EPS * qscale:
                    qc = copysign(bound, q)
                    M[j, 3] = (qc + 3.0 * m1 * m0 * m2 - 2.0 * m1 * m1 * m1) / (m0 * m0)
                    n_clamped += 1
    return int(n_clamped), max_ratio, int(bad)
