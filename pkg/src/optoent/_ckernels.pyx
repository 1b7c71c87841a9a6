# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled numerical kernels; see _pykernels for the reference semantics."""
import numpy as np

from libc.math cimport fabs, pow, sqrt

from ._dop853 import A_DOP, B_DOP, E3_DOP, E5_DOP, N_STAGES

cdef int NS = N_STAGES
cdef const double[:, ::1] _A = A_DOP
cdef const double[::1] _B = B_DOP
cdef const double[::1] _E3 = E3_DOP
cdef const double[::1] _E5 = E5_DOP

cdef double SAFETY = 0.9
cdef double MIN_FACTOR = 0.2
cdef double MAX_FACTOR = 10.0
cdef double ERROR_EXPONENT = -1.0 / 8.0
cdef double EPS = np.finfo(float).eps


cdef double _lu_solve_inplace(double[:, ::1] m, double[::1] b) noexcept nogil:
    """Gaussian elimination with partial pivoting; solution left in b.

    Returns min/max absolute pivot, 0.0 if a zero pivot was met.
    """
    cdef Py_ssize_t n = m.shape[0]
    cdef Py_ssize_t i, j, r, p
    cdef double big, v, piv, f, tmp
    cdef double pmin = 1e308
    cdef double pmax = 0.0
    for i in range(n):
        p = i
        big = fabs(m[i, i])
        for r in range(i + 1, n):
            v = fabs(m[r, i])
            if v > big:
                big = v
                p = r
        if big == 0.0:
            return 0.0
        if p != i:
            for j in range(i, n):
                tmp = m[i, j]
                m[i, j] = m[p, j]
                m[p, j] = tmp
            tmp = b[i]
            b[i] = b[p]
            b[p] = tmp
        piv = m[i, i]
        if big < pmin:
            pmin = big
        if big > pmax:
            pmax = big
        for r in range(i + 1, n):
            f = m[r, i] / piv
            if f != 0.0:
                for j in range(i + 1, n):
                    m[r, j] -= f * m[i, j]
                b[r] -= f * b[i]
    for i in range(n - 1, -1, -1):
        v = b[i]
        for j in range(i + 1, n):
            v -= m[i, j] * b[j]
        b[i] = v / m[i, i]
    return pmin / pmax


def kron_lyapunov_solve(c, d):
    cdef const double[:, ::1] cv = np.ascontiguousarray(c, dtype=float)
    cdef const double[:, ::1] dv = np.ascontiguousarray(d, dtype=float)
    cdef Py_ssize_t n = cv.shape[0]
    cdef Py_ssize_t nn = n * n
    m_arr = np.zeros((nn, nn))
    b_arr = np.empty(nn)
    cdef double[:, ::1] m = m_arr
    cdef double[::1] b = b_arr
    cdef Py_ssize_t i, j, k
    cdef double ratio
    with nogil:
        for i in range(n):
            for j in range(n):
                b[i * n + j] = -dv[i, j]
                for k in range(n):
                    # (C Z)[i, j] picks z[k, j]; (Z C^T)[i, j] picks z[i, k]
                    m[i * n + j, k * n + j] += cv[i, k]
                    m[i * n + j, i * n + k] += cv[j, k]
        ratio = _lu_solve_inplace(m, b)
    if ratio == 0.0:
        return np.full((n, n), np.nan), 0.0
    return b_arr.reshape(n, n), ratio


def theta_minus_parts(r):
    cdef const double[:, ::1] rv = np.ascontiguousarray(r, dtype=float)
    cdef double a[4][4]
    cdef Py_ssize_t i, j, k, p
    cdef double det1, det2, detc, chi, det_r, big, v, f, tmp
    for i in range(4):
        for j in range(4):
            a[i][j] = rv[i, j]
    det1 = a[0][0] * a[1][1] - a[0][1] * a[1][0]
    det2 = a[2][2] * a[3][3] - a[2][3] * a[3][2]
    detc = a[0][2] * a[1][3] - a[0][3] * a[1][2]
    chi = det1 + det2 - 2.0 * detc
    det_r = 1.0
    for i in range(4):
        p = i
        big = fabs(a[i][i])
        for k in range(i + 1, 4):
            v = fabs(a[k][i])
            if v > big:
                big = v
                p = k
        if big == 0.0:
            det_r = 0.0
            break
        if p != i:
            det_r = -det_r
            for j in range(4):
                tmp = a[i][j]
                a[i][j] = a[p][j]
                a[p][j] = tmp
        det_r *= a[i][i]
        for k in range(i + 1, 4):
            f = a[k][i] / a[i][i]
            for j in range(i + 1, 4):
                a[k][j] -= f * a[i][j]
    return chi, det_r, chi * chi - 4.0 * det_r


cdef void _rhs(const double[:, ::1] c, const double[:, ::1] d, double[:, ::1] z,
               double[:, ::1] out, double[:, ::1] tmp) noexcept nogil:
    cdef Py_ssize_t n = c.shape[0]
    cdef Py_ssize_t i, j, k
    cdef double s
    for i in range(n):
        for j in range(n):
            s = 0.0
            for k in range(n):
                s += c[i, k] * z[k, j]
            tmp[i, j] = s
    for i in range(n):
        for j in range(n):
            out[i, j] = tmp[i, j] + tmp[j, i] + d[i, j]


def integrate_lyapunov_ode(c, d, z0, double t_end, double rtol, double atol, long max_steps):
    cdef const double[:, ::1] cv = np.ascontiguousarray(c, dtype=float)
    cdef const double[:, ::1] dv = np.ascontiguousarray(d, dtype=float)
    z_arr = np.array(z0, dtype=float, order="C")
    cdef double[:, ::1] z = z_arr
    cdef Py_ssize_t n = z.shape[0]
    if t_end <= 0:
        return z_arr, 0, 0
    k_arr = np.empty((NS + 1, n, n))
    cdef double[:, :, ::1] kk = k_arr
    cdef double[:, ::1] zs = np.empty((n, n))
    cdef double[:, ::1] znew = np.empty((n, n))
    cdef double[:, ::1] f = np.empty((n, n))
    cdef double[:, ::1] tmp = np.empty((n, n))
    cdef Py_ssize_t s, q, i, j
    cdef double norm_c = 0.0, row, h, t = 0.0, acc, e5, e3, sc, w5, w3, err, denom, factor
    cdef long steps = 0
    cdef int status = 0
    with nogil:
        for i in range(n):
            row = 0.0
            for j in range(n):
                row += fabs(cv[i, j])
            if row > norm_c:
                norm_c = row
        h = t_end if norm_c == 0.0 else min(t_end, 0.05 / norm_c)
        _rhs(cv, dv, z, f, tmp)
        while t < t_end:
            if steps >= max_steps:
                status = 2
                break
            if h < 10.0 * EPS * max(t, 1.0):
                status = 1
                break
            h = min(h, t_end - t)
            kk[0, :, :] = f
            for s in range(1, NS):
                for i in range(n):
                    for j in range(n):
                        acc = 0.0
                        for q in range(s):
                            acc += _A[s, q] * kk[q, i, j]
                        zs[i, j] = z[i, j] + h * acc
                _rhs(cv, dv, zs, kk[s], tmp)
            for i in range(n):
                for j in range(n):
                    acc = 0.0
                    for q in range(NS):
                        acc += _B[q] * kk[q, i, j]
                    znew[i, j] = z[i, j] + h * acc
            _rhs(cv, dv, znew, kk[NS], tmp)
            e5 = 0.0
            e3 = 0.0
            for i in range(n):
                for j in range(n):
                    sc = atol + max(fabs(z[i, j]), fabs(znew[i, j])) * rtol
                    w5 = 0.0
                    w3 = 0.0
                    for q in range(NS + 1):
                        w5 += _E5[q] * kk[q, i, j]
                        w3 += _E3[q] * kk[q, i, j]
                    w5 /= sc
                    w3 /= sc
                    e5 += w5 * w5
                    e3 += w3 * w3
            denom = e5 + 0.01 * e3
            err = 0.0 if denom == 0.0 else h * e5 / sqrt(denom * n * n)
            if err < 1.0:
                if err == 0.0:
                    factor = MAX_FACTOR
                else:
                    factor = min(MAX_FACTOR, SAFETY * pow(err, ERROR_EXPONENT))
                t += h
                for i in range(n):
                    for j in range(n):
                        z[i, j] = 0.5 * (znew[i, j] + znew[j, i])
                _rhs(cv, dv, z, f, tmp)
                steps += 1
                h *= factor
            else:
                h *= max(MIN_FACTOR, SAFETY * pow(err, ERROR_EXPONENT))
    return z_arr, steps, status
