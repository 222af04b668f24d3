# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: DOPRI5 geodesic integrator and LSA residual loops."""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, sqrt, pow, isfinite

cnp.import_array()

cdef enum:
    FRAME = 0
    COORDINATE = 1

cdef double C2 = 1.0 / 5, C3 = 3.0 / 10, C4 = 4.0 / 5, C5 = 8.0 / 9
cdef double A21 = 1.0 / 5
cdef double A31 = 3.0 / 40, A32 = 9.0 / 40
cdef double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9
cdef double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561, A54 = -212.0 / 729
cdef double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247, A64 = 49.0 / 176, A65 = -5103.0 / 18656
cdef double A71 = 35.0 / 384, A73 = 500.0 / 1113, A74 = 125.0 / 192, A75 = -2187.0 / 6784, A76 = 11.0 / 84
cdef double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920, E5 = -17253.0 / 339200, E6 = 22.0 / 525, E7 = -1.0 / 40


cdef inline void rhs(int kind, double* g, double* s, double* out) nogil:
    # g is gamma[i][j][k] flattened as g[4*i + 2*j + k]
    cdef double x = s[0], p = s[2], q = s[3]
    cdef double f0 = g[0] * p * p + (g[2] + g[4]) * p * q + g[6] * q * q
    cdef double f1 = g[1] * p * p + (g[3] + g[5]) * p * q + g[7] * q * q
    if kind == FRAME:
        out[0] = x * p
        out[1] = x * q
        out[2] = -f0
        out[3] = -f1
    elif kind == COORDINATE:
        out[0] = p
        out[1] = q
        out[2] = -(f0 - p * p) / x
        out[3] = -(f1 - p * q) / x
    else:
        out[0] = p
        out[1] = q
        out[2] = -f0
        out[3] = -f1


def integrate_geodesic(int kind, gamma, y0, t_eval, double rtol, double atol,
                       double hmax, double blowup, long max_steps=1000000):
    cdef const double[::1] gv = np.ascontiguousarray(gamma, dtype=np.float64).ravel()
    cdef const double[::1] te = np.ascontiguousarray(t_eval, dtype=np.float64)
    cdef Py_ssize_t m = te.shape[0]
    out_arr = np.full((m, 4), np.nan)
    cdef double[:, ::1] out = out_arr
    cdef double g[8]
    cdef double s[4]
    cdef double st[4]
    cdef double snew[4]
    cdef double k1[4]
    cdef double k2[4]
    cdef double k3[4]
    cdef double k4[4]
    cdef double k5[4]
    cdef double k6[4]
    cdef double k7[4]
    cdef int c
    cdef Py_ssize_t idx = 1
    cdef long steps = 0
    cdef double t, direction, h, target, remaining, step, hs, err, e, sc, fac, mx
    cdef bint last
    for c in range(8):
        g[c] = gv[c]
    for c in range(4):
        s[c] = float(y0[c])
        out[0, c] = s[c]
    t = te[0]
    if m == 1:
        return out_arr, 1, t, 0
    direction = 1.0 if te[m - 1] >= t else -1.0
    h = min(hmax, 1e-3 * max(1.0, fabs(te[m - 1] - t)))
    rhs(kind, g, s, k1)
    while idx < m:
        target = te[idx]
        if steps >= max_steps:
            return out_arr, idx, t, 3
        remaining = (target - t) * direction
        last = h >= remaining
        step = remaining if last else h
        hs = step * direction
        for c in range(4):
            st[c] = s[c] + hs * A21 * k1[c]
        rhs(kind, g, st, k2)
        for c in range(4):
            st[c] = s[c] + hs * (A31 * k1[c] + A32 * k2[c])
        rhs(kind, g, st, k3)
        for c in range(4):
            st[c] = s[c] + hs * (A41 * k1[c] + A42 * k2[c] + A43 * k3[c])
        rhs(kind, g, st, k4)
        for c in range(4):
            st[c] = s[c] + hs * (A51 * k1[c] + A52 * k2[c] + A53 * k3[c] + A54 * k4[c])
        rhs(kind, g, st, k5)
        for c in range(4):
            st[c] = s[c] + hs * (A61 * k1[c] + A62 * k2[c] + A63 * k3[c] + A64 * k4[c] + A65 * k5[c])
        rhs(kind, g, st, k6)
        for c in range(4):
            snew[c] = s[c] + hs * (A71 * k1[c] + A73 * k3[c] + A74 * k4[c] + A75 * k5[c] + A76 * k6[c])
        rhs(kind, g, snew, k7)
        err = 0.0
        for c in range(4):
            e = hs * (E1 * k1[c] + E3 * k3[c] + E4 * k4[c] + E5 * k5[c] + E6 * k6[c] + E7 * k7[c])
            sc = atol + rtol * max(fabs(s[c]), fabs(snew[c]))
            err += (e / sc) * (e / sc)
        err = sqrt(err / 4)
        steps += 1
        if not isfinite(err):
            err = 1e10
        if err <= 1.0:
            t = target if last else t + hs
            mx = 0.0
            for c in range(4):
                s[c] = snew[c]
                k1[c] = k7[c]
                mx = max(mx, fabs(s[c]))
            if mx > blowup:
                return out_arr, idx, t, 1
            if last:
                for c in range(4):
                    out[idx, c] = s[c]
                idx += 1
            else:
                fac = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * pow(err, -0.2)))
                h = min(hmax, h * fac)
        else:
            h = step * max(0.2, 0.9 * pow(err, -0.2))
        if h < 1e-14 * max(1.0, fabs(t)):
            return out_arr, idx, t, 2
    return out_arr, m, t, 0


def lsa_residuals(gamma, c):
    cdef const double[:, :, ::1] g = np.ascontiguousarray(gamma, dtype=np.float64)
    cdef const double[:, :, ::1] cc = np.ascontiguousarray(c, dtype=np.float64)
    cdef Py_ssize_t n = g.shape[0], i, j, k, l, m
    cdef double sym = 0.0, tors = 0.0, a, b, v
    for i in range(n):
        for j in range(n):
            for l in range(n):
                v = fabs(g[i, j, l] - g[j, i, l] - cc[i, j, l])
                if v > tors:
                    tors = v
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(n):
                for l in range(n):
                    a = 0.0
                    for m in range(n):
                        # (ij)k - i(jk) - (ji)k + j(ik)
                        a += (g[i, j, m] - g[j, i, m]) * g[m, k, l] - g[j, k, m] * g[i, m, l] + g[i, k, m] * g[j, m, l]
                    v = fabs(a)
                    if v > sym:
                        sym = v
    return sym, tors


def assoc_residual(gamma):
    cdef const double[:, :, ::1] g = np.ascontiguousarray(gamma, dtype=np.float64)
    cdef Py_ssize_t n = g.shape[0], i, j, k, l, m
    cdef double worst = 0.0, a
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for l in range(n):
                    a = 0.0
                    for m in range(n):
                        a += g[i, j, m] * g[m, k, l] - g[j, k, m] * g[i, m, l]
                    if fabs(a) > worst:
                        worst = fabs(a)
    return worst
