# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels. Semantics match ``kerrkernel._pycore`` exactly."""
import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin, M_PI, INFINITY

cnp.import_array()

cdef double TAU = 1e-12


cdef inline double _pair_value(double a1, double a2, double b1, double b2,
                               const double[::1] w, double[::1] re1, double[::1] im1,
                               double[::1] re2, double[::1] im2) noexcept nogil:
    cdef Py_ssize_t dim = w.shape[0]
    cdef Py_ssize_t n, m
    cdef double d1 = b1 - a1, d2 = b2 - a2, d3 = b1 * b2 - a1 * a2
    cdef double ph, sr = 0.0, si = 0.0
    cdef double cr, ci, tr, ti, tmp, accr, acci
    for n in range(dim):
        ph = M_PI * n * n * d1
        re1[n] = w[n] * cos(ph)
        im1[n] = w[n] * sin(ph)
        ph = M_PI * n * n * d2
        re2[n] = w[n] * cos(ph)
        im2[n] = w[n] * sin(ph)
    for n in range(dim):
        # cross factor exp(2 i pi n m d3) built by repeated multiplication in m
        ph = 2.0 * M_PI * n * d3
        cr = cos(ph)
        ci = sin(ph)
        tr = 1.0
        ti = 0.0
        accr = 0.0
        acci = 0.0
        for m in range(dim):
            accr += re2[m] * tr - im2[m] * ti
            acci += re2[m] * ti + im2[m] * tr
            tmp = tr * cr - ti * ci
            ti = tr * ci + ti * cr
            tr = tmp
        sr += re1[n] * accr - im1[n] * acci
        si += re1[n] * acci + im1[n] * accr
    return sr * sr + si * si


def kerr2_closed_gram(a, b, weights, bint symmetric=False):
    cdef const double[:, ::1] A = np.ascontiguousarray(a, dtype=np.float64)
    cdef const double[:, ::1] B = np.ascontiguousarray(b, dtype=np.float64)
    cdef const double[::1] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef Py_ssize_t na = A.shape[0], nb = B.shape[0], i, j, jstart
    out_arr = np.empty((na, nb), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef double[::1] re1 = np.empty(w.shape[0]), im1 = np.empty(w.shape[0])
    cdef double[::1] re2 = np.empty(w.shape[0]), im2 = np.empty(w.shape[0])
    with nogil:
        for i in range(na):
            jstart = i if symmetric else 0
            for j in range(jstart, nb):
                out[i, j] = _pair_value(A[i, 0], A[i, 1], B[j, 0], B[j, 1], w, re1, im1, re2, im2)
                if symmetric:
                    out[j, i] = out[i, j]
    return out_arr


def smo_solve(K, y, double C, double tol=1e-3, Py_ssize_t max_iter=1000000, bint track_objective=False):
    cdef const double[:, ::1] Kv = np.ascontiguousarray(K, dtype=np.float64)
    y_arr = np.ascontiguousarray(y, dtype=np.float64)
    cdef const double[::1] yv = y_arr
    cdef Py_ssize_t n = yv.shape[0], t, i, j, it = 0
    alpha_arr = np.zeros(n)
    grad_arr = -np.ones(n)
    cdef double[::1] alpha = alpha_arr
    cdef double[::1] grad = grad_arr
    cdef double gmax, gmin, v, a, b, best, quad, old_i, old_j, ai, aj, delta, diff, total, di, dj, obj
    history = []
    while it < max_iter:
        i = -1
        j = -1
        gmax = -INFINITY
        gmin = INFINITY
        for t in range(n):
            if (yv[t] > 0 and alpha[t] < C) or (yv[t] < 0 and alpha[t] > 0):
                v = -yv[t] * grad[t]
                if v > gmax:
                    gmax = v
                    i = t
        if i < 0:
            break
        best = -INFINITY
        for t in range(n):
            if (yv[t] > 0 and alpha[t] > 0) or (yv[t] < 0 and alpha[t] < C):
                v = -yv[t] * grad[t]
                if v < gmin:
                    gmin = v
                b = gmax - v
                if b > 0:
                    a = Kv[i, i] + Kv[t, t] - 2.0 * Kv[i, t]
                    if a <= 0:
                        a = TAU
                    if b * b / a > best:
                        best = b * b / a
                        j = t
                        quad = a
        if j < 0 or gmax - gmin < tol:
            break
        it += 1
        old_i = alpha[i]
        old_j = alpha[j]
        if yv[i] != yv[j]:
            delta = (-grad[i] - grad[j]) / quad
            diff = old_i - old_j
            ai = old_i + delta
            aj = old_j + delta
            if diff > 0:
                if aj < 0:
                    aj = 0.0
                    ai = diff
            elif ai < 0:
                ai = 0.0
                aj = -diff
            if diff > 0:
                if ai > C:
                    ai = C
                    aj = C - diff
            elif aj > C:
                aj = C
                ai = C + diff
        else:
            delta = (grad[i] - grad[j]) / quad
            total = old_i + old_j
            ai = old_i - delta
            aj = old_j + delta
            if total > C:
                if ai > C:
                    ai = C
                    aj = total - C
            elif aj < 0:
                aj = 0.0
                ai = total
            if total > C:
                if aj > C:
                    aj = C
                    ai = total - C
            elif ai < 0:
                ai = 0.0
                aj = total
        alpha[i] = ai
        alpha[j] = aj
        di = (ai - old_i) * yv[i]
        dj = (aj - old_j) * yv[j]
        for t in range(n):
            grad[t] += yv[t] * (Kv[t, i] * di + Kv[t, j] * dj)
        if track_objective:
            obj = 0.0
            for t in range(n):
                obj += alpha[t] * (grad[t] - 1.0)
            history.append(-0.5 * obj)
    from ._pycore import _bias
    return alpha_arr, _bias(alpha_arr, grad_arr, y_arr, C), it, history
