# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled versions of the hot loops. Signatures mirror ``_fallback.py``."""
import math

import numpy as np

cimport numpy as cnp
from libc.math cimport lgamma

cnp.import_array()


def composition_sums(values, logp, long n):
    cdef const double[::1] v = np.ascontiguousarray(values, dtype=np.float64)
    cdef const double[::1] lp = np.ascontiguousarray(logp, dtype=np.float64)
    cdef Py_ssize_t k = v.shape[0]
    cdef Py_ssize_t count = math.comb(n + k - 1, k - 1)
    cdef cnp.ndarray sums_arr = np.empty(count)
    cdef cnp.ndarray logw_arr = np.empty(count)
    cdef double[::1] sums = sums_arr
    cdef double[::1] logw = logw_arr
    cdef double[::1] lg = np.array([lgamma(q + 1.0) for q in range(n + 1)])
    cdef long[::1] c = np.zeros(k, dtype=np.int_)
    cdef Py_ssize_t idx = 0, i, j
    cdef double s, w
    cdef long tail
    c[0] = n
    while True:
        s = 0.0
        w = lg[n]
        for i in range(k):
            s += c[i] * v[i]
            w += c[i] * lp[i] - lg[c[i]]
        sums[idx] = s
        logw[idx] = w
        idx += 1
        if k == 1 or c[k - 1] == n:
            break
        j = k - 2
        while c[j] == 0:
            j -= 1
        c[j] -= 1
        tail = c[k - 1] + 1
        c[k - 1] = 0
        c[j + 1] = tail
    return sums_arr, logw_arr


def merge_sorted(values, probs, double tol):
    cdef const double[::1] v = np.ascontiguousarray(values, dtype=np.float64)
    cdef const double[::1] p = np.ascontiguousarray(probs, dtype=np.float64)
    cdef Py_ssize_t m = v.shape[0]
    cdef cnp.ndarray out_v_arr = np.empty(m)
    cdef cnp.ndarray out_p_arr = np.empty(m)
    cdef double[::1] out_v = out_v_arr
    cdef double[::1] out_p = out_p_arr
    cdef Py_ssize_t i, g = -1
    cdef double anchor = 0.0, acc = 0.0, comp = 0.0, t, x
    for i in range(m):
        x = p[i]
        if g < 0 or v[i] - anchor > tol:
            if g >= 0:
                out_p[g] = acc + comp
            g += 1
            anchor = v[i]
            out_v[g] = anchor
            acc = x
            comp = 0.0
        else:
            # Neumaier summation inside a run
            t = acc + x
            if abs(acc) >= abs(x):
                comp += (acc - t) + x
            else:
                comp += (x - t) + acc
            acc = t
    if g >= 0:
        out_p[g] = acc + comp
    return out_v_arr[: g + 1].copy(), out_p_arr[: g + 1].copy()


def lattice_power(shifts, probs, long n):
    cdef const long[::1] s = np.ascontiguousarray(shifts, dtype=np.int_)
    cdef const double[::1] p = np.ascontiguousarray(probs, dtype=np.float64)
    cdef Py_ssize_t k = s.shape[0], i, j, step
    cdef long top = 0
    for i in range(k):
        if s[i] > top:
            top = s[i]
    cdef Py_ssize_t width = n * top + 1
    cdef cnp.ndarray a_arr = np.zeros(width)
    cdef cnp.ndarray b_arr = np.zeros(width)
    cdef double[::1] cur = a_arr
    cdef double[::1] nxt = b_arr
    cdef double[::1] tmp
    cdef Py_ssize_t size = 1, new_size
    cdef double pi
    cdef long si
    cur[0] = 1.0
    for step in range(n):
        new_size = size + top
        for j in range(new_size):
            nxt[j] = 0.0
        for i in range(k):
            si = s[i]
            pi = p[i]
            for j in range(size):
                nxt[j + si] += pi * cur[j]
        tmp = cur
        cur = nxt
        nxt = tmp
        size = new_size
    return np.asarray(cur)[:size].copy()


def lattice_power_3d(shifts, probs, long n, box):
    cdef const long[:, ::1] s = np.ascontiguousarray(shifts, dtype=np.int_)
    cdef const double[::1] p = np.ascontiguousarray(probs, dtype=np.float64)
    cdef Py_ssize_t b0 = box[0], b1 = box[1], b2 = box[2]
    cdef cnp.ndarray a_arr = np.zeros((b0, b1, b2))
    cdef cnp.ndarray c_arr = np.zeros((b0, b1, b2))
    cdef double[:, :, ::1] cur = a_arr
    cdef double[:, :, ::1] nxt = c_arr
    cdef double[:, :, ::1] tmp
    cdef Py_ssize_t k = s.shape[0], i, a, b, c, step
    cdef long s0, s1, s2
    cdef double pi
    cur[0, 0, 0] = 1.0
    for step in range(n):
        nxt[:, :, :] = 0.0
        for i in range(k):
            s0 = s[i, 0]
            s1 = s[i, 1]
            s2 = s[i, 2]
            if s0 >= b0 or s1 >= b1 or s2 >= b2:
                continue
            pi = p[i]
            for a in range(b0 - s0):
                for b in range(b1 - s1):
                    for c in range(b2 - s2):
                        nxt[a + s0, b + s1, c + s2] += pi * cur[a, b, c]
        tmp = cur
        cur = nxt
        nxt = tmp
    return np.asarray(cur).copy()


def ml_error_masses(lik, double tie_rtol):
    cdef const double[:, :, :, ::1] L = np.ascontiguousarray(lik, dtype=np.float64)
    cdef Py_ssize_t m1 = L.shape[0], m2 = L.shape[1], n = L.shape[2], ysz = L.shape[3]
    cdef Py_ssize_t pairs = m1 * m2
    cdef cnp.ndarray err_arr = np.zeros(pairs)
    cdef cnp.ndarray tot_arr = np.zeros(pairs)
    cdef double[::1] err = err_arr
    cdef double[::1] tot = tot_arr
    cdef double[::1] err_c = np.zeros(pairs)
    cdef double[::1] tot_c = np.zeros(pairs)
    cdef double[::1] like = np.empty(pairs)
    cdef long[::1] ys = np.zeros(n, dtype=np.int_)
    cdef Py_ssize_t q, a, b, i, best, pos
    cdef double x, best_val, t, acc
    while True:
        best_val = 0.0
        for a in range(m1):
            for b in range(m2):
                x = 1.0
                for i in range(n):
                    x *= L[a, b, i, ys[i]]
                like[a * m2 + b] = x
                if x > best_val:
                    best_val = x
        best = 0
        for q in range(pairs):
            if like[q] >= best_val * (1.0 - tie_rtol):
                best = q
                break
        for q in range(pairs):
            x = like[q]
            acc = tot[q]
            t = acc + x
            if abs(acc) >= abs(x):
                tot_c[q] += (acc - t) + x
            else:
                tot_c[q] += (x - t) + acc
            tot[q] = t
            if q != best:
                acc = err[q]
                t = acc + x
                if abs(acc) >= abs(x):
                    err_c[q] += (acc - t) + x
                else:
                    err_c[q] += (x - t) + acc
                err[q] = t
        # next output sequence, last symbol fastest
        pos = n - 1
        while pos >= 0:
            ys[pos] += 1
            if ys[pos] < ysz:
                break
            ys[pos] = 0
            pos -= 1
        if pos < 0:
            break
    for q in range(pairs):
        err[q] += err_c[q]
        tot[q] += tot_c[q]
    return err_arr.reshape(m1, m2), tot_arr.reshape(m1, m2)
