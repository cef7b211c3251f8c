# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels; same contracts as ``_kernels_py``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport INFINITY

cnp.import_array()


def hungarian(cost):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] a = np.ascontiguousarray(cost, dtype=np.float64)
    cdef Py_ssize_t n = a.shape[0], m = a.shape[1]
    if n > m:
        raise ValueError("hungarian needs rows <= columns")
    cdef double[::1] u = np.zeros(n + 1)
    cdef double[::1] v = np.zeros(m + 1)
    cdef double[::1] minv = np.empty(m + 1)
    cdef Py_ssize_t[::1] p = np.zeros(m + 1, dtype=np.intp)
    cdef Py_ssize_t[::1] way = np.zeros(m + 1, dtype=np.intp)
    cdef unsigned char[::1] used = np.zeros(m + 1, dtype=np.uint8)
    cdef double[:, ::1] c = a
    cdef Py_ssize_t i, j, j0, j1, i0
    cdef double delta, cur, ui0
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        for j in range(m + 1):
            minv[j] = INFINITY
            used[j] = 0
        while True:
            used[j0] = 1
            i0 = p[j0]
            ui0 = u[i0]
            delta = INFINITY
            j1 = 0
            for j in range(1, m + 1):
                if not used[j]:
                    cur = c[i0 - 1, j - 1] - ui0 - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(m + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while True:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
            if j0 == 0:
                break
    row_to_col = np.full(n, -1, dtype=np.int64)
    for j in range(1, m + 1):
        if p[j]:
            row_to_col[p[j] - 1] = j - 1
    return row_to_col, np.asarray(u[1:]).copy(), np.asarray(v[1:]).copy()


def accumulate_terms(tables, cut_index, Py_ssize_t num_cuts):
    cdef Py_ssize_t nf = len(tables)
    cdef Py_ssize_t f, k, r, term, rest, x, y, cur_len, total = 1
    outs = [np.ascontiguousarray(t, dtype=np.float64) for t in tables]
    for t in outs:
        total *= t.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.zeros(total)
    cdef double[::1] res = out
    cdef double[::1] buf_a = np.empty(total)
    cdef double[::1] buf_b = np.empty(total)
    cdef double[::1] src
    cdef double[::1] dst
    cdef double[:, ::1] tab
    cdef Py_ssize_t[::1] digits = np.zeros(max(num_cuts, 1), dtype=np.intp)
    # flattened per-fragment (cut id, weight) lists
    idx_off = np.zeros(nf + 1, dtype=np.intp)
    for f in range(nf):
        idx_off[f + 1] = idx_off[f] + len(cut_index[f])
    cdef Py_ssize_t[::1] off = idx_off
    cdef Py_ssize_t[::1] cid = np.array([c for ci in cut_index for c in ci] or [0], dtype=np.intp)
    cdef Py_ssize_t[::1] wts = np.array(
        [4 ** (len(ci) - 1 - j) for ci in cut_index for j in range(len(ci))] or [0], dtype=np.intp)
    cdef Py_ssize_t[::1] width = np.array([t.shape[1] for t in outs], dtype=np.intp)
    cdef Py_ssize_t nterms = (<Py_ssize_t>1) << (2 * num_cuts)
    for term in range(nterms):
        rest = term
        for k in range(num_cuts - 1, -1, -1):
            digits[k] = rest & 3
            rest >>= 2
        cur_len = 1
        buf_a[0] = 1.0
        src = buf_a
        dst = buf_b
        for f in range(nf):
            r = 0
            for k in range(off[f], off[f + 1]):
                r += digits[cid[k]] * wts[k]
            tab = outs[f]
            for x in range(cur_len):
                for y in range(width[f]):
                    dst[x * width[f] + y] = src[x] * tab[r, y]
            cur_len *= width[f]
            src, dst = dst, src
        for x in range(total):
            res[x] += src[x]
    return out
