# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled split search and tree routing.

Arithmetic order mirrors ``_pykernels`` so both backends pick the same splits.
"""
import numpy as np
cimport numpy as cnp

cnp.import_array()


def best_split(const double[:, ::1] X, const double[:, ::1] Y,
               const cnp.int64_t[::1] idx, Py_ssize_t min_leaf):
    cdef Py_ssize_t n = idx.shape[0]
    cdef Py_ssize_t d = X.shape[1]
    cdef Py_ssize_t r = Y.shape[1]
    cdef Py_ssize_t f, i, k, row, nl, nr
    cdef double sl_sq, sr_sq, score, v, vnext, thr
    cdef double best_score = -1.0
    cdef Py_ssize_t best_feat = -1
    cdef double best_thr = 0.0
    cdef cnp.int64_t[::1] order
    cdef double[::1] total = np.zeros(r)
    cdef double[::1] sl = np.zeros(r)
    cdef double[::1] col = np.empty(n)

    for i in range(n):
        row = idx[i]
        for k in range(r):
            total[k] += Y[row, k]

    for f in range(d):
        for i in range(n):
            col[i] = X[idx[i], f]
        order = np.argsort(np.asarray(col), kind="stable").astype(np.int64)
        for k in range(r):
            sl[k] = 0.0
        for i in range(n - 1):
            row = idx[order[i]]
            for k in range(r):
                sl[k] += Y[row, k]
            v = col[order[i]]
            vnext = col[order[i + 1]]
            if v == vnext:
                continue
            nl = i + 1
            nr = n - nl
            if nl < min_leaf or nr < min_leaf:
                continue
            sl_sq = sl[0] * sl[0]
            sr_sq = (total[0] - sl[0]) * (total[0] - sl[0])
            for k in range(1, r):
                sl_sq += sl[k] * sl[k]
                sr_sq += (total[k] - sl[k]) * (total[k] - sl[k])
            score = sl_sq / nl + sr_sq / nr
            if best_feat < 0 or score > best_score:
                thr = (v + vnext) / 2.0
                if thr >= vnext:
                    thr = v
                best_score = score
                best_feat = f
                best_thr = thr
    return best_feat, best_thr, best_score


def route(const double[:, ::1] X, const cnp.int64_t[::1] feature,
          const double[::1] threshold, const cnp.int64_t[::1] left,
          const cnp.int64_t[::1] right):
    cdef Py_ssize_t n = X.shape[0]
    cdef Py_ssize_t i
    cdef cnp.int64_t node
    out = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t[::1] leaf = out
    for i in range(n):
        node = 0
        while feature[node] >= 0:
            if X[i, feature[node]] <= threshold[node]:
                node = left[node]
            else:
                node = right[node]
        leaf[i] = node
    return out
