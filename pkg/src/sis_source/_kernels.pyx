# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: BFS, susceptible sets, and the state-space Viterbi sweep.

Mirrors ``_pykernels`` function for function.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport INFINITY

cnp.import_array()

NAME = "cython"


def bfs(const cnp.int64_t[::1] indptr, const cnp.int64_t[::1] indices, Py_ssize_t source):
    return bfs_parents(indptr, indices, source)[0]


def bfs_parents(const cnp.int64_t[::1] indptr, const cnp.int64_t[::1] indices,
                Py_ssize_t source):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    dist_arr = np.full(n, -1, dtype=np.int64)
    parent_arr = np.full(n, -1, dtype=np.int64)
    queue_arr = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t[::1] dist = dist_arr
    cdef cnp.int64_t[::1] parent = parent_arr
    cdef cnp.int64_t[::1] queue = queue_arr
    cdef Py_ssize_t head = 0, tail = 0, x, y, k
    dist[source] = 0
    parent[source] = source
    queue[tail] = source
    tail += 1
    while head < tail:
        x = queue[head]
        head += 1
        for k in range(indptr[x], indptr[x + 1]):
            y = indices[k]
            if dist[y] < 0:
                dist[y] = dist[x] + 1
                parent[y] = x
                queue[tail] = y
                tail += 1
    return dist_arr, parent_arr


def susceptible(const cnp.int64_t[::1] indptr, const cnp.int64_t[::1] indices, infected):
    cdef cnp.int64_t[::1] inf = np.ascontiguousarray(infected, dtype=np.int64)
    cdef Py_ssize_t m = inf.shape[0], i, k, x, count = 0
    if m == 0:
        return np.empty(0, dtype=np.int64)
    out_arr = np.empty(m + indptr[indptr.shape[0] - 1], dtype=np.int64)
    cdef cnp.int64_t[::1] out = out_arr
    for i in range(m):
        x = inf[i]
        out[count] = x
        count += 1
        for k in range(indptr[x], indptr[x + 1]):
            out[count] = indices[k]
            count += 1
    return np.unique(out_arr[:count])


def state_closure(nbmask):
    cdef Py_ssize_t n = len(nbmask)
    cdef Py_ssize_t size = 1 << n, a
    cdef cnp.int64_t[::1] nb = np.ascontiguousarray(nbmask, dtype=np.int64)
    closure_arr = np.zeros(size, dtype=np.int64)
    cdef cnp.int64_t[::1] closure = closure_arr
    cdef cnp.int64_t low
    for a in range(1, size):
        low = a & -a
        closure[a] = closure[a ^ low] | nb[_bit_index(low)]
    return closure_arr


cdef inline Py_ssize_t _bit_index(cnp.int64_t low) nogil:
    cdef Py_ssize_t i = 0
    while low > 1:
        low >>= 1
        i += 1
    return i


def popcounts(Py_ssize_t n):
    cdef Py_ssize_t size = 1 << n, a
    pc_arr = np.zeros(size, dtype=np.int64)
    cdef cnp.int64_t[::1] pc = pc_arr
    for a in range(1, size):
        pc[a] = pc[a >> 1] + (a & 1)
    return pc_arr


def viterbi_forward(const cnp.int64_t[::1] closure, const cnp.int64_t[::1] exposure,
                    const cnp.int64_t[::1] pc, Py_ssize_t start, Py_ssize_t t,
                    double lnq, double ln1q,
                    const cnp.int64_t[::1] forbid, const cnp.int64_t[::1] require):
    cdef Py_ssize_t size = closure.shape[0]
    cdef Py_ssize_t n = 0
    while (1 << n) < size:
        n += 1
    table_arr = np.full((t + 1, size), -INFINITY)
    best_arr = np.empty(size)
    cdef double[:, ::1] table = table_arr
    cdef double[::1] best = best_arr
    cdef Py_ssize_t tau, a, b, i, bit, base
    cdef cnp.int64_t off, on
    cdef double w, gain = lnq - ln1q
    table[0, start] = 0.0
    for tau in range(t):
        for a in range(size):
            best[a] = -INFINITY
        for a in range(size):
            w = table[tau, a]
            if w == -INFINITY:
                continue
            w = w + exposure[a] * ln1q
            b = closure[a]
            if w > best[b]:
                best[b] = w
        for i in range(n):
            bit = 1 << i
            for base in range(0, size, 2 * bit):
                for b in range(base, base + bit):
                    if best[b + bit] > best[b]:
                        best[b] = best[b + bit]
        off = forbid[tau + 1]
        on = require[tau + 1]
        for b in range(size):
            if (b & off) or (b & on) != on:
                continue
            table[tau + 1, b] = best[b] + pc[b] * gain
    return table_arr
