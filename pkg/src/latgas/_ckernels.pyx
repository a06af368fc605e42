# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled enumeration kernels; see ``_pykernels`` for the reference semantics."""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t

cnp.import_array()

ctypedef double complex cplx


cdef inline int64_t _spread(int64_t index, const int64_t[:] positions) noexcept nogil:
    cdef int64_t m = 0
    cdef Py_ssize_t j = 0
    while index:
        if index & 1:
            m |= (<int64_t>1) << positions[j]
        index >>= 1
        j += 1
    return m


def config_weights(free_sites, int64_t base, int64_t boundary, z, emasks, evals):
    # subset DP: adding the top free site t to S' multiplies in z(t) and the
    # entries E ∋ t with E ⊂ S ∪ boundary; nothing else changes
    cdef const int64_t[:] fs = np.ascontiguousarray(free_sites, dtype=np.int64)
    cdef const cplx[:] zz = np.ascontiguousarray(z, dtype=np.complex128)
    cdef const int64_t[:] em = np.ascontiguousarray(emasks, dtype=np.int64)
    cdef const cplx[:] ev = np.ascontiguousarray(evals, dtype=np.complex128)
    cdef Py_ssize_t k = fs.shape[0], m = em.shape[0], n = zz.shape[0]
    cdef Py_ssize_t size = (<Py_ssize_t>1) << k
    out_arr = np.empty(size, dtype=np.complex128)
    cdef cplx[:] out = out_arr
    S_arr = np.empty(size, dtype=np.int64)
    cdef int64_t[:] Ss = S_arr
    # entries grouped by the free position they contain
    counts = np.zeros(k + 1, dtype=np.int64)
    cdef int64_t[:] ptr = counts
    cdef Py_ssize_t j, e, idx, prev, pos
    for j in range(k):
        for e in range(m):
            if (em[e] >> fs[j]) & 1:
                ptr[j + 1] += 1
    for j in range(k):
        ptr[j + 1] += ptr[j]
    by_pos_arr = np.empty(max(ptr[k], 1), dtype=np.int64)
    cdef int64_t[:] by_pos = by_pos_arr
    fill_arr = np.array(counts[:k], dtype=np.int64)
    cdef int64_t[:] fill = fill_arr
    for j in range(k):
        for e in range(m):
            if (em[e] >> fs[j]) & 1:
                by_pos[fill[j]] = e
                fill[j] += 1
    cdef int64_t S, closure, t
    cdef cplx w
    with nogil:
        # idx = 0: S = base
        if base & boundary:
            w = 0
        else:
            w = 1
            for j in range(n):
                if (base >> j) & 1:
                    w = w * zz[j]
            closure = base | boundary
            for e in range(m):
                if (em[e] & ~closure) == 0 and (em[e] & base) != 0:
                    w = w * ev[e]
        out[0] = w
        Ss[0] = base
        for idx in range(1, size):
            j = 0
            while (idx >> (j + 1)) != 0:
                j += 1
            prev = idx ^ ((<Py_ssize_t>1) << j)
            t = fs[j]
            S = Ss[prev] | ((<int64_t>1) << t)
            Ss[idx] = S
            w = out[prev]
            if w == 0 or (boundary >> t) & 1:
                out[idx] = 0
                continue
            w = w * zz[t]
            closure = S | boundary
            for pos in range(ptr[j], ptr[j + 1]):
                e = by_pos[pos]
                if (em[e] & ~closure) == 0:
                    w = w * ev[e]
            out[idx] = w
    return out_arr


cdef void _mobius_inplace(cplx* a, Py_ssize_t k, int sign) noexcept nogil:
    cdef Py_ssize_t i, X, size = (<Py_ssize_t>1) << k
    for i in range(k):
        for X in range(size):
            if (X >> i) & 1:
                if sign > 0:
                    a[X] = a[X] + a[X ^ ((<Py_ssize_t>1) << i)]
                else:
                    a[X] = a[X] - a[X ^ ((<Py_ssize_t>1) << i)]


def subset_zeta(a):
    out_arr = np.array(a, dtype=np.complex128)
    cdef cplx[:] out = out_arr
    cdef Py_ssize_t k = (<Py_ssize_t>out.shape[0]).bit_length() - 1
    _mobius_inplace(&out[0], k, 1)
    return out_arr


def subset_mobius(a):
    out_arr = np.array(a, dtype=np.complex128)
    cdef cplx[:] out = out_arr
    cdef Py_ssize_t k = (<Py_ssize_t>out.shape[0]).bit_length() - 1
    _mobius_inplace(&out[0], k, -1)
    return out_arr


def superset_mobius(a, int64_t bits):
    out_arr = np.array(a, dtype=np.complex128)
    cdef cplx[:] out = out_arr
    cdef Py_ssize_t size = out.shape[0]
    cdef Py_ssize_t k = (<Py_ssize_t>size).bit_length() - 1
    cdef Py_ssize_t i, X
    with nogil:
        for i in range(k):
            if (bits >> i) & 1:
                for X in range(size):
                    if not (X >> i) & 1:
                        out[X] = out[X] - out[X | ((<Py_ssize_t>1) << i)]
    return out_arr


def ks_operator(u_sites, int64_t lam, selector, z, emasks, evals):
    cdef const int64_t[:] us = np.ascontiguousarray(u_sites, dtype=np.int64)
    cdef const int64_t[:] sel = np.ascontiguousarray(selector, dtype=np.int64)
    cdef const cplx[:] zz = np.ascontiguousarray(z, dtype=np.complex128)
    cdef const int64_t[:] em = np.ascontiguousarray(emasks, dtype=np.int64)
    cdef const cplx[:] ev = np.ascontiguousarray(evals, dtype=np.complex128)
    cdef Py_ssize_t u = us.shape[0], m = em.shape[0]
    cdef Py_ssize_t size = (<Py_ssize_t>1) << u
    cdef Py_ssize_t X, j, i, e, k, nnz = 1
    cdef int64_t T, free, M, cols_full, sbit, closure, E
    cdef int s
    cdef int64_t[64] pos

    counts_arr = np.empty(size, dtype=np.int64)
    cdef int64_t[:] counts = counts_arr
    counts[0] = 1
    for X in range(1, size):
        T = X & ~((<int64_t>1) << sel[X])
        free = lam & ~T
        counts[X] = (<int64_t>1) << _popcount(free)
        nnz += counts[X]
    indptr_arr = np.zeros(size + 1, dtype=np.int64)
    cdef int64_t[:] indptr = indptr_arr
    for X in range(size):
        indptr[X + 1] = indptr[X] + counts[X]
    indices_arr = np.empty(nnz, dtype=np.int64)
    data_arr = np.empty(nnz, dtype=np.complex128)
    cdef int64_t[:] indices = indices_arr
    cdef cplx[:] data = data_arr
    cdef const int64_t[:] pos_view
    cdef Py_ssize_t off
    cdef cplx kap

    indices[0] = 0
    data[0] = 1
    with nogil:
        for X in range(1, size):
            s = <int>sel[X]
            T = X & ~((<int64_t>1) << s)
            free = lam & ~T
            k = 0
            for i in range(u):
                if (free >> i) & 1:
                    pos[k] = i
                    k += 1
            sbit = (<int64_t>1) << us[s]
            off = indptr[X]
            for j in range((<Py_ssize_t>1) << k):
                M = 0
                for i in range(k):
                    if (j >> i) & 1:
                        M |= (<int64_t>1) << pos[i]
                indices[off + j] = T | M
                if (M >> s) & 1:
                    data[off + j] = 0
                    continue
                closure = sbit
                for i in range(u):
                    if ((T | M) >> i) & 1:
                        closure |= (<int64_t>1) << us[i]
                kap = 1
                for e in range(m):
                    E = em[e]
                    if (E & sbit) and (E & ~closure) == 0:
                        kap = kap * ev[e]
                data[off + j] = kap
            _mobius_inplace(&data[off], k, -1)
            for j in range((<Py_ssize_t>1) << k):
                data[off + j] = data[off + j] * zz[us[s]]
    return indptr_arr, indices_arr, data_arr


cdef inline int _popcount(int64_t x) noexcept nogil:
    cdef int c = 0
    while x:
        x &= x - 1
        c += 1
    return c
