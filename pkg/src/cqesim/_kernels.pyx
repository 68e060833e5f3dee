# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled statevector kernels.

Same contracts as cqesim.kernels_py; see that module for documentation.
The enumeration is a single fused pass instead of chained numpy masks.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, sin

cnp.import_array()

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil

BACKEND = "compiled"


def excitation_context(int n_qubits, int i, int j, int k, int l, bint fermionic=True):
    if i == j or k == l:
        raise ValueError("pair indices must be distinct")
    if min(i, j, k, l) < 0 or max(i, j, k, l) >= n_qubits:
        raise ValueError("orbital index out of range")

    cdef Py_ssize_t dim = (<Py_ssize_t> 1) << n_qubits
    # two occupation constraints always hold, so 2^(n-2) bounds the count
    cdef Py_ssize_t cap = dim >> 2

    src_arr = np.empty(cap, dtype=np.intp)
    tgt_arr = np.empty(cap, dtype=np.intp)
    sgn_arr = np.empty(cap, dtype=np.float64)
    cdef Py_ssize_t[::1] src = src_arr
    cdef Py_ssize_t[::1] tgt = tgt_arr
    cdef double[::1] sgn = sgn_arr

    cdef unsigned long long bk = (<unsigned long long> 1) << k
    cdef unsigned long long bl = (<unsigned long long> 1) << l
    cdef unsigned long long bj = (<unsigned long long> 1) << j
    cdef unsigned long long bi = (<unsigned long long> 1) << i
    cdef unsigned long long mk = bk - 1, ml = bl - 1, mj = bj - 1, mi = bi - 1

    cdef Py_ssize_t x, m = 0
    cdef unsigned long long cur
    cdef int par
    with nogil:
        for x in range(dim):
            cur = <unsigned long long> x
            if not (cur & bk):
                continue
            par = __builtin_popcountll(cur & mk) if fermionic else 0
            cur ^= bk
            if not (cur & bl):
                continue
            if fermionic:
                par += __builtin_popcountll(cur & ml)
            cur ^= bl
            if cur & bj:
                continue
            if fermionic:
                par += __builtin_popcountll(cur & mj)
            cur ^= bj
            if cur & bi:
                continue
            if fermionic:
                par += __builtin_popcountll(cur & mi)
            cur ^= bi
            src[m] = x
            tgt[m] = <Py_ssize_t> cur
            sgn[m] = -1.0 if (par & 1) else 1.0
            m += 1
    return src_arr[:m].copy(), tgt_arr[:m].copy(), sgn_arr[:m].copy()


def expectation(const double complex[::1] bra, const double complex[::1] ket,
                const Py_ssize_t[::1] src, const Py_ssize_t[::1] tgt, const double[::1] signs):
    cdef Py_ssize_t m
    cdef double complex acc = 0
    with nogil:
        for m in range(src.shape[0]):
            acc += signs[m] * bra[tgt[m]].conjugate() * ket[src[m]]
    return complex(acc)


def accumulate(double complex[::1] out, const double complex[::1] psi,
               const Py_ssize_t[::1] src, const Py_ssize_t[::1] tgt, const double[::1] signs,
               double complex coeff):
    cdef Py_ssize_t m
    with nogil:
        for m in range(src.shape[0]):
            out[tgt[m]] = out[tgt[m]] + coeff * signs[m] * psi[src[m]]


def apply_givens(double complex[::1] psi,
                 const Py_ssize_t[::1] src, const Py_ssize_t[::1] tgt, const double[::1] signs,
                 double complex amp):
    cdef double r = abs(amp)
    if r == 0.0:
        return
    cdef double c = cos(r)
    cdef double complex u = (amp / r) * sin(r)
    cdef double complex uc = u.conjugate()
    cdef double complex a, b
    cdef Py_ssize_t m
    with nogil:
        for m in range(src.shape[0]):
            a = psi[src[m]]
            b = psi[tgt[m]]
            psi[src[m]] = c * a - uc * signs[m] * b
            psi[tgt[m]] = c * b + u * signs[m] * a


def apply_phase(double complex[::1] psi, const Py_ssize_t[::1] idx, double complex amp):
    cdef double complex phase = np.exp(amp)
    cdef Py_ssize_t m
    with nogil:
        for m in range(idx.shape[0]):
            psi[idx[m]] = psi[idx[m]] * phase


def qwc_degrees(const unsigned long long[::1] xs, const unsigned long long[::1] zs):
    cdef Py_ssize_t n = xs.shape[0]
    deg_arr = np.zeros(n, dtype=np.int64)
    cdef long long[::1] deg = deg_arr
    cdef Py_ssize_t a, b
    cdef unsigned long long xa, za, sa, ov
    with nogil:
        for a in range(n):
            xa = xs[a]
            za = zs[a]
            sa = xa | za
            for b in range(a + 1, n):
                ov = sa & (xs[b] | zs[b])
                if ((xa ^ xs[b]) & ov) == 0 and ((za ^ zs[b]) & ov) == 0:
                    deg[a] += 1
                    deg[b] += 1
    return deg_arr
