# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Row reduction over prime fields on dense int64 buffers.

Hot kernel behind rank / kernel computations: everything upstream
(tangent-space dimensions, quotient dimensions, stratum condition ranks)
bottoms out in RREF over F_p.
"""

import numpy as np


cdef long long _inv_mod(long long a, long long p):
    cdef long long t = 0, newt = 1, r = p, newr = a % p
    cdef long long q, tmp
    while newr != 0:
        q = r / newr
        tmp = t - q * newt
        t = newt
        newt = tmp
        tmp = r - q * newr
        r = newr
        newr = tmp
    if t < 0:
        t += p
    return t


def rref_inplace(long long[:, ::1] a, long long p, long long[::1] pivots):
    """Reduce `a` to RREF mod p in place; fill pivot columns; return rank."""
    cdef Py_ssize_t nrows = a.shape[0]
    cdef Py_ssize_t ncols = a.shape[1]
    cdef Py_ssize_t r = 0, col, i, j, piv
    cdef long long inv, factor, v
    for col in range(ncols):
        if r >= nrows:
            break
        piv = -1
        for i in range(r, nrows):
            if a[i, col] % p != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for j in range(ncols):
                v = a[r, j]
                a[r, j] = a[piv, j]
                a[piv, j] = v
        inv = _inv_mod(a[r, col], p)
        for j in range(col, ncols):
            a[r, j] = (a[r, j] * inv) % p
        for i in range(nrows):
            if i == r:
                continue
            factor = a[i, col] % p
            if factor != 0:
                for j in range(col, ncols):
                    a[i, j] = (a[i, j] - factor * a[r, j]) % p
                    if a[i, j] < 0:
                        a[i, j] += p
        pivots[r] = col
        r += 1
    return r
