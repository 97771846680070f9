# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels.

Same contract as ``numpy_backend``: batched Gaussian->Fock recurrence and
weighted sum-sector accumulation.  The accumulation runs samples-outer with
Kahan-compensated summation per block entry, in a fixed order, so it is
deterministic and accurate for large sample counts.
"""

import numpy as np

backend_name = "cython"


def fock_batch(m, r, w, c_norm, int cutoff):
    arrs = np.broadcast_arrays(
        np.asarray(m, dtype=np.complex128),
        np.asarray(r, dtype=np.complex128),
        np.asarray(w, dtype=np.complex128),
        np.asarray(c_norm, dtype=np.complex128),
    )
    cdef const double complex[::1] mv = np.ascontiguousarray(np.atleast_1d(arrs[0]).ravel())
    cdef const double complex[::1] rv = np.ascontiguousarray(np.atleast_1d(arrs[1]).ravel())
    cdef const double complex[::1] wv = np.ascontiguousarray(np.atleast_1d(arrs[2]).ravel())
    cdef const double complex[::1] cv = np.ascontiguousarray(np.atleast_1d(arrs[3]).ravel())
    cdef Py_ssize_t n = mv.shape[0]
    cdef int d = cutoff + 1
    out = np.zeros((n, d, d), dtype=np.complex128)
    cdef double complex[:, :, ::1] s = out
    cdef double[::1] sq = np.sqrt(np.arange(d, dtype=np.float64))
    cdef Py_ssize_t i
    cdef int k, l
    cdef double complex mm, rr, ww, mb, wb, acc
    for i in range(n):
        mm = mv[i]
        rr = rv[i]
        ww = wv[i]
        mb = mm.conjugate()
        wb = ww.conjugate()
        s[i, 0, 0] = cv[i]
        for l in range(cutoff):
            acc = wb * s[i, 0, l]
            if l > 0:
                acc = acc + sq[l] * mb * s[i, 0, l - 1]
            s[i, 0, l + 1] = acc / sq[l + 1]
        for k in range(cutoff):
            for l in range(d):
                acc = ww * s[i, k, l]
                if k > 0:
                    acc = acc + sq[k] * mm * s[i, k - 1, l]
                if l > 0:
                    acc = acc + sq[l] * rr * s[i, k, l - 1]
                s[i, k + 1, l] = acc / sq[k + 1]
    return out


def eta_accumulate(fa, fb, weights, int cutoff):
    cdef const double complex[:, :, ::1] a = np.ascontiguousarray(fa, dtype=np.complex128)
    cdef const double complex[:, :, ::1] b = np.ascontiguousarray(fb, dtype=np.complex128)
    cdef const double[::1] wts = np.ascontiguousarray(weights, dtype=np.float64)
    cdef Py_ssize_t n = a.shape[0]
    cdef int d = cutoff + 1
    cdef Py_ssize_t tot = 0
    cdef int j, k1, k2
    for j in range(d):
        tot += (j + 1) * (j + 1)
    acc_arr = np.zeros(tot, dtype=np.complex128)
    comp_arr = np.zeros(tot, dtype=np.complex128)
    cdef double complex[::1] acc = acc_arr
    cdef double complex[::1] comp = comp_arr
    cdef Py_ssize_t i, p
    cdef double wgt
    cdef double complex term, y, t
    for i in range(n):
        wgt = wts[i]
        p = 0
        for j in range(d):
            for k1 in range(j + 1):
                for k2 in range(j + 1):
                    term = wgt * a[i, k1, k2] * b[i, j - k1, j - k2]
                    y = term - comp[p]
                    t = acc[p] + y
                    comp[p] = (t - acc[p]) - y
                    acc[p] = t
                    p += 1
    blocks = []
    p = 0
    for j in range(d):
        blocks.append(acc_arr[p : p + (j + 1) * (j + 1)].reshape(j + 1, j + 1).copy())
        p += (j + 1) * (j + 1)
    return blocks
