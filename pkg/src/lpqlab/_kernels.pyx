# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled Wigner small-d recurrence.

Same contract as ``_kernels_py.wigner_d_packed``.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin, sqrt, lgamma, exp, pow, fabs

cnp.import_array()


cdef double _edge(double j, double mr, double mc, double ch, double sh) nogil:
    # d^j_{mr,mc} from the explicit sum; at j = max(|mr|, |mc|) one term survives
    cdef double total = 0.0
    cdef double lognum = 0.5 * (lgamma(j + mr + 1) + lgamma(j - mr + 1)
                                + lgamma(j + mc + 1) + lgamma(j - mc + 1))
    cdef int s
    cdef int smin = 0
    cdef int smax = <int>(2 * j + 1)
    cdef double a, b, c, d, sign, ec, es
    for s in range(smin, smax + 1):
        a = j + mc - s
        b = mr - mc + s
        c = j - mr - s
        if a < -1e-9 or b < -1e-9 or c < -1e-9:
            continue
        d = lgamma(a + 1) + lgamma(s + 1) + lgamma(b + 1) + lgamma(c + 1)
        sign = -1.0 if (<long>(b + 0.5)) % 2 else 1.0
        ec = 2 * j + mc - mr - 2 * s
        es = mr - mc + 2 * s
        total += sign * exp(lognum - d) * pow(ch, ec) * pow(sh, es)
    return total


def wigner_d_packed(int two_lmax, double[::1] beta):
    cdef Py_ssize_t nb = beta.shape[0]
    cdef Py_ssize_t total = 0
    cdef int tl
    offsets = np.zeros(two_lmax + 2, dtype=np.int64)
    for tl in range(two_lmax + 1):
        offsets[tl + 1] = offsets[tl] + nb * (tl + 1) * (tl + 1)
    out_np = np.zeros(offsets[two_lmax + 1], dtype=np.float64)
    cdef double[::1] out = out_np
    cdef cnp.int64_t[::1] off = offsets

    cdef int t1, t2, tlo, tcur, dim, r, c
    cdef double m1, m2, l, cb, ch, sh, prev, cur, nxt, num, den
    cdef Py_ssize_t ib
    for t1 in range(-two_lmax, two_lmax + 1):
        for t2 in range(-two_lmax, two_lmax + 1):
            if (t1 - t2) % 2 != 0:
                continue
            m1 = 0.5 * t1
            m2 = 0.5 * t2
            tlo = abs(t1) if abs(t1) > abs(t2) else abs(t2)
            for ib in range(nb):
                cb = cos(beta[ib])
                ch = cos(0.5 * beta[ib])
                sh = sin(0.5 * beta[ib])
                prev = 0.0
                cur = _edge(0.5 * tlo, m1, m2, ch, sh)
                tcur = tlo
                while True:
                    dim = tcur + 1
                    r = (tcur - t1) // 2
                    c = (tcur - t2) // 2
                    out[off[tcur] + (ib * dim + r) * dim + c] = cur
                    if tcur + 2 > two_lmax:
                        break
                    l = 0.5 * tcur
                    if tcur == 0:
                        nxt = cb
                    else:
                        num = ((2 * l + 1) * (l * (l + 1) * cb - m1 * m2) * cur
                               - (l + 1) * sqrt(fabs((l * l - m1 * m1) * (l * l - m2 * m2))) * prev)
                        den = l * sqrt(((l + 1) * (l + 1) - m1 * m1) * ((l + 1) * (l + 1) - m2 * m2))
                        nxt = num / den
                    prev = cur
                    cur = nxt
                    tcur += 2
    return out_np, offsets
