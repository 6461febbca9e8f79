# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: distribution enumeration and panel sums.

Same contract as ``_kernels_py``; ``_backend`` prefers this module when the
build produced it.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, exp, fabs, pow, sin

cnp.import_array()

COMPILED = True

CODE_KG1 = 11
CODE_KG2 = 12
CODE_KH1 = 21
CODE_KH2 = 22
CODE_KH3 = 23
CODE_KGAUSS = 3

cdef double M_PI = 3.141592653589793238462643383279502884


def enum_dist_int64(weights):
    """Distribution of sum(w_i * x_i): sorted int64 values and counts."""
    cdef cnp.ndarray[cnp.int64_t, ndim=1] vals = np.zeros(1, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] cnts = np.ones(1, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] nvals, ncnts
    cdef long long w
    cdef Py_ssize_t n, i, j, k
    cdef long long lo_v, hi_v
    for wt in weights:
        w = wt
        n = vals.shape[0]
        # merge (vals - w) and (vals + w); both ascending
        nvals = np.empty(2 * n, dtype=np.int64)
        ncnts = np.empty(2 * n, dtype=np.int64)
        i = 0
        j = 0
        k = 0
        while i < n or j < n:
            if j >= n:
                lo_v = vals[i] - w
                if k > 0 and nvals[k - 1] == lo_v:
                    ncnts[k - 1] += cnts[i]
                else:
                    nvals[k] = lo_v
                    ncnts[k] = cnts[i]
                    k += 1
                i += 1
            elif i >= n:
                hi_v = vals[j] + w
                if k > 0 and nvals[k - 1] == hi_v:
                    ncnts[k - 1] += cnts[j]
                else:
                    nvals[k] = hi_v
                    ncnts[k] = cnts[j]
                    k += 1
                j += 1
            else:
                lo_v = vals[i] - w
                hi_v = vals[j] + w
                if lo_v <= hi_v:
                    if k > 0 and nvals[k - 1] == lo_v:
                        ncnts[k - 1] += cnts[i]
                    else:
                        nvals[k] = lo_v
                        ncnts[k] = cnts[i]
                        k += 1
                    i += 1
                else:
                    if k > 0 and nvals[k - 1] == hi_v:
                        ncnts[k - 1] += cnts[j]
                    else:
                        nvals[k] = hi_v
                        ncnts[k] = cnts[j]
                        k += 1
                    j += 1
        vals = nvals[:k].copy()
        cnts = ncnts[:k].copy()
    return vals, cnts


def enum_dist_big(weights):
    """Arbitrary-precision fallback (plain dict; no fixed-width arithmetic)."""
    dist = {0: 1}
    for w in weights:
        nxt = {}
        get = nxt.get
        for v, c in dist.items():
            a = v - w
            b = v + w
            nxt[a] = get(a, 0) + c
            nxt[b] = get(b, 0) + c
        dist = nxt
    items = sorted(dist.items())
    return [v for v, _ in items], [c for _, c in items]


cdef inline double _kernel(double u, double x, double T) nogil:
    cdef double m = u if u < 1.0 - u else 1.0 - u
    cdef double s = sin(M_PI * m)
    return (1.0 - u) * sin(M_PI * u - T * u * x) / s - sin(T * u * x) / M_PI


def panel_sums(double a, double b, long long n_panels, int code,
               double a1, double x, double T):
    """Midpoint sums (sum f, sum |f|) with Kahan compensation."""
    cdef double delta = (b - a) / n_panels
    cdef double s = 0.0, cs = 0.0, sa = 0.0, csa = 0.0
    cdef double u, f, k, v, y, t
    cdef double inva2 = 1.0 / (a1 * a1)
    cdef long long j
    with nogil:
        for j in range(n_panels):
            u = a + (j + 0.5) * delta
            k = _kernel(u, x, T)
            v = T * u
            if code == 3:
                f = k * exp(-0.5 * v * v)
            elif code == 11:
                f = fabs(k) * (exp(-0.5 * v * v) - pow(cos(a1 * v), inva2))
            elif code == 12:
                f = fabs(k) * (exp(-0.5 * v * v) + 1.0)
            elif code == 21:
                f = fabs(k) * exp(-0.5 * v * v)
            elif code == 22:
                f = fabs(k) * pow(-cos(a1 * v), inva2)
            else:
                f = fabs(k)
            y = f - cs
            t = s + y
            cs = (t - s) - y
            s = t
            f = fabs(f)
            y = f - csa
            t = sa + y
            csa = (t - sa) - y
            sa = t
    return s, sa
