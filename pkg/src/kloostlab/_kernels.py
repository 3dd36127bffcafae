"""Numba kernels for the O(p) and O(p^2) Kloosterman summations.

Phases are reduced to an exact residue ``k`` first and then looked up in a
table of ``exp(2*pi*i*k/p)``, so the only rounding comes from summation.
All accumulations are Kahan-compensated.
"""

import numba
import numpy as np


@numba.njit(cache=True)
def kloosterman_single(p, m, n, inv, re_t, im_t):
    m = m % p
    n = n % p
    sr = 0.0
    cr = 0.0
    si = 0.0
    ci = 0.0
    a = 0
    for x in range(1, p):
        a += m
        if a >= p:
            a -= p
        k = a + (n * inv[x]) % p
        if k >= p:
            k -= p
        y = re_t[k] - cr
        t = sr + y
        cr = (t - sr) - y
        sr = t
        y = im_t[k] - ci
        t = si + y
        ci = (t - si) - y
        si = t
    return sr, si


@numba.njit(cache=True)
def kloosterman_row(p, n, inv, re_t, im_t, out_re, out_im):
    """``out[m-1] = K_p(m, n)`` for every ``m`` in ``[1, p-1]``.

    Two values of ``m`` share one pass over ``x`` so their compensated
    accumulators pipeline independently.
    """
    nv = np.empty(p, dtype=np.int64)
    for x in range(p):
        nv[x] = (n * inv[x]) % p
    for m in range(1, p, 2):
        m2 = m + 1 if m + 1 < p else 0
        sr1 = cr1 = si1 = ci1 = 0.0
        sr2 = cr2 = si2 = ci2 = 0.0
        a1 = 0
        a2 = 0
        for x in range(1, p):
            b = nv[x]
            a1 += m
            if a1 >= p:
                a1 -= p
            a2 += m2
            if a2 >= p:
                a2 -= p
            k1 = a1 + b
            if k1 >= p:
                k1 -= p
            k2 = a2 + b
            if k2 >= p:
                k2 -= p
            y1 = re_t[k1] - cr1
            t1 = sr1 + y1
            cr1 = (t1 - sr1) - y1
            sr1 = t1
            y2 = re_t[k2] - cr2
            t2 = sr2 + y2
            cr2 = (t2 - sr2) - y2
            sr2 = t2
            y1 = im_t[k1] - ci1
            t1 = si1 + y1
            ci1 = (t1 - si1) - y1
            si1 = t1
            y2 = im_t[k2] - ci2
            t2 = si2 + y2
            ci2 = (t2 - si2) - y2
            si2 = t2
        out_re[m - 1] = sr1
        out_im[m - 1] = si1
        if m2:
            out_re[m] = sr2
            out_im[m] = si2


@numba.njit(cache=True)
def kahan_sum(values):
    s = 0.0
    c = 0.0
    for v in values:
        y = v - c
        t = s + y
        c = (t - s) - y
        s = t
    return s


@numba.njit(cache=True)
def kahan_sum_complex(values):
    sr = 0.0
    cr = 0.0
    si = 0.0
    ci = 0.0
    for v in values:
        y = v.real - cr
        t = sr + y
        cr = (t - sr) - y
        sr = t
        y = v.imag - ci
        t = si + y
        ci = (t - si) - y
        si = t
    return complex(sr, si)
