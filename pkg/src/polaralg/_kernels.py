"""Compiled row kernels for circular convolution and the DFT.

Every kernel works on a 2-D ``complex128`` array whose rows are independent
(one row per radius / batch entry) and returns the number of complex
multiplications it performed alongside its result, so that callers can
account for arithmetic work exactly.
"""

import math

import numba
import numpy as np


@numba.njit(cache=True)
def circular_convolve_rows(a, b):
    """Direct O(n^2) circular convolution of matching rows of ``a`` and ``b``."""
    nrow, n = a.shape
    out = np.zeros((nrow, n), dtype=np.complex128)
    count = 0
    for r in range(nrow):
        for t in range(n):
            acc = 0j
            for k in range(n):
                j = t - k
                if j < 0:
                    j += n
                acc += a[r, k] * b[r, j]
                count += 1
            out[r, t] = acc
    return out, count


@numba.njit(cache=True)
def circular_convolve_torus(a, b, sizes):
    """Direct convolution on the torus Z_{n1} x ... x Z_{nd}.

    Rows of ``a`` and ``b`` are row-major flattenings of a d-dimensional
    angular block with axis lengths ``sizes``.
    """
    nrow, p = a.shape
    d = sizes.shape[0]
    coords = np.empty((p, d), dtype=np.int64)
    for flat in range(p):
        rem = flat
        for ax in range(d - 1, -1, -1):
            coords[flat, ax] = rem % sizes[ax]
            rem //= sizes[ax]
    out = np.zeros((nrow, p), dtype=np.complex128)
    count = 0
    for r in range(nrow):
        for t in range(p):
            acc = 0j
            for k in range(p):
                j = 0
                for ax in range(d):
                    c = coords[t, ax] - coords[k, ax]
                    if c < 0:
                        c += sizes[ax]
                    j = j * sizes[ax] + c
                acc += a[r, k] * b[r, j]
                count += 1
            out[r, t] = acc
    return out, count


@numba.njit(cache=True)
def _radix2_inplace(x, sign):
    # x: (nrow, n) with n a power of two; forward when sign == -1
    nrow, n = x.shape
    if n == 1:
        return 0
    bits = 0
    while (1 << bits) < n:
        bits += 1
    rev = np.empty(n, dtype=np.int64)
    for i in range(n):
        v = i
        rv = 0
        for _ in range(bits):
            rv = (rv << 1) | (v & 1)
            v >>= 1
        rev[i] = rv
    half = n // 2
    tw = np.empty(half, dtype=np.complex128)
    for k in range(half):
        ang = sign * 2.0 * math.pi * k / n
        tw[k] = complex(math.cos(ang), math.sin(ang))
    count = 0
    for r in range(nrow):
        for i in range(n):
            j = rev[i]
            if j > i:
                tmp = x[r, i]
                x[r, i] = x[r, j]
                x[r, j] = tmp
        size = 2
        while size <= n:
            h = size // 2
            step = n // size
            for start in range(0, n, size):
                for j in range(h):
                    u = x[r, start + j]
                    v = x[r, start + j + h] * tw[j * step]
                    x[r, start + j] = u + v
                    x[r, start + j + h] = u - v
            count += (n // size) * h
            size *= 2
    return count


@numba.njit(cache=True)
def _bluestein(x, sign):
    # chirp-z evaluation of an arbitrary-length DFT through power-of-two FFTs
    nrow, n = x.shape
    m = 1
    while m < 2 * n - 1:
        m *= 2
    chirp = np.empty(n, dtype=np.complex128)
    for k in range(n):
        # k^2 reduced mod 2n keeps the phase argument small
        ang = sign * math.pi * ((k * k) % (2 * n)) / n
        chirp[k] = complex(math.cos(ang), math.sin(ang))
    filt = np.zeros((1, m), dtype=np.complex128)
    filt[0, 0] = chirp[0].conjugate()
    for k in range(1, n):
        c = chirp[k].conjugate()
        filt[0, k] = c
        filt[0, m - k] = c
    count = _radix2_inplace(filt, -1.0)
    work = np.zeros((nrow, m), dtype=np.complex128)
    for r in range(nrow):
        for k in range(n):
            work[r, k] = x[r, k] * chirp[k]
    count += nrow * n
    count += _radix2_inplace(work, -1.0)
    for r in range(nrow):
        for k in range(m):
            work[r, k] *= filt[0, k]
    count += nrow * m
    count += _radix2_inplace(work, 1.0)
    out = np.empty((nrow, n), dtype=np.complex128)
    for r in range(nrow):
        for k in range(n):
            out[r, k] = work[r, k] / m * chirp[k]
    count += nrow * n
    return out, count


@numba.njit(cache=True)
def dft_rows(x, inverse):
    """DFT of every row; the inverse carries the 1/n factor.

    Power-of-two lengths use an iterative radix-2 Cooley-Tukey transform;
    other lengths go through Bluestein's chirp-z algorithm, so every length
    costs O(n log n).
    """
    nrow, n = x.shape
    sign = 1.0 if inverse else -1.0
    if n & (n - 1) == 0:
        out = x.copy()
        count = _radix2_inplace(out, sign)
    else:
        out, count = _bluestein(x, sign)
    if inverse:
        for r in range(nrow):
            for k in range(n):
                out[r, k] /= n
    return out, count


@numba.njit(cache=True)
def convolve_fft_rows(a, b):
    """Circular convolution of matching rows through the convolution theorem."""
    fa, c1 = dft_rows(a, False)
    fb, c2 = dft_rows(b, False)
    nrow, n = a.shape
    for r in range(nrow):
        for k in range(n):
            fa[r, k] *= fb[r, k]
    out, c3 = dft_rows(fa, True)
    return out, c1 + c2 + c3 + nrow * n


@numba.njit(cache=True)
def direct_dft_rows(x, rows):
    """Evaluate the DFT sum X[k] = sum_n x[n] w^{nk} for selected output rows k."""
    n = x.shape[0]
    out = np.empty(rows.shape[0], dtype=np.complex128)
    for i in range(rows.shape[0]):
        k = rows[i]
        acc = 0j
        for j in range(n):
            ang = -2.0 * math.pi * ((j * k) % n) / n
            acc += x[j] * complex(math.cos(ang), math.sin(ang))
        out[i] = acc
    return out
