# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementation of the per-pixel descriptor kernels.

Mirrors ``_kernels_py`` expression for expression; the build disables
floating-point contraction so both engines produce bit-identical outputs.
See the pure-Python module for the shared floating-point rules.
"""

import numpy as np

from libc.math cimport fabs, rint

NAME = "compiled"


def sample(const unsigned char[:, ::1] pixels, plan):
    """Sample the ring around every interior pixel; see ``_kernels_py.sample``."""
    cdef int h = pixels.shape[0]
    cdef int w = pixels.shape[1]
    cdef int m = plan.margin
    cdef int p = plan.p
    cdef int hi = h - 2 * m
    cdef int wi = w - 2 * m
    if hi <= 0 or wi <= 0:
        raise ValueError(f"image {w}x{h} too small for margin {m}")

    center_arr = np.empty((hi, wi), dtype=np.float64)
    stack_arr = np.empty((p, hi, wi), dtype=np.float64)
    cdef double[:, ::1] center = center_arr
    cdef double[:, :, ::1] stack = stack_arr

    cdef const int[::1] nx = plan.nx
    cdef const int[::1] ny = plan.ny
    cdef const int[::1] bx = plan.bx
    cdef const int[::1] by = plan.by
    cdef const double[::1] w_tl = plan.w_tl
    cdef const double[::1] w_tr = plan.w_tr
    cdef const double[::1] w_bl = plan.w_bl
    cdef const double[::1] w_br = plan.w_br

    cdef bint nearest = plan.mode == "nearest"
    cdef int i, j, k, y0, x0
    cdef double raw, wtl, wtr, wbl, wbr

    with nogil:
        for i in range(hi):
            for j in range(wi):
                center[i, j] = <double> pixels[m + i, m + j]
        if nearest:
            for k in range(p):
                y0 = m + ny[k]
                x0 = m + nx[k]
                for i in range(hi):
                    for j in range(wi):
                        stack[k, i, j] = <double> pixels[y0 + i, x0 + j]
        else:
            for k in range(p):
                y0 = m + by[k]
                x0 = m + bx[k]
                wtl = w_tl[k]
                wtr = w_tr[k]
                wbl = w_bl[k]
                wbr = w_br[k]
                for i in range(hi):
                    for j in range(wi):
                        raw = (wtl * <double> pixels[y0 + i, x0 + j]
                               + wbr * <double> pixels[y0 + i + 1, x0 + j + 1]) \
                              + (wtr * <double> pixels[y0 + i, x0 + j + 1]
                                 + wbl * <double> pixels[y0 + i + 1, x0 + j])
                        stack[k, i, j] = rint(raw * 10000.0) / 10000.0
    return center_arr, stack_arr


def lbp_codes(const double[:, :, ::1] stack, const double[:, ::1] center):
    cdef int p = stack.shape[0]
    cdef int hi = stack.shape[1]
    cdef int wi = stack.shape[2]
    codes_arr = np.zeros((hi, wi), dtype=np.int32)
    cdef int[:, ::1] codes = codes_arr
    cdef int i, j, k, c
    with nogil:
        for i in range(hi):
            for j in range(wi):
                c = 0
                for k in range(p):
                    if stack[k, i, j] >= center[i, j]:
                        c |= 1 << k
                codes[i, j] = c
    return codes_arr


def ni_codes(const double[:, :, ::1] stack):
    cdef int p = stack.shape[0]
    cdef int hi = stack.shape[1]
    cdef int wi = stack.shape[2]
    codes_arr = np.zeros((hi, wi), dtype=np.int32)
    cdef int[:, ::1] codes = codes_arr
    cdef int i, j, k, c
    cdef double acc, mu
    with nogil:
        for i in range(hi):
            for j in range(wi):
                acc = stack[0, i, j]
                for k in range(1, p):
                    acc = acc + stack[k, i, j]
                mu = acc / <double> p
                c = 0
                for k in range(p):
                    if stack[k, i, j] >= mu:
                        c |= 1 << k
                codes[i, j] = c
    return codes_arr


def med_counts(const double[:, :, ::1] stack, const double[:, ::1] center):
    cdef int p = stack.shape[0]
    cdef int hi = stack.shape[1]
    cdef int wi = stack.shape[2]
    counts_arr = np.zeros((hi, wi), dtype=np.int32)
    cdef int[:, ::1] counts = counts_arr
    cdef int i, j, k, n, a, cnt
    cdef double vals[25]  # p <= 24, so at most 25 neighborhood values
    cdef double v, med
    n = p + 1
    with nogil:
        for i in range(hi):
            for j in range(wi):
                vals[0] = center[i, j]
                for k in range(p):
                    vals[k + 1] = stack[k, i, j]
                # insertion sort; n is odd so the middle element is exact
                for k in range(1, n):
                    v = vals[k]
                    a = k - 1
                    while a >= 0 and vals[a] > v:
                        vals[a + 1] = vals[a]
                        a -= 1
                    vals[a + 1] = v
                med = vals[n // 2]
                cnt = 0
                for k in range(p):
                    if stack[k, i, j] >= med:
                        cnt += 1
                counts[i, j] = cnt
    return counts_arr


def cen_codes(const double[:, :, ::1] stack, const double[:, ::1] center, double c):
    cdef int p = stack.shape[0]
    cdef int hi = stack.shape[1]
    cdef int wi = stack.shape[2]
    cdef int half = p // 2
    codes_arr = np.zeros((hi, wi), dtype=np.int32)
    cdef int[:, ::1] codes = codes_arr
    cdef int i, j, k, code
    cdef double acc, gtot
    with nogil:
        for i in range(hi):
            for j in range(wi):
                code = 0
                for k in range(half):
                    if fabs(stack[k, i, j] - stack[k + half, i, j]) >= c:
                        code |= 1 << k
                acc = center[i, j]
                for k in range(p):
                    acc = acc + stack[k, i, j]
                gtot = acc / <double> (p + 1)
                if fabs(center[i, j] - gtot) >= c:
                    code |= 1 << half
                codes[i, j] = code
    return codes_arr


def ltp_maps(const double[:, :, ::1] stack, const double[:, ::1] center, double t):
    cdef int p = stack.shape[0]
    cdef int hi = stack.shape[1]
    cdef int wi = stack.shape[2]
    upper_arr = np.zeros((hi, wi), dtype=np.int32)
    lower_arr = np.zeros((hi, wi), dtype=np.int32)
    cdef int[:, ::1] upper = upper_arr
    cdef int[:, ::1] lower = lower_arr
    cdef int i, j, k, up, lo
    cdef double d
    with nogil:
        for i in range(hi):
            for j in range(wi):
                up = 0
                lo = 0
                for k in range(p):
                    d = stack[k, i, j] - center[i, j]
                    if d > t:
                        up |= 1 << k
                    if d < -t:
                        lo |= 1 << k
                upper[i, j] = up
                lower[i, j] = lo
    return upper_arr, lower_arr


def clbp_maps(const double[:, :, ::1] stack, const double[:, ::1] center,
              double mag_threshold, double center_threshold):
    cdef int p = stack.shape[0]
    cdef int hi = stack.shape[1]
    cdef int wi = stack.shape[2]
    s_arr = np.zeros((hi, wi), dtype=np.int32)
    m_arr = np.zeros((hi, wi), dtype=np.int32)
    c_arr = np.zeros((hi, wi), dtype=np.int32)
    cdef int[:, ::1] s_codes = s_arr
    cdef int[:, ::1] m_codes = m_arr
    cdef int[:, ::1] c_bit = c_arr
    cdef int i, j, k, sc, mc
    cdef double d
    with nogil:
        for i in range(hi):
            for j in range(wi):
                sc = 0
                mc = 0
                for k in range(p):
                    d = stack[k, i, j] - center[i, j]
                    if d >= 0.0:
                        sc |= 1 << k
                    if fabs(d) >= mag_threshold:
                        mc |= 1 << k
                s_codes[i, j] = sc
                m_codes[i, j] = mc
                c_bit[i, j] = 1 if center[i, j] >= center_threshold else 0
    return s_arr, m_arr, c_arr


def ci_values(const double[:, :, ::1] stack, const double[:, ::1] center):
    cdef int p = stack.shape[0]
    cdef int hi = stack.shape[1]
    cdef int wi = stack.shape[2]
    out_arr = np.empty((hi, wi), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef int i, j, k
    cdef double ge, lt
    with nogil:
        for i in range(hi):
            for j in range(wi):
                ge = 0.0
                lt = 0.0
                for k in range(p):
                    if stack[k, i, j] >= center[i, j]:
                        ge = ge + stack[k, i, j]
                    else:
                        lt = lt + stack[k, i, j]
                out[i, j] = ge - lt
    return out_arr
