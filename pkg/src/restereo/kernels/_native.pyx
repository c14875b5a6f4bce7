# cython: boundscheck=False, wraparound=False, cdivision=True
# cython: initializedcheck=False, language_level=3
"""Compiled kernels (OpenMP).

Mirrors numpy_backend semantics operation for operation: same dtypes,
same accumulation precision, same border handling.  Parallel loops
split rows or columns with disjoint writes, so results are bitwise
independent of the thread count.
"""

import numpy as np

from cython.parallel cimport prange
from libc.math cimport exp, fabs, floor, sqrt

NAME = "native"


cdef inline Py_ssize_t _clampi(Py_ssize_t v, Py_ssize_t lo, Py_ssize_t hi) nogil:
    if v < lo:
        return lo
    if v > hi:
        return hi
    return v


def census_transform(const float[:, ::1] lum, int threads):
    cdef Py_ssize_t h = lum.shape[0], w = lum.shape[1]
    out_np = np.empty((24, h, w), dtype=np.float32)
    cdef float[:, :, ::1] out = out_np
    cdef Py_ssize_t y, x, i, dy, dx, yy, xx
    cdef float c
    for y in prange(h, nogil=True, num_threads=threads, schedule='static'):
        for x in range(w):
            c = lum[y, x]
            i = 0
            for dy in range(-2, 3):
                yy = _clampi(y + dy, 0, h - 1)
                for dx in range(-2, 3):
                    if dy == 0 and dx == 0:
                        continue
                    xx = _clampi(x + dx, 0, w - 1)
                    out[i, y, x] = 1.0 if lum[yy, xx] > c else 0.0
                    i = i + 1
    return out_np


def cost_volume_absdiff(const float[:, :, ::1] f_left, const float[:, :, ::1] f_right,
                        int d_cv, int ch_start, int threads):
    cdef Py_ssize_t c = f_left.shape[0], h = f_left.shape[1], w = f_left.shape[2]
    cdef Py_ssize_t n = c - ch_start
    out_np = np.empty((d_cv, h, w), dtype=np.float32)
    cdef float[:, :, ::1] out = out_np
    cdef Py_ssize_t k, d, y, x, ch, xs
    cdef double acc
    cdef float diff
    for k in range(d_cv):
        d = k - d_cv // 2 + 1
        for y in prange(h, nogil=True, num_threads=threads, schedule='static'):
            for x in range(w):
                xs = _clampi(x - d, 0, w - 1)
                acc = 0.0
                for ch in range(ch_start, c):
                    # float subtraction first, matching the numpy path
                    diff = f_left[ch, y, x] - f_right[ch, y, xs]
                    acc = acc + fabs(<double>diff)
                out[k, y, x] = <float>(acc / n)
    return out_np


def cost_volume_ncc(const float[:, ::1] left, const float[:, ::1] right,
                    int d_cv, int radius, int threads):
    cdef Py_ssize_t h = left.shape[0], w = left.shape[1]
    cdef double n = <double>((2 * radius + 1) * (2 * radius + 1))
    out_np = np.empty((d_cv, h, w), dtype=np.float32)
    cdef float[:, :, ::1] out = out_np
    cdef Py_ssize_t k, d, y, x, dy, dx, yy, xx, xxs, r = radius
    cdef double a, b, sl, sr, sll, srr, slr, el, er, vl, vr, cov, ncc, cost
    for k in range(d_cv):
        d = k - d_cv // 2 + 1
        for y in prange(h, nogil=True, num_threads=threads, schedule='static'):
            for x in range(w):
                sl = 0.0
                sr = 0.0
                sll = 0.0
                srr = 0.0
                slr = 0.0
                for dy in range(-r, r + 1):
                    yy = _clampi(y + dy, 0, h - 1)
                    for dx in range(-r, r + 1):
                        # clamp to the image, then shift, then clamp again:
                        # same as windowing an edge-padded shifted image
                        xx = _clampi(x + dx, 0, w - 1)
                        xxs = _clampi(xx - d, 0, w - 1)
                        a = <double>left[yy, xx]
                        b = <double>right[yy, xxs]
                        sl = sl + a
                        sr = sr + b
                        sll = sll + a * a
                        srr = srr + b * b
                        slr = slr + a * b
                el = sl / n
                er = sr / n
                vl = sll / n - el * el
                vr = srr / n - er * er
                cov = slr / n - el * er
                if vl < 0.0:
                    vl = 0.0
                if vr < 0.0:
                    vr = 0.0
                ncc = cov / sqrt(vl * vr + 1e-12)
                cost = 0.5 * (1.0 - ncc)
                if cost < 0.0:
                    cost = 0.0
                if cost > 1.0:
                    cost = 1.0
                out[k, y, x] = <float>cost
    return out_np


def box_filter_volume(const float[:, :, ::1] cv, int radius, int iterations, int threads):
    cdef Py_ssize_t dd = cv.shape[0], h = cv.shape[1], w = cv.shape[2]
    cdef double n = <double>((2 * radius + 1) * (2 * radius + 1))
    a_np = np.asarray(cv).copy()
    b_np = np.empty_like(a_np)
    cdef float[:, :, ::1] src = a_np
    cdef float[:, :, ::1] dst = b_np
    cdef Py_ssize_t it, k, y, x, dy, dx, yy, xx, r = radius
    cdef double acc
    for it in range(iterations):
        for k in range(dd):
            for y in prange(h, nogil=True, num_threads=threads, schedule='static'):
                for x in range(w):
                    acc = 0.0
                    for dy in range(-r, r + 1):
                        yy = _clampi(y + dy, 0, h - 1)
                        for dx in range(-r, r + 1):
                            xx = _clampi(x + dx, 0, w - 1)
                            acc = acc + <double>src[k, yy, xx]
                    dst[k, y, x] = <float>(acc / n)
        src, dst = dst, src
        a_np, b_np = b_np, a_np
    return a_np


cdef void _sgm_horizontal(const float[:, :, ::1] cv, float[:, :, ::1] out,
                          float[:, ::1] sp, float[:, ::1] sc,
                          float p1, float p2, bint reverse, int threads) noexcept nogil:
    cdef Py_ssize_t dd = cv.shape[0], h = cv.shape[1], w = cv.shape[2]
    cdef Py_ssize_t y, x, k, step
    cdef float m, best, v
    for y in prange(h, num_threads=threads, schedule='static'):
        x = w - 1 if reverse else 0
        for k in range(dd):
            sp[y, k] = cv[k, y, x]
            out[k, y, x] += sp[y, k]
        for step in range(1, w):
            x = w - 1 - step if reverse else step
            m = sp[y, 0]
            for k in range(1, dd):
                if sp[y, k] < m:
                    m = sp[y, k]
            for k in range(dd):
                best = sp[y, k]
                if k > 0:
                    v = sp[y, k - 1] + p1
                    if v < best:
                        best = v
                if k < dd - 1:
                    v = sp[y, k + 1] + p1
                    if v < best:
                        best = v
                v = m + p2
                if v < best:
                    best = v
                sc[y, k] = cv[k, y, x] + (best - m)
            for k in range(dd):
                sp[y, k] = sc[y, k]
                out[k, y, x] += sc[y, k]


cdef void _sgm_vertical(const float[:, :, ::1] cv, float[:, :, ::1] out,
                        float[:, ::1] sp, float[:, ::1] sc,
                        float p1, float p2, bint reverse, int threads) noexcept nogil:
    cdef Py_ssize_t dd = cv.shape[0], h = cv.shape[1], w = cv.shape[2]
    cdef Py_ssize_t y, x, k, step
    cdef float m, best, v
    for x in prange(w, num_threads=threads, schedule='static'):
        y = h - 1 if reverse else 0
        for k in range(dd):
            sp[x, k] = cv[k, y, x]
            out[k, y, x] += sp[x, k]
        for step in range(1, h):
            y = h - 1 - step if reverse else step
            m = sp[x, 0]
            for k in range(1, dd):
                if sp[x, k] < m:
                    m = sp[x, k]
            for k in range(dd):
                best = sp[x, k]
                if k > 0:
                    v = sp[x, k - 1] + p1
                    if v < best:
                        best = v
                if k < dd - 1:
                    v = sp[x, k + 1] + p1
                    if v < best:
                        best = v
                v = m + p2
                if v < best:
                    best = v
                sc[x, k] = cv[k, y, x] + (best - m)
            for k in range(dd):
                sp[x, k] = sc[x, k]
                out[k, y, x] += sc[x, k]


def sgm_aggregate(const float[:, :, ::1] cv, double p1_in, double p2_in, int threads):
    cdef Py_ssize_t dd = cv.shape[0], h = cv.shape[1], w = cv.shape[2]
    cdef float p1 = <float>p1_in, p2 = <float>p2_in
    out_h_np = np.zeros((dd, h, w), dtype=np.float32)
    out_v_np = np.zeros((dd, h, w), dtype=np.float32)
    cdef float[:, :, ::1] out_h = out_h_np
    cdef float[:, :, ::1] out_v = out_v_np
    sp_np = np.empty((max(h, w), dd), dtype=np.float32)
    sc_np = np.empty((max(h, w), dd), dtype=np.float32)
    cdef float[:, ::1] sp = sp_np
    cdef float[:, ::1] sc = sc_np
    with nogil:
        _sgm_horizontal(cv, out_h, sp, sc, p1, p2, False, threads)
        _sgm_horizontal(cv, out_h, sp, sc, p1, p2, True, threads)
        _sgm_vertical(cv, out_v, sp, sc, p1, p2, False, threads)
        _sgm_vertical(cv, out_v, sp, sc, p1, p2, True, threads)
    # same grouping as the numpy backend: (fwd+bwd) + (down+up), then / 4
    return (out_h_np + out_v_np) * np.float32(0.25)


def soft_argmax(const float[:, :, ::1] cv, double first_candidate, int threads):
    cdef Py_ssize_t dd = cv.shape[0], h = cv.shape[1], w = cv.shape[2]
    out_np = np.empty((h, w), dtype=np.float64)
    cdef double[:, ::1] out = out_np
    cdef Py_ssize_t y, x, k
    cdef float m
    cdef double e, wsum, dsum
    for y in prange(h, nogil=True, num_threads=threads, schedule='static'):
        for x in range(w):
            m = cv[0, y, x]
            for k in range(1, dd):
                if cv[k, y, x] < m:
                    m = cv[k, y, x]
            wsum = 0.0
            dsum = 0.0
            for k in range(dd):
                # subtract in double so the shift is exact for f32 inputs
                e = exp(<double>m - <double>cv[k, y, x])
                wsum = wsum + e
                dsum = dsum + (first_candidate + <double>k) * e
            out[y, x] = dsum / wsum
    return out_np


def warp_horizontal(const float[:, :, ::1] img, const double[:, ::1] disp, int threads):
    cdef Py_ssize_t c = img.shape[0], h = img.shape[1], w = img.shape[2]
    out_np = np.empty((c, h, w), dtype=np.float32)
    cdef float[:, :, ::1] out = out_np
    cdef Py_ssize_t ch, y, x, i0, i1
    cdef double xs, x0f, frac, val
    for ch in range(c):
        for y in prange(h, nogil=True, num_threads=threads, schedule='static'):
            for x in range(w):
                xs = <double>x - disp[y, x]
                x0f = floor(xs)
                frac = xs - x0f
                if x0f < 0.0:
                    i0 = 0
                elif x0f > <double>(w - 1):
                    i0 = w - 1
                else:
                    i0 = <Py_ssize_t>x0f
                if x0f + 1.0 < 0.0:
                    i1 = 0
                elif x0f + 1.0 > <double>(w - 1):
                    i1 = w - 1
                else:
                    i1 = <Py_ssize_t>(x0f + 1.0)
                val = (1.0 - frac) * <double>img[ch, y, i0] + frac * <double>img[ch, y, i1]
                out[ch, y, x] = <float>val
    return out_np


def upsample_bilinear(const double[:, ::1] vals, int factor, int threads):
    cdef Py_ssize_t h = vals.shape[0], w = vals.shape[1]
    cdef Py_ssize_t oh = h * factor, ow = w * factor
    # index and weight tables built exactly like the numpy backend
    sy = (np.arange(oh, dtype=np.float64) + 0.5) / factor - 0.5
    sx = (np.arange(ow, dtype=np.float64) + 0.5) / factor - 0.5
    y0f = np.floor(sy)
    x0f = np.floor(sx)
    wy_np = sy - y0f
    wx_np = sx - x0f
    y0_np = np.clip(y0f, 0, h - 1).astype(np.intp)
    y1_np = np.clip(y0f + 1.0, 0, h - 1).astype(np.intp)
    x0_np = np.clip(x0f, 0, w - 1).astype(np.intp)
    x1_np = np.clip(x0f + 1.0, 0, w - 1).astype(np.intp)
    cdef double[::1] wy = wy_np, wx = wx_np
    cdef Py_ssize_t[::1] y0 = y0_np, y1 = y1_np, x0 = x0_np, x1 = x1_np
    out_np = np.empty((oh, ow), dtype=np.float64)
    cdef double[:, ::1] out = out_np
    cdef Py_ssize_t i, j
    cdef double a, b
    for i in prange(oh, nogil=True, num_threads=threads, schedule='static'):
        for j in range(ow):
            a = (1.0 - wx[j]) * vals[y0[i], x0[j]] + wx[j] * vals[y0[i], x1[j]]
            b = (1.0 - wx[j]) * vals[y1[i], x0[j]] + wx[j] * vals[y1[i], x1[j]]
            out[i, j] = (1.0 - wy[i]) * a + wy[i] * b
    return out_np


def block_mean(const float[:, :, ::1] img, int factor, int threads):
    cdef Py_ssize_t c = img.shape[0], h = img.shape[1], w = img.shape[2]
    cdef Py_ssize_t hh = h // factor, ww = w // factor
    cdef double n = <double>(factor * factor)
    out_np = np.empty((c, hh, ww), dtype=np.float32)
    cdef float[:, :, ::1] out = out_np
    cdef Py_ssize_t ch, Y, X, dy, dx
    cdef double acc
    for ch in range(c):
        for Y in prange(hh, nogil=True, num_threads=threads, schedule='static'):
            for X in range(ww):
                acc = 0.0
                for dy in range(factor):
                    for dx in range(factor):
                        acc = acc + <double>img[ch, Y * factor + dy, X * factor + dx]
                out[ch, Y, X] = <float>(acc / n)
    return out_np


def joint_bilateral(const double[:, ::1] values, const float[:, ::1] guide, const double[:, ::1] conf,
                    const double[:, ::1] spatial, const double[::1] range_lut, int threads):
    cdef Py_ssize_t h = values.shape[0], w = values.shape[1]
    cdef Py_ssize_t r = (spatial.shape[0] - 1) // 2
    cdef Py_ssize_t nbins = range_lut.shape[0]
    out_np = np.empty((h, w), dtype=np.float64)
    cdef double[:, ::1] out = out_np
    cdef Py_ssize_t y, x, dy, dx, yy, xx, idx
    cdef double g0, dg, wgt, num, den
    for y in prange(h, nogil=True, num_threads=threads, schedule='static'):
        for x in range(w):
            g0 = <double>guide[y, x]
            num = 0.0
            den = 0.0
            for dy in range(-r, r + 1):
                yy = _clampi(y + dy, 0, h - 1)
                for dx in range(-r, r + 1):
                    xx = _clampi(x + dx, 0, w - 1)
                    dg = fabs(<double>guide[yy, xx] - g0)
                    idx = <Py_ssize_t>(dg * <double>nbins)
                    if idx > nbins - 1:
                        idx = nbins - 1
                    wgt = spatial[dy + r, dx + r] * range_lut[idx] * conf[yy, xx]
                    num = num + wgt * values[yy, xx]
                    den = den + wgt
            out[y, x] = num / den
    return out_np


def fill_background(const double[:, ::1] values, const unsigned char[:, ::1] valid, int threads):
    cdef Py_ssize_t h = values.shape[0], w = values.shape[1]
    out_v_np = np.empty((h, w), dtype=np.float64)
    out_m_np = np.empty((h, w), dtype=np.uint8)
    cdef double[:, ::1] out_v = out_v_np
    cdef unsigned char[:, ::1] out_m = out_m_np
    cdef Py_ssize_t y, x
    cdef bint have_l, have_r
    cdef double lv, rv
    # mask codes during the scans: 0 none, 1 final, 2 left-filled so far
    for y in prange(h, nogil=True, num_threads=threads, schedule='static'):
        have_l = False
        lv = 0.0
        for x in range(w):
            if valid[y, x]:
                have_l = True
                lv = values[y, x]
                out_v[y, x] = values[y, x]
                out_m[y, x] = 1
            elif have_l:
                out_v[y, x] = lv
                out_m[y, x] = 2
            else:
                out_v[y, x] = 0.0
                out_m[y, x] = 0
        have_r = False
        rv = 0.0
        for x in range(w - 1, -1, -1):
            if valid[y, x]:
                have_r = True
                rv = values[y, x]
            elif have_r:
                if out_m[y, x] == 0:
                    out_v[y, x] = rv
                    out_m[y, x] = 1
                elif out_m[y, x] == 2:
                    if rv < out_v[y, x]:
                        out_v[y, x] = rv
                    out_m[y, x] = 1
            elif out_m[y, x] == 2:
                out_m[y, x] = 1
    return out_v_np, out_m_np
