"""Pure-numpy kernel implementations.

Reference semantics for the compiled backend: every function here defines
the exact arithmetic (dtypes, accumulation precision, border handling)
that `_native` must reproduce.  The `threads` argument is accepted for
signature compatibility and ignored; numpy runs single-threaded here.
"""

from __future__ import annotations

import numpy as np

NAME = "python"

CENSUS_RADIUS = 2
CENSUS_BITS = 24  # 5x5 window minus the centre


def census_transform(lum, threads=1):
    """Binary census planes, one per 5x5 neighbour, row-major offsets.

    Bit is 1.0 where the neighbour is strictly brighter than the centre;
    borders compare against edge-replicated samples.
    """
    h, w = lum.shape
    r = CENSUS_RADIUS
    padded = np.pad(lum, r, mode="edge")
    out = np.empty((CENSUS_BITS, h, w), dtype=np.float32)
    i = 0
    for dy in range(-r, r + 1):
        for dx in range(-r, r + 1):
            if dy == 0 and dx == 0:
                continue
            shifted = padded[r + dy : r + dy + h, r + dx : r + dx + w]
            out[i] = (shifted > lum).astype(np.float32)
            i += 1
    return out


def _shift_columns(arr, d):
    """Sample arr at column x - d with edge clamping (last axis)."""
    w = arr.shape[-1]
    idx = np.clip(np.arange(w) - d, 0, w - 1)
    return arr[..., idx]


def cost_volume_absdiff(f_left, f_right, d_cv, ch_start, threads=1):
    """Mean absolute feature difference over a signed candidate window.

    Slice k matches the left image against the right image shifted by
    candidate k - d_cv/2 + 1; channels before ch_start are skipped.
    """
    c, h, w = f_left.shape
    n = c - ch_start
    out = np.empty((d_cv, h, w), dtype=np.float32)
    for k in range(d_cv):
        d = k - d_cv // 2 + 1
        fr = _shift_columns(f_right, d)
        diff = np.abs(f_left[ch_start:] - fr[ch_start:])
        out[k] = (diff.sum(axis=0, dtype=np.float64) / n).astype(np.float32)
    return out


def _box_sum(arr, radius):
    """Windowed sums with edge-replicated borders, float64 integral image."""
    h, w = arr.shape
    k = 2 * radius + 1
    p = np.pad(arr, radius, mode="edge").astype(np.float64)
    c = np.cumsum(np.cumsum(p, axis=0), axis=1)
    c = np.pad(c, ((1, 0), (1, 0)))
    return c[k : k + h, k : k + w] - c[0:h, k : k + w] - c[k : k + h, 0:w] + c[0:h, 0:w]


def cost_volume_ncc(left, right, d_cv, radius, threads=1):
    """Windowed normalized cross-correlation mapped to [0, 1] costs.

    cost = (1 - ncc) / 2, so perfect correlation is 0 and perfect
    anti-correlation is 1.  Flat windows give ncc 0, a neutral 0.5.
    """
    h, w = left.shape
    n = float((2 * radius + 1) ** 2)
    l64 = left.astype(np.float64)
    el = _box_sum(l64, radius) / n
    vl = _box_sum(l64 * l64, radius) / n - el * el
    out = np.empty((d_cv, h, w), dtype=np.float32)
    for k in range(d_cv):
        d = k - d_cv // 2 + 1
        r64 = _shift_columns(right, d).astype(np.float64)
        er = _box_sum(r64, radius) / n
        vr = _box_sum(r64 * r64, radius) / n - er * er
        cov = _box_sum(l64 * r64, radius) / n - el * er
        denom = np.sqrt(np.clip(vl, 0.0, None) * np.clip(vr, 0.0, None) + 1e-12)
        ncc = cov / denom
        out[k] = np.clip(0.5 * (1.0 - ncc), 0.0, 1.0).astype(np.float32)
    return out


def box_filter_volume(cv, radius, iterations, threads=1):
    """Iterated box mean per candidate slice, edge-replicated, constant n."""
    n = float((2 * radius + 1) ** 2)
    out = cv
    for _ in range(iterations):
        nxt = np.empty_like(out)
        for k in range(out.shape[0]):
            nxt[k] = (_box_sum(out[k], radius) / n).astype(np.float32)
        out = nxt
    return out


def _sgm_line_sweep(planes, out, p1, p2, reverse):
    """One directional pass over (lines, steps, d) cost planes.

    Accumulates the recursion L = C + min(L_prev[d], L_prev[d +- 1] + p1,
    min L_prev + p2) - min L_prev into out, in place.
    """
    steps = planes.shape[1]
    order = range(steps - 1, -1, -1) if reverse else range(steps)
    state = None
    for x in order:
        cx = planes[:, x]
        if state is None:
            state = cx.copy()
        else:
            m = state.min(axis=1, keepdims=True)
            t = np.minimum(state, m + p2)
            t[:, 1:] = np.minimum(t[:, 1:], state[:, :-1] + p1)
            t[:, :-1] = np.minimum(t[:, :-1], state[:, 1:] + p1)
            state = cx + (t - m)
        out[:, x] += state


def sgm_aggregate(cv, p1, p2, threads=1):
    """Four-path semi-global aggregation (both horizontal, both vertical).

    Path sums are averaged, and the per-path min is subtracted each step,
    so with p1 = p2 = 0 the output equals the input exactly.
    """
    p1 = np.float32(p1)
    p2 = np.float32(p2)
    rows = np.ascontiguousarray(cv.transpose(1, 2, 0))  # (H, W, D)
    acc_rows = np.zeros_like(rows)
    _sgm_line_sweep(rows, acc_rows, p1, p2, reverse=False)
    _sgm_line_sweep(rows, acc_rows, p1, p2, reverse=True)
    cols = np.ascontiguousarray(cv.transpose(2, 1, 0))  # (W, H, D)
    acc_cols = np.zeros_like(cols)
    _sgm_line_sweep(cols, acc_cols, p1, p2, reverse=False)
    _sgm_line_sweep(cols, acc_cols, p1, p2, reverse=True)
    total = acc_rows.transpose(2, 0, 1) + acc_cols.transpose(2, 1, 0)
    return np.ascontiguousarray(total * np.float32(0.25))


def soft_argmax(cv, first_candidate, threads=1):
    """Softmax-weighted mean of candidate values over negated costs.

    Costs are shifted by the per-pixel minimum before exponentiation so
    the weights stay in (0, 1]; result is float64.
    """
    d = cv.shape[0]
    m = cv.min(axis=0)
    # subtract in float64 so the shift is exact for float32 inputs
    e = np.exp(m[None, :, :].astype(np.float64) - cv.astype(np.float64))
    wsum = e.sum(axis=0)
    cand = first_candidate + np.arange(d, dtype=np.float64)
    dsum = np.tensordot(cand, e, axes=(0, 0))
    return dsum / wsum


def warp_horizontal(img, disp, threads=1):
    """Sample each row of img at x - disp(x) with linear interpolation.

    Out-of-bounds source coordinates clamp to the row ends.
    """
    c, h, w = img.shape
    xs = np.arange(w, dtype=np.float64)[None, :] - disp
    x0 = np.floor(xs)
    frac = xs - x0
    i0 = np.clip(x0, 0, w - 1).astype(np.intp)
    i1 = np.clip(x0 + 1.0, 0, w - 1).astype(np.intp)
    rows = np.arange(h)[:, None]
    out = np.empty_like(img)
    for ch in range(c):
        plane = img[ch]
        out[ch] = ((1.0 - frac) * plane[rows, i0] + frac * plane[rows, i1]).astype(
            np.float32
        )
    return out


def upsample_bilinear(vals, factor, threads=1):
    """Integer-factor bilinear upsampling with half-pixel centre alignment."""
    h, w = vals.shape
    oh, ow = h * factor, w * factor
    sy = (np.arange(oh, dtype=np.float64) + 0.5) / factor - 0.5
    sx = (np.arange(ow, dtype=np.float64) + 0.5) / factor - 0.5
    y0f = np.floor(sy)
    x0f = np.floor(sx)
    wy = (sy - y0f)[:, None]
    wx = (sx - x0f)[None, :]
    y0 = np.clip(y0f, 0, h - 1).astype(np.intp)
    y1 = np.clip(y0f + 1.0, 0, h - 1).astype(np.intp)
    x0 = np.clip(x0f, 0, w - 1).astype(np.intp)
    x1 = np.clip(x0f + 1.0, 0, w - 1).astype(np.intp)
    v00 = vals[np.ix_(y0, x0)]
    v01 = vals[np.ix_(y0, x1)]
    v10 = vals[np.ix_(y1, x0)]
    v11 = vals[np.ix_(y1, x1)]
    return (1.0 - wy) * ((1.0 - wx) * v00 + wx * v01) + wy * (
        (1.0 - wx) * v10 + wx * v11
    )


def block_mean(img, factor, threads=1):
    """Non-overlapping factor x factor block averaging; dims must divide."""
    c, h, w = img.shape
    hh, ww = h // factor, w // factor
    r = img.reshape(c, hh, factor, ww, factor)
    return (r.sum(axis=(2, 4), dtype=np.float64) / (factor * factor)).astype(
        np.float32
    )


def joint_bilateral(values, guide, conf, spatial, range_lut, threads=1):
    """One cross-bilateral pass over values, guided by a luminance image.

    Tap weight = spatial(dy, dx) * range_lut(|guide diff|) * conf(q).
    Borders replicate; conf must be strictly positive so the denominator
    never vanishes.
    """
    h, w = values.shape
    r = (spatial.shape[0] - 1) // 2
    nbins = range_lut.shape[0]
    vp = np.pad(values, r, mode="edge")
    gp = np.pad(guide, r, mode="edge")
    cp = np.pad(conf, r, mode="edge")
    g64 = guide.astype(np.float64)
    num = np.zeros((h, w), dtype=np.float64)
    den = np.zeros((h, w), dtype=np.float64)
    for dy in range(-r, r + 1):
        for dx in range(-r, r + 1):
            vs = vp[r + dy : r + dy + h, r + dx : r + dx + w]
            gs = gp[r + dy : r + dy + h, r + dx : r + dx + w].astype(np.float64)
            cs = cp[r + dy : r + dy + h, r + dx : r + dx + w]
            dg = np.abs(gs - g64)
            idx = np.minimum((dg * nbins).astype(np.int64), nbins - 1)
            wgt = spatial[dy + r, dx + r] * range_lut[idx] * cs
            num += wgt * vs
            den += wgt
    return num / den


def fill_background(values, valid, threads=1):
    """Fill invalid pixels with the smaller of the nearest valid values
    to the left and right along each row (background wins).

    Rows with no valid pixel stay invalid with value 0.
    """
    h, w = values.shape
    valid = valid.astype(bool)
    cols = np.arange(w)[None, :]
    left_idx = np.maximum.accumulate(np.where(valid, cols, -1), axis=1)
    flipped = np.maximum.accumulate(np.where(valid[:, ::-1], cols, -1), axis=1)
    right_idx = (w - 1) - flipped[:, ::-1]
    rows = np.arange(h)[:, None]
    lv = np.where(
        left_idx >= 0, values[rows, np.clip(left_idx, 0, w - 1)], np.inf
    )
    rv = np.where(
        right_idx <= w - 1, values[rows, np.clip(right_idx, 0, w - 1)], np.inf
    )
    fill = np.minimum(lv, rv)
    filled_ok = np.isfinite(fill)
    out_values = np.where(valid, values, np.where(filled_ok, fill, 0.0))
    out_valid = (valid | filled_ok).astype(np.uint8)
    return out_values, out_valid
