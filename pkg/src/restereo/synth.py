"""Synthetic random-dot stereograms with exact ground truth.

Scenes are fronto-parallel planes textured with random dots.  The dot
field is generated wider than the image so the right view can be
rendered by exact inverse warping everywhere: pixels only the right
camera sees (past the left view's border, or background revealed next
to a nearer surface) get the continuation of the correct surface's
texture instead of unmatched noise.  Ground-truth validity marks the
pixels visible in both views, which is analytic for these layouts.
"""

from __future__ import annotations

import numpy as np

from .types import DisparityMap, PlanarImage

KINDS = ("constant", "two-plane", "ramp", "step-occlusion")

# Luminance bands.  Census matching is contrast-invariant, so dot
# contrast is chosen for the refinement stage instead: the near/far
# separation is far above the bilateral range sigma (the disparity edge
# is preserved), while within-surface contrast is large enough that a
# wrong match produces a visible photometric error.
_BG_BAND = (0.05, 0.35)
_FG_BAND = (0.65, 0.95)
_FULL_BAND = (0.40, 0.60)


def _dot_noise(rng, height, width, dot_size):
    gh = -(-height // dot_size)
    gw = -(-width // dot_size)
    g = rng.random((gh, gw))
    return np.repeat(np.repeat(g, dot_size, 0), dot_size, 1)[:height, :width]


def _band(tex, band):
    lo, hi = band
    return (lo + (hi - lo) * tex).astype(np.float32)


def occlusion_mask(d_map):
    """Left-view pixels hidden from the right camera, by painter scan.

    A shared target column x - d is won by the pixel with the larger
    disparity (nearer surface); within a row that is the larger x.
    Used as an independent check of the analytic validity masks.
    """
    h, w = d_map.shape
    xs = np.arange(w)[None, :]
    targets = xs - np.asarray(d_map, dtype=np.int64)
    ok = (targets >= 0) & (targets < w)
    rows = np.arange(h)[:, None]
    flat_t = (rows * w + targets)[ok]
    flat_x = (rows * w + xs)[ok]
    winner = np.full(h * w, -1, dtype=np.int64)
    np.maximum.at(winner, flat_t, flat_x)
    visible = np.zeros(h * w, dtype=bool)
    visible[flat_x[winner[flat_t] == flat_x]] = True
    return ~visible.reshape(h, w)


def make_stereogram(kind, width, height, d=20.0, d2=40.0, seed=0, dot_size=6):
    """Build (left, right, ground truth) for one of the scene kinds.

    constant: one fronto-parallel plane at disparity d.
    two-plane: left half at d, right half at d2; one vertical step edge.
    ramp: disparity varies linearly from d to d2 across the width.
    step-occlusion: a foreground strip (d2) over the background, giving
        an occlusion band on its left edge and a disocclusion band of
        revealed background on its right edge, both of width d2 - d.

    d and d2 are rounded to integers except for the ramp.  Ground-truth
    values cover every pixel; validity excludes occluded and out-of-view
    pixels.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown stereogram kind '{kind}'")
    if width < 2 or height < 1:
        raise ValueError("image dimensions too small")
    if d < 0 or d2 < 0:
        raise ValueError("disparities must be non-negative")
    rng = np.random.default_rng(seed)

    if kind == "ramp":
        return _make_ramp(rng, width, height, float(d), float(d2), dot_size)

    di, di2 = int(round(d)), int(round(d2))
    ext = max(di, di2)
    tex = _dot_noise(rng, height, width + ext, dot_size)
    xs = np.arange(width)[None, :]
    xe = np.arange(width + ext)[None, :]

    if kind == "constant":
        d_map = np.full((height, width), di, dtype=np.int64)
        lum_ext = _band(tex, _FULL_BAND)
        d_vis = np.full(width, di, dtype=np.int64)[None, :]
        valid = np.broadcast_to(xs >= di, (height, width)).copy()
    else:
        if di2 <= di:
            raise ValueError("foreground disparity must exceed background")
        if kind == "two-plane":
            fg_left = xe >= width // 2
            fg_right_lo, fg_right_hi = width // 2 - di2, width + ext
        else:  # step-occlusion
            fg_left = (xe >= width // 3) & (xe < (2 * width) // 3)
            fg_right_lo, fg_right_hi = width // 3 - di2, (2 * width) // 3 - di2
        lum_ext = np.where(fg_left, _band(tex, _FG_BAND), _band(tex, _BG_BAND))
        d_map = np.where(fg_left[:, :width], di2, di).astype(np.int64)
        d_map = np.broadcast_to(d_map, (height, width)).copy()
        d_vis = np.where((xs >= fg_right_lo) & (xs < fg_right_hi), di2, di)
        # background is occluded where the foreground's right-view span
        # lands on its targets: a band of width d2 - d left of each
        # foreground onset; everything else only needs to be in view
        occluded = np.zeros(width, dtype=bool)
        onset = width // 2 if kind == "two-plane" else width // 3
        occluded[max(onset - (di2 - di), 0) : onset] = True
        valid = np.broadcast_to(
            (xs >= d_map) & ~occluded[None, :] & ~(fg_left[:, :width] & (xs < di2)),
            (height, width),
        ).copy()

    right = np.take_along_axis(lum_ext, xs + d_vis, axis=1)[:, :width]
    left = lum_ext[:, :width]
    gt = DisparityMap(d_map.astype(np.float64), valid, 1)
    return (
        PlanarImage(left[None, :, :].astype(np.float32)),
        PlanarImage(right[None, :, :].astype(np.float32)),
        gt,
    )


def _make_ramp(rng, width, height, d, d2, dot_size):
    """Linear disparity ramp rendered by exact inverse warping.

    d(x) = d + (d2 - d) x / (W - 1) keeps left-to-right order as long
    as the slope stays above -1; the right view resamples an extended
    texture so its border content is real scene, not noise.
    """
    slope = (d2 - d) / (width - 1)
    if slope <= -1.0 or slope >= 1.0:
        raise ValueError("ramp slope must stay inside (-1, 1)")
    ext = int(np.ceil(max(d, d2))) + 2
    tex = _dot_noise(rng, height, width + ext, dot_size)
    left_ext = _band(tex, _FULL_BAND)
    xs = np.arange(width, dtype=np.float64)
    xs_ext = np.arange(width + ext, dtype=np.float64)
    d_row = d + slope * xs
    # right(t) = left(x) at t = x - d(x); invert the linear map
    src = (xs + d) / (1.0 - slope)
    right = np.empty((height, width), dtype=np.float32)
    for y in range(height):
        right[y] = np.interp(src, xs_ext, left_ext[y].astype(np.float64)).astype(
            np.float32
        )
    visible = np.broadcast_to(xs - d_row >= 0, (height, width))
    gt = DisparityMap(
        np.broadcast_to(d_row, (height, width)).copy(), visible.copy(), 1
    )
    return (
        PlanarImage(left_ext[None, :, :width].astype(np.float32).copy()),
        PlanarImage(right[None, :, :]),
        gt,
    )
