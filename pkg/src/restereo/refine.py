"""Full-resolution refinement of the cascade output.

The photometric mode replaces a learned refinement network with classic
ingredients: a left-right consistency check (using a second cascade run
on the mirrored pair), background fill of the failed pixels, and one
confidence-weighted joint bilateral pass guided by left luminance, with
confidence derived from the photometric warp error.
"""

from __future__ import annotations

import numpy as np

from . import kernels
from .config import PipelineConfig
from .pipeline import run_multiscale, upsample_disparity
from .pyramid import PadRecord, build_pyramid, crop_to
from .types import DisparityMap, PlanarImage


def photometric_error(left: PlanarImage, right: PlanarImage, d: DisparityMap):
    """|left - warped right| luminance error of a candidate disparity."""
    if (left.height, left.width) != (d.height, d.width):
        raise ValueError("disparity shape must match images")
    lum_l = left.luminance()
    lum_r = right.luminance()
    warped = kernels.warp_horizontal(lum_r[None, :, :], d.values)[0]
    return np.abs(lum_l - warped)


def lr_consistency_mask(d_left: DisparityMap, d_right: DisparityMap, tolerance=1.0):
    """Pixels whose left disparity agrees with the right-reference map.

    The right map is read at round(x - d_left); out-of-bounds lookups and
    disagreements beyond the tolerance are marked invalid.
    """
    if d_left.values.shape != d_right.values.shape:
        raise ValueError("left and right maps must share a shape")
    h, w = d_left.values.shape
    xs = np.arange(w, dtype=np.float64)[None, :] - d_left.values
    xr = np.floor(xs + 0.5).astype(np.int64)  # round half up
    inside = (xr >= 0) & (xr < w)
    xr_c = np.clip(xr, 0, w - 1)
    rows = np.arange(h)[:, None]
    err = np.abs(d_left.values - d_right.values[rows, xr_c])
    agree = err <= tolerance
    return inside & agree & d_left.valid & d_right.valid[rows, xr_c]


def mirrored_disparity(left: PlanarImage, right: PlanarImage, cfg: PipelineConfig):
    """Right-reference disparity via the horizontal mirror trick.

    Flipping both images swaps their roles while keeping disparities
    positive, so one extra cascade run yields the right-reference map.
    """
    flipped_left = PlanarImage(left.data[:, :, ::-1])
    flipped_right = PlanarImage(right.data[:, :, ::-1])
    lpyr = build_pyramid(flipped_right, cfg)
    rpyr = build_pyramid(flipped_left, cfg)
    d, _ = run_multiscale(lpyr, rpyr, cfg)
    d_full = upsample_disparity(d, 1)
    return DisparityMap(d_full.values[:, ::-1], d_full.valid[:, ::-1], 1)


def refine_full(
    d_finest: DisparityMap,
    left: PlanarImage,
    right: PlanarImage,
    cfg: PipelineConfig,
    pad_record: PadRecord = None,
) -> DisparityMap:
    """Lift the finest-scale estimate to input resolution.

    refinement == "none" upsamples and crops only.  The photometric mode
    additionally masks left-right inconsistencies, fills them from the
    horizontal background, and runs one joint bilateral pass; `left` and
    `right` must be the padded full-resolution images.
    """
    if (left.height, left.width) != (
        d_finest.height * d_finest.scale_den,
        d_finest.width * d_finest.scale_den,
    ):
        raise ValueError("images do not match the finest scale geometry")
    d_full = upsample_disparity(d_finest, 1)
    if cfg.refinement == "none":
        if pad_record is None:
            return d_full
        return DisparityMap(
            crop_to(d_full.values, pad_record), crop_to(d_full.valid, pad_record), 1
        )

    rp = cfg.refine_params
    d_right = mirrored_disparity(left, right, cfg)
    consistent = lr_consistency_mask(d_full, d_right, rp.lr_tolerance)
    filled_values, filled_valid = kernels.fill_background(d_full.values, consistent)
    filled = DisparityMap(filled_values, filled_valid, 1)
    err = photometric_error(left, right, filled)
    conf = 1.0 / (1.0 + err.astype(np.float64) / rp.photo_scale)
    smoothed = kernels.joint_bilateral(
        filled.values,
        left.luminance(),
        conf,
        rp.spatial_sigma,
        rp.range_sigma,
        rp.radius,
    )
    valid = filled.valid
    if pad_record is not None:
        smoothed = crop_to(smoothed, pad_record)
        valid = crop_to(valid, pad_record)
    return DisparityMap(smoothed, valid, 1)
