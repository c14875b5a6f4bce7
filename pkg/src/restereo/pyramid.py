"""Image padding, downsampling chain, and per-scale matching features."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .config import PipelineConfig
from .types import FeaturePyramid, PlanarImage


@dataclass(frozen=True)
class PadRecord:
    """Original size kept so padded results can be cropped back."""

    width: int
    height: int
    padded_width: int
    padded_height: int


def pad_to_multiple(img: PlanarImage, multiple) -> tuple:
    """Reflect-pad right/bottom so both dimensions divide by `multiple`.

    Falls back to edge replication when a dimension is too small for
    reflection.  Returns (padded image, PadRecord).
    """
    m = int(multiple)
    if m < 1:
        raise ValueError("multiple must be >= 1")
    h, w = img.height, img.width
    ph = (-h) % m
    pw = (-w) % m
    record = PadRecord(w, h, w + pw, h + ph)
    if ph == 0 and pw == 0:
        return img, record
    mode = "reflect" if (h > ph and w > pw) else "edge"
    data = np.pad(img.data, ((0, 0), (0, ph), (0, pw)), mode=mode)
    return PlanarImage(data), record


def crop_to(arr, record: PadRecord):
    """Undo pad_to_multiple on a (H, W) or (C, H, W) array."""
    return arr[..., : record.height, : record.width]


def downsample_by_two(img: PlanarImage) -> PlanarImage:
    """2x2 block mean; dimensions must be even."""
    if img.height % 2 or img.width % 2:
        raise ValueError("dimensions must be even")
    return PlanarImage(kernels.block_mean(img.data, 2))


def extract_features(img: PlanarImage, kind) -> PlanarImage:
    """Matching features for one scale.

    census: luminance plane followed by 24 binary comparison planes.
    sad / ncc: the luminance plane alone.
    """
    lum = img.luminance()
    if kind == "census":
        planes = np.concatenate([lum[None, :, :], kernels.census_transform(lum)])
        return PlanarImage(planes)
    if kind in ("sad", "ncc"):
        return PlanarImage(lum[None, :, :])
    raise ValueError(f"unknown feature kind '{kind}'")


def build_pyramid(img: PlanarImage, cfg: PipelineConfig) -> FeaturePyramid:
    """Pad, downsample through the configured scales, extract features.

    Every level's dimensions equal the padded size divided exactly by its
    scale denominator; levels are returned coarsest first to match the
    cascade order.
    """
    padded, _ = pad_to_multiple(img, cfg.coarsest_den)
    by_den = {}
    cur = padded
    cur_den = 1
    for den in sorted(set(cfg.scale_dens)):
        factor = den // cur_den
        if den % cur_den or factor < 1:
            raise ValueError("scale denominators must form an integer chain")
        if factor > 1:
            cur = PlanarImage(kernels.block_mean(cur.data, factor))
            cur_den = den
        by_den[den] = cur
    levels = tuple(
        (den, extract_features(by_den[den], cfg.head)) for den in cfg.scale_dens
    )
    return FeaturePyramid(levels, feature_kind=cfg.head)
