"""End-to-end matching on an image pair."""

from __future__ import annotations

import time
from dataclasses import dataclass

from .config import PipelineConfig, validate_config
from .pipeline import RunTrace, run_multiscale
from .pyramid import build_pyramid, pad_to_multiple
from .refine import refine_full
from .types import DisparityMap, PlanarImage


@dataclass
class MatchResult:
    disparity: DisparityMap  # full resolution, original (uncropped-pad) size
    trace: RunTrace


def match_pair(
    left: PlanarImage,
    right: PlanarImage,
    cfg: PipelineConfig = None,
    coarse_init: DisparityMap = None,
) -> MatchResult:
    """Match a rectified pair: pad, build pyramids, run the cascade,
    refine to input resolution.  Both images must share a shape.
    """
    cfg = validate_config(cfg if cfg is not None else PipelineConfig())
    if left.data.shape[1:] != right.data.shape[1:]:
        raise ValueError("left and right images must share a shape")
    t0 = time.perf_counter()
    left_p, record = pad_to_multiple(left, cfg.coarsest_den)
    right_p, _ = pad_to_multiple(right, cfg.coarsest_den)
    left_pyr = build_pyramid(left_p, cfg)
    right_pyr = build_pyramid(right_p, cfg)
    d_finest, trace = run_multiscale(left_pyr, right_pyr, cfg, coarse_init)
    t1 = time.perf_counter()
    out = refine_full(d_finest, left_p, right_p, cfg, pad_record=record)
    trace.refine_seconds = time.perf_counter() - t1
    trace.total_seconds = time.perf_counter() - t0
    return MatchResult(out, trace)
