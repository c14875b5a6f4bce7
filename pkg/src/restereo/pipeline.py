"""Coarse-to-fine residual cascade over a feature pyramid.

The coarsest scale predicts a full disparity map inside its candidate
window; every finer scale upsamples the running estimate, warps the
right features by it, and predicts a signed residual with the same
single-scale machinery.  Each scale therefore extends the reachable
range by half its candidate window, which is where the budget
arithmetic in config.d_max_budget comes from.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .config import PipelineConfig
from .matcher import predict
from .types import DisparityMap, FeaturePyramid, PlanarImage


def upsample_disparity(d: DisparityMap, to_den) -> DisparityMap:
    """Bilinear upsample to a finer scale, rescaling values to its units.

    The target denominator must divide the source one; validity is
    nearest-neighbour upsampled.
    """
    to_den = int(to_den)
    if to_den < 1:
        raise ValueError("scale_den must be a positive integer")
    if d.scale_den == to_den:
        return d
    if d.scale_den % to_den:
        raise ValueError(
            f"non-integer scale ratio from 1/{d.scale_den} to 1/{to_den}"
        )
    r = d.scale_den // to_den
    values = kernels.upsample_bilinear(d.values, r) * float(r)
    valid = np.repeat(np.repeat(d.valid, r, axis=0), r, axis=1)
    return DisparityMap(values, valid, to_den)


def warp_features(f_right: PlanarImage, d: DisparityMap) -> PlanarImage:
    """Resample right features toward the left view by the current
    disparity, so the remaining offset is within the residual window.
    """
    if (f_right.height, f_right.width) != (d.height, d.width):
        raise ValueError("disparity shape must match features")
    return PlanarImage(kernels.warp_horizontal(f_right.data, d.values))


@dataclass
class ScaleRecord:
    scale_den: int
    width: int
    height: int
    cells: int  # width * height * d_cv
    head_seconds: float
    total_seconds: float
    residual_mean: float  # signed mean of this scale's prediction
    residual_mean_abs: float

    def to_dict(self):
        return {
            "scale_den": self.scale_den,
            "width": self.width,
            "height": self.height,
            "cells": self.cells,
            "head_seconds": self.head_seconds,
            "total_seconds": self.total_seconds,
            "residual_mean": self.residual_mean,
            "residual_mean_abs": self.residual_mean_abs,
        }


@dataclass
class RunTrace:
    scales: list = field(default_factory=list)
    d_max: float = 0.0
    backend: str = ""
    threads: int = 1
    cascade_seconds: float = 0.0
    refine_seconds: float = 0.0
    total_seconds: float = 0.0

    @property
    def total_cells(self) -> int:
        return sum(s.cells for s in self.scales)

    @property
    def finest_cells(self) -> int:
        return self.scales[-1].cells

    def to_dict(self):
        return {
            "backend": self.backend,
            "threads": self.threads,
            "d_max": self.d_max,
            "total_cells": self.total_cells,
            "finest_cells": self.finest_cells,
            "cascade_seconds": self.cascade_seconds,
            "refine_seconds": self.refine_seconds,
            "total_seconds": self.total_seconds,
            "scales": [s.to_dict() for s in self.scales],
        }


def run_multiscale(
    left_pyr: FeaturePyramid,
    right_pyr: FeaturePyramid,
    cfg: PipelineConfig,
    coarse_init: DisparityMap = None,
) -> tuple:
    """Run the cascade over matched pyramids.

    coarse_init replaces the coarsest-scale prediction when given (it
    must live at the coarsest scale); finer scales then correct it
    through their residual windows.  Returns (finest disparity, trace).
    """
    if left_pyr.scale_dens != tuple(cfg.scale_dens) or right_pyr.scale_dens != tuple(
        cfg.scale_dens
    ):
        raise ValueError("pyramid scales do not match the config")
    if left_pyr.feature_kind != cfg.head or right_pyr.feature_kind != cfg.head:
        raise ValueError("pyramid features do not match the configured head")

    params = cfg.agg_params
    trace = RunTrace(
        d_max=cfg.d_max,
        backend=kernels.get_backend(),
        threads=kernels.get_num_threads(),
    )
    t_start = time.perf_counter()
    disp = None
    for (den, fl), (den_r, fr) in zip(left_pyr.levels, right_pyr.levels):
        if fl.data.shape[1:] != fr.data.shape[1:]:
            raise ValueError("pyramid level shapes differ")
        t0 = time.perf_counter()
        if disp is None:
            if coarse_init is not None:
                if coarse_init.scale_den != den:
                    raise ValueError("coarse_init must live at the coarsest scale")
                if (coarse_init.height, coarse_init.width) != (fl.height, fl.width):
                    raise ValueError("coarse_init shape does not match the coarsest level")
                disp = coarse_init
                head_s = 0.0
                res_mean = 0.0
                res_mean_abs = 0.0
            else:
                th = time.perf_counter()
                pred = predict(
                    fl, fr, cfg.d_cv, params, kind=cfg.head, scale_den=den
                )
                head_s = time.perf_counter() - th
                disp = pred
                res_mean = float(pred.values.mean())
                res_mean_abs = float(np.abs(pred.values).mean())
        else:
            disp = upsample_disparity(disp, den)
            warped = warp_features(fr, disp)
            th = time.perf_counter()
            res = predict(fl, warped, cfg.d_cv, params, kind=cfg.head, scale_den=den)
            head_s = time.perf_counter() - th
            res_mean = float(res.values.mean())
            res_mean_abs = float(np.abs(res.values).mean())
            disp = DisparityMap(
                disp.values + res.values, disp.valid & res.valid, den
            )
        trace.scales.append(
            ScaleRecord(
                scale_den=den,
                width=fl.width,
                height=fl.height,
                cells=fl.width * fl.height * cfg.d_cv,
                head_seconds=head_s,
                total_seconds=time.perf_counter() - t0,
                residual_mean=res_mean,
                residual_mean_abs=res_mean_abs,
            )
        )
    trace.cascade_seconds = time.perf_counter() - t_start
    trace.total_seconds = trace.cascade_seconds
    return disp, trace
