"""Single-scale matching: cost volume construction, aggregation, regression.

The candidate window is symmetric around zero (one extra positive
candidate), so the same machinery predicts full disparities at the
coarsest scale and signed residuals everywhere else.
"""

from __future__ import annotations

import numpy as np

from . import kernels
from .config import AggregatorParams
from .types import DisparityMap, PlanarImage, SymmetricCostVolume

NCC_RADIUS = 2


def _infer_kind(f_left: PlanarImage):
    # census features carry 24 bit planes behind the luminance
    return "census" if f_left.channels == 25 else "sad"


def build_cost_volume(
    f_left: PlanarImage, f_right: PlanarImage, d_cv, kind=None, scale_den=1
) -> SymmetricCostVolume:
    """Per-pixel matching costs in [0, 1] over the signed window.

    census: mean Hamming distance over the bit planes (luminance plane
    excluded).  sad: mean absolute luminance difference.  ncc: windowed
    (1 - ncc) / 2.  `kind` defaults from the channel layout.
    """
    if f_left.data.shape != f_right.data.shape:
        raise ValueError("feature shapes differ")
    if kind is None:
        kind = _infer_kind(f_left)
    if kind == "census":
        if f_left.channels != 25:
            raise ValueError("census features need 25 planes")
        costs = kernels.cost_volume_absdiff(f_left.data, f_right.data, d_cv, ch_start=1)
    elif kind == "sad":
        costs = kernels.cost_volume_absdiff(f_left.data, f_right.data, d_cv, ch_start=0)
    elif kind == "ncc":
        costs = kernels.cost_volume_ncc(
            f_left.plane(0), f_right.plane(0), d_cv, radius=NCC_RADIUS
        )
    else:
        raise ValueError(f"unknown head '{kind}'")
    return SymmetricCostVolume(costs, scale_den=scale_den)


def aggregate(
    cv: SymmetricCostVolume, guide: PlanarImage, params: AggregatorParams
) -> SymmetricCostVolume:
    """Spatial cost aggregation; `guide` is the left luminance at the
    same scale (unused by the current aggregators, kept for guided ones).
    """
    if params.kind == "none":
        return cv
    if params.kind == "box":
        costs = kernels.box_filter_volume(
            cv.costs, params.box_radius, params.filter_iterations
        )
    elif params.kind == "sgm":
        costs = kernels.sgm_aggregate(cv.costs, params.sgm_p1, params.sgm_p2)
    else:
        raise ValueError(f"unknown aggregator '{params.kind}'")
    return SymmetricCostVolume(costs, scale_den=cv.scale_den)


def regress_disparity(cv: SymmetricCostVolume) -> DisparityMap:
    """Softmax-weighted expectation over candidates (lower cost, higher
    weight); keeps sub-candidate precision and stays inside the window.
    """
    first = float(-(cv.d_cv // 2) + 1)
    values = kernels.soft_argmax(cv.costs, first)
    return DisparityMap.dense(values, scale_den=cv.scale_den)


def predict(
    f_left: PlanarImage,
    f_right: PlanarImage,
    d_cv,
    params: AggregatorParams,
    kind=None,
    scale_den=1,
) -> DisparityMap:
    """Full single-scale prediction: costs -> aggregation -> regression."""
    cv = build_cost_volume(f_left, f_right, d_cv, kind=kind, scale_den=scale_den)
    guide = PlanarImage(f_left.plane(0)[None, :, :])
    cv = aggregate(cv, guide, params)
    return regress_disparity(cv)
