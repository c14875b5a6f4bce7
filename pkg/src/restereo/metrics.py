"""Disparity evaluation metrics and training-style losses."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .types import DisparityMap

# Per-scale loss weights, coarsest to finest.
DEFAULT_LOSS_WEIGHTS = (0.2, 0.4, 0.6, 1.0)


class MetricsError(ValueError):
    """Raised when an evaluation request is ill-posed."""


@dataclass(frozen=True)
class EvalReport:
    epe: float
    er1: float  # fraction with |error| strictly above 1 px
    er3: float
    d1: float  # |error| > 3 px and > 5% of the true magnitude
    smooth_l1: float
    n_valid: int
    n_total: int

    def to_dict(self):
        return {
            "epe": self.epe,
            "er1": self.er1,
            "er3": self.er3,
            "d1": self.d1,
            "smooth_l1": self.smooth_l1,
            "n_valid": self.n_valid,
            "n_total": self.n_total,
        }


def smooth_l1(x, quadratic=False):
    """Piecewise robust loss of a non-negative error magnitude.

    For x >= 1 the loss is x - 0.5; below 1 it is 0.5 * x by default, or
    the conventional 0.5 * x**2 when quadratic is set.  Accepts scalars
    or arrays; negative inputs are rejected.
    """
    arr = np.asarray(x, dtype=np.float64)
    if np.any(arr < 0):
        raise MetricsError("smooth_l1 expects non-negative error magnitudes")
    small = 0.5 * arr * arr if quadratic else 0.5 * arr
    out = np.where(arr >= 1.0, arr - 0.5, small)
    if np.isscalar(x) or arr.ndim == 0:
        return float(out)
    return out


def weighted_loss(losses, weights=DEFAULT_LOSS_WEIGHTS):
    """Weighted sum of per-scale losses, coarsest first."""
    losses = tuple(float(v) for v in losses)
    weights = tuple(float(v) for v in weights)
    if len(losses) != len(weights):
        raise MetricsError("losses and weights must have equal length")
    return float(sum(w * v for w, v in zip(weights, losses)))


def evaluate(pred: DisparityMap, gt: DisparityMap, quadratic_smooth_l1=False) -> EvalReport:
    """Standard disparity metrics over ground-truth-valid pixels only."""
    if pred.values.shape != gt.values.shape:
        raise MetricsError("prediction and ground truth shapes differ")
    if pred.scale_den != gt.scale_den:
        raise MetricsError("prediction and ground truth scales differ")
    mask = gt.valid
    n_valid = int(mask.sum())
    n_total = int(mask.size)
    if n_valid == 0:
        raise MetricsError("no labeled pixels to evaluate")
    err = np.abs(pred.values[mask] - gt.values[mask])
    gt_mag = np.abs(gt.values[mask])
    return EvalReport(
        epe=float(err.mean()),
        er1=float((err > 1.0).mean()),
        er3=float((err > 3.0).mean()),
        d1=float(((err > 3.0) & (err > 0.05 * gt_mag)).mean()),
        smooth_l1=float(smooth_l1(err, quadratic=quadratic_smooth_l1).mean()),
        n_valid=n_valid,
        n_total=n_total,
    )


def downsample_ground_truth(gt: DisparityMap, to_den) -> DisparityMap:
    """Sparse-aware downsampling for evaluating at a coarser scale.

    Each block contributes its valid sample nearest the block centre
    (scan order breaks ties); values are divided by the scale ratio.
    Blocks with no valid sample stay invalid.
    """
    to_den = int(to_den)
    if to_den % gt.scale_den:
        raise MetricsError("target scale must be a multiple of the source scale")
    f = to_den // gt.scale_den
    if f == 1:
        return gt
    h, w = gt.values.shape
    if h % f or w % f:
        raise MetricsError("dimensions must be divisible by the scale ratio")
    hh, ww = h // f, w // f
    vals = gt.values.reshape(hh, f, ww, f).transpose(0, 2, 1, 3).reshape(hh, ww, f * f)
    valid = gt.valid.reshape(hh, f, ww, f).transpose(0, 2, 1, 3).reshape(hh, ww, f * f)
    centre = (f - 1) / 2.0
    yy, xx = np.meshgrid(np.arange(f), np.arange(f), indexing="ij")
    dist = (np.abs(yy - centre) + np.abs(xx - centre)).ravel()
    order = np.argsort(dist, kind="stable")
    vals = vals[:, :, order]
    valid = valid[:, :, order]
    first = np.argmax(valid, axis=2)
    chosen = np.take_along_axis(vals, first[:, :, None], axis=2)[:, :, 0]
    any_valid = valid.any(axis=2)
    out_vals = np.where(any_valid, chosen / f, 0.0)
    return DisparityMap(out_vals, any_valid, to_den)
