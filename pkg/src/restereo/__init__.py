"""Iterative coarse-to-fine stereo matching with classical heads.

A full-range prediction at the coarsest scale is repeatedly upsampled
and corrected by signed residual predictions at finer scales, keeping
the matched range bounded while total cost stays close to the finest
scale alone.  Prediction heads (census, SAD, NCC), cost aggregation
(box, semi-global), and refinement are pluggable; hot kernels run on a
compiled backend when available, with a numpy fallback.
"""

from . import kernels
from .config import (
    AggregatorParams,
    ConfigError,
    PipelineConfig,
    RefineParams,
    check_reachability,
    d_max_budget,
    rescale_disparity,
    validate_config,
)
from .engine import MatchResult, match_pair
from .matcher import aggregate, build_cost_volume, predict, regress_disparity
from .metrics import EvalReport, MetricsError, evaluate, smooth_l1, weighted_loss
from .pipeline import RunTrace, run_multiscale, upsample_disparity, warp_features
from .pyramid import build_pyramid, extract_features, pad_to_multiple
from .refine import lr_consistency_mask, photometric_error, refine_full
from .synth import make_stereogram
from .types import (
    DisparityMap,
    FeaturePyramid,
    PlanarImage,
    SymmetricCostVolume,
)

__version__ = "0.1.0"

__all__ = [
    "AggregatorParams",
    "ConfigError",
    "DisparityMap",
    "EvalReport",
    "FeaturePyramid",
    "MatchResult",
    "MetricsError",
    "PipelineConfig",
    "PlanarImage",
    "RefineParams",
    "RunTrace",
    "SymmetricCostVolume",
    "aggregate",
    "build_cost_volume",
    "build_pyramid",
    "check_reachability",
    "d_max_budget",
    "evaluate",
    "extract_features",
    "kernels",
    "lr_consistency_mask",
    "make_stereogram",
    "match_pair",
    "pad_to_multiple",
    "photometric_error",
    "predict",
    "refine_full",
    "regress_disparity",
    "rescale_disparity",
    "run_multiscale",
    "smooth_l1",
    "upsample_disparity",
    "validate_config",
    "warp_features",
    "weighted_loss",
]
