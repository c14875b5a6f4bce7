"""Pipeline configuration, validation, and disparity-budget arithmetic."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

HEADS = ("census", "sad", "ncc")
AGGREGATORS = ("none", "box", "sgm")
REFINEMENTS = ("none", "photometric")

# SGM state is kept on the stack per scanline, so the candidate count is
# capped; far larger windows defeat the point of the residual scheme anyway.
MAX_D_CV = 256


class ConfigError(ValueError):
    """Raised for any invalid pipeline configuration."""


@dataclass(frozen=True)
class AggregatorParams:
    """Cost-aggregation settings; kind mirrors PipelineConfig.aggregator."""

    kind: str = "sgm"
    box_radius: int = 2
    filter_iterations: int = 3
    sgm_p1: float = 0.5
    sgm_p2: float = 4.0
    sgm_paths: int = 4  # two horizontal + two vertical


@dataclass(frozen=True)
class RefineParams:
    lr_tolerance: float = 0.75
    spatial_sigma: float = 9.0
    range_sigma: float = 0.1
    photo_scale: float = 0.05  # photometric error that halves a pixel's weight
    radius: int = 18  # 2 * spatial_sigma covers essentially all kernel mass


@dataclass(frozen=True)
class PipelineConfig:
    """Everything needed to run the multi-scale matcher on a pair."""

    scale_dens: tuple = (48, 24, 12, 6, 3)
    d_cv: int = 8
    head: str = "census"
    aggregator: str = "sgm"
    refinement: str = "photometric"
    agg_params: AggregatorParams = field(default_factory=AggregatorParams)
    refine_params: RefineParams = field(default_factory=RefineParams)

    @property
    def coarsest_den(self) -> int:
        return self.scale_dens[0]

    @property
    def finest_den(self) -> int:
        return self.scale_dens[-1]

    @property
    def d_max(self) -> float:
        return d_max_budget(self.d_cv, self.scale_dens)


def d_max_budget(d_cv, scale_dens) -> float:
    """Largest full-resolution disparity reachable by the cascade.

    Each scale contributes half the candidate window, expressed in
    full-resolution pixels, so the budget is (d_cv / 2) * sum(scale_dens).
    """
    if not isinstance(d_cv, (int, np.integer)) or d_cv < 2:
        raise ConfigError("d_cv must be an integer >= 2")
    if d_cv % 2 != 0:
        raise ConfigError("d_cv must be even")
    dens = tuple(scale_dens)
    if not dens:
        raise ConfigError("scale set must be non-empty")
    if any(not isinstance(d, (int, np.integer)) or d < 1 for d in dens):
        raise ConfigError("scale denominators must be positive integers")
    return (d_cv / 2.0) * sum(dens)


def rescale_disparity(value, from_den, to_den) -> float:
    """Re-express a disparity magnitude between scales.

    Pure arithmetic: pixels at 1/from scale become value * from/to pixels
    at 1/to scale.  Both denominators must be positive.
    """
    return value * from_den / to_den


def validate_config(cfg: PipelineConfig) -> PipelineConfig:
    """Check every invariant and return a normalized copy.

    Selectors are lowercased, the scale list becomes a tuple, and the
    aggregator params are synced to the selected aggregator.  Each
    violated invariant raises ConfigError with a distinct message.
    """
    dens = tuple(int(d) for d in cfg.scale_dens)
    if not dens:
        raise ConfigError("scale set must be non-empty")
    if any(d < 1 for d in dens):
        raise ConfigError("scale denominators must be positive integers")
    for a, b in zip(dens, dens[1:]):
        if a <= b:
            raise ConfigError("scale denominators must be strictly decreasing")
        if a % b != 0:
            raise ConfigError(
                f"non-integer scale ratio between 1/{a} and 1/{b}"
            )

    d_cv = int(cfg.d_cv)
    if d_cv < 2:
        raise ConfigError("d_cv must be >= 2")
    if d_cv % 2 != 0:
        raise ConfigError("d_cv must be even")
    if d_cv > MAX_D_CV:
        raise ConfigError(f"d_cv too large (max {MAX_D_CV})")

    head = str(cfg.head).lower()
    if head not in HEADS:
        raise ConfigError(f"unknown head '{cfg.head}' (expected one of {'|'.join(HEADS)})")
    aggregator = str(cfg.aggregator).lower()
    if aggregator not in AGGREGATORS:
        raise ConfigError(
            f"unknown aggregator '{cfg.aggregator}' (expected one of {'|'.join(AGGREGATORS)})"
        )
    refinement = str(cfg.refinement).lower()
    if refinement not in REFINEMENTS:
        raise ConfigError(
            f"unknown refinement '{cfg.refinement}' (expected one of {'|'.join(REFINEMENTS)})"
        )

    ap = cfg.agg_params
    if ap.box_radius < 0:
        raise ConfigError("box_radius must be >= 0")
    if ap.filter_iterations < 1:
        raise ConfigError("filter_iterations must be >= 1")
    if not (0.0 <= ap.sgm_p1 <= ap.sgm_p2):
        raise ConfigError("penalties must satisfy 0 <= sgm_p1 <= sgm_p2")
    if ap.sgm_paths != 4:
        raise ConfigError("sgm_paths must be 4")

    rp = cfg.refine_params
    if rp.lr_tolerance < 0:
        raise ConfigError("lr_tolerance must be >= 0")
    if rp.spatial_sigma <= 0 or rp.range_sigma <= 0:
        raise ConfigError("refinement sigmas must be positive")
    if rp.photo_scale <= 0:
        raise ConfigError("photo_scale must be positive")
    if rp.radius < 1:
        raise ConfigError("refinement radius must be >= 1")

    return replace(
        cfg,
        scale_dens=dens,
        d_cv=d_cv,
        head=head,
        aggregator=aggregator,
        refinement=refinement,
        agg_params=replace(ap, kind=aggregator),
    )


@dataclass(frozen=True)
class ReachabilityReport:
    ok: bool
    requested: float
    budget: float
    shortfall: float
    suggested_d_cv: int
    suggested_budget: float


def check_reachability(cfg: PipelineConfig, requested_d_max) -> ReachabilityReport:
    """Compare a requested disparity range against the config's budget.

    When the budget falls short, suggests the smallest even d_cv whose
    budget covers the request with the same scale set.
    """
    requested = float(requested_d_max)
    if requested < 0:
        raise ConfigError("requested disparity range must be >= 0")
    budget = d_max_budget(cfg.d_cv, cfg.scale_dens)
    if requested <= budget:
        return ReachabilityReport(True, requested, budget, 0.0, cfg.d_cv, budget)
    total = sum(cfg.scale_dens)
    suggested = 2 * int(-(-requested // total))  # 2 * ceil(requested / total)
    suggested = max(suggested, 2)
    return ReachabilityReport(
        False,
        requested,
        budget,
        requested - budget,
        suggested,
        d_max_budget(suggested, cfg.scale_dens),
    )
