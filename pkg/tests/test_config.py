from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from restereo.config import (
    MAX_D_CV,
    AggregatorParams,
    ConfigError,
    PipelineConfig,
    RefineParams,
    check_reachability,
    d_max_budget,
    rescale_disparity,
    validate_config,
)


def test_budget_reference_values():
    assert d_max_budget(4, [48, 24, 12, 6, 3]) == 186
    assert d_max_budget(8, [24, 12, 6, 3]) == 180
    assert d_max_budget(2, [1]) == 1


@given(
    d_half=st.integers(min_value=1, max_value=64),
    dens=st.lists(st.integers(min_value=1, max_value=96), min_size=1, max_size=8),
)
def test_budget_matches_exact_fraction_sum(d_half, dens):
    # independent arithmetic in exact rationals
    expected = Fraction(2 * d_half, 2) * sum(Fraction(d) for d in dens)
    assert d_max_budget(2 * d_half, dens) == float(expected)


@pytest.mark.parametrize("bad", [3, 1, 0, -2])
def test_budget_rejects_bad_window(bad):
    with pytest.raises(ConfigError):
        d_max_budget(bad, [6, 3])


def test_budget_rejects_empty_and_nonpositive_scales():
    with pytest.raises(ConfigError):
        d_max_budget(4, [])
    with pytest.raises(ConfigError):
        d_max_budget(4, [6, 0])


def test_rescale_examples():
    assert rescale_disparity(3.0, 24, 12) == 6.0
    assert rescale_disparity(12.0, 24, 3) == 96.0
    assert rescale_disparity(7.5, 3, 3) == 7.5


@given(
    v=st.floats(-500, 500),
    a=st.integers(1, 64),
    b=st.integers(1, 64),
)
def test_rescale_round_trip(v, a, b):
    out = rescale_disparity(rescale_disparity(v, a, b), b, a)
    assert out == pytest.approx(v, rel=1e-12, abs=1e-12)


def test_defaults_validate():
    cfg = validate_config(PipelineConfig())
    assert cfg.scale_dens == (48, 24, 12, 6, 3)
    assert cfg.d_cv % 2 == 0
    assert cfg.d_max == d_max_budget(cfg.d_cv, cfg.scale_dens)


def test_validate_normalizes_selectors():
    cfg = validate_config(PipelineConfig(head="CENSUS", aggregator="SGM"))
    assert cfg.head == "census"
    assert cfg.aggregator == "sgm"
    assert cfg.agg_params.kind == "sgm"


@pytest.mark.parametrize(
    "kwargs,msg",
    [
        (dict(d_cv=7), "d_cv must be even"),
        (dict(d_cv=0), "d_cv must be >= 2"),
        (dict(d_cv=MAX_D_CV + 2), "d_cv too large"),
        (dict(scale_dens=()), "non-empty"),
        (dict(scale_dens=(6, 12, 3)), "strictly decreasing"),
        (dict(scale_dens=(9, 6, 3)), "non-integer scale ratio"),
        (dict(scale_dens=(6, 0)), "positive integers"),
        (dict(head="sobel"), "unknown head"),
        (dict(aggregator="median"), "unknown aggregator"),
        (dict(refinement="subpixel"), "unknown refinement"),
    ],
)
def test_validate_rejects_each_invariant(kwargs, msg):
    with pytest.raises(ConfigError, match=msg):
        validate_config(PipelineConfig(**kwargs))


@pytest.mark.parametrize(
    "params,msg",
    [
        (AggregatorParams(box_radius=-1), "box_radius"),
        (AggregatorParams(filter_iterations=0), "filter_iterations"),
        (AggregatorParams(sgm_p1=2.0, sgm_p2=1.0), "penalties"),
        (AggregatorParams(sgm_p1=-0.1), "penalties"),
        (AggregatorParams(sgm_paths=8), "sgm_paths"),
    ],
)
def test_validate_rejects_bad_aggregator_params(params, msg):
    with pytest.raises(ConfigError, match=msg):
        validate_config(PipelineConfig(agg_params=params))


@pytest.mark.parametrize(
    "params,msg",
    [
        (RefineParams(lr_tolerance=-0.5), "lr_tolerance"),
        (RefineParams(spatial_sigma=0.0), "sigmas"),
        (RefineParams(range_sigma=-1.0), "sigmas"),
        (RefineParams(photo_scale=0.0), "photo_scale"),
        (RefineParams(radius=0), "radius"),
    ],
)
def test_validate_rejects_bad_refine_params(params, msg):
    with pytest.raises(ConfigError, match=msg):
        validate_config(PipelineConfig(refine_params=params))


def test_default_aggregator_params():
    p = AggregatorParams()
    assert p.box_radius == 2
    assert p.filter_iterations == 3
    assert p.sgm_p1 == 0.5
    assert p.sgm_p2 == 4.0
    assert p.sgm_paths == 4


def test_reachability_ok_at_exact_budget():
    rep = check_reachability(PipelineConfig(scale_dens=(24, 12, 6, 3), d_cv=8), 180)
    assert rep.ok
    assert rep.budget == 180
    assert rep.shortfall == 0.0


def test_reachability_shortfall_suggests_next_even_window():
    cfg = PipelineConfig(scale_dens=(48, 24, 12, 6, 3), d_cv=4)
    rep = check_reachability(cfg, 192)
    assert not rep.ok
    assert rep.budget == 186
    assert rep.shortfall == 6
    assert rep.suggested_d_cv == 6
    assert rep.suggested_budget == 279
    # the suggestion is minimal: the next smaller even window cannot reach
    assert d_max_budget(rep.suggested_d_cv - 2, cfg.scale_dens) < 192


def test_reachability_trivial_exact():
    rep = check_reachability(PipelineConfig(scale_dens=(1,), d_cv=2), 1)
    assert rep.ok


@given(
    d_half=st.integers(1, 8),
    dens=st.lists(st.integers(1, 48), min_size=1, max_size=5),
    request_px=st.floats(0, 1000),
)
def test_reachability_suggestion_always_covers(d_half, dens, request_px):
    dens = tuple(sorted(set(dens), reverse=True))
    cfg = PipelineConfig(scale_dens=dens, d_cv=2 * d_half)
    rep = check_reachability(cfg, request_px)
    assert rep.suggested_budget >= request_px or rep.ok


def test_max_disparity_property_matches_budget():
    cfg = PipelineConfig(scale_dens=(12, 6, 3), d_cv=12)
    assert cfg.d_max == (12 / 2) * (12 + 6 + 3)


def test_frozen_configs_are_immutable():
    cfg = PipelineConfig()
    with pytest.raises(Exception):
        cfg.d_cv = 10
    with pytest.raises(Exception):
        cfg.agg_params.sgm_p1 = 9.0


def test_budget_accepts_numpy_integers():
    assert d_max_budget(np.int64(8), np.array([24, 12, 6, 3])) == 180
