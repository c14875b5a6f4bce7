import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from restereo.config import PipelineConfig, validate_config
from restereo.pyramid import (
    build_pyramid,
    crop_to,
    downsample_by_two,
    extract_features,
    pad_to_multiple,
)
from restereo.types import PlanarImage


def _img(rng, h, w, c=1):
    return PlanarImage(rng.random((c, h, w)).astype(np.float32))


# ----------------------------------------------------------------- pad


@pytest.mark.parametrize(
    "size,multiple,expected",
    [((375, 1242), 48, (384, 1248)), ((96, 96), 48, (96, 96)), ((50, 50), 48, (96, 96))],
)
def test_pad_sizes(rng, size, multiple, expected):
    h, w = size
    padded, rec = pad_to_multiple(_img(rng, h, w), multiple)
    assert (padded.height, padded.width) == expected
    assert (rec.height, rec.width) == (h, w)
    assert (rec.padded_height, rec.padded_width) == expected


def test_pad_preserves_content_and_crops_back(rng):
    img = _img(rng, 5, 7)
    padded, rec = pad_to_multiple(img, 4)
    assert np.array_equal(crop_to(padded.data, rec), img.data)


def test_pad_reflects_rows(rng):
    img = _img(rng, 6, 6)
    padded, _ = pad_to_multiple(img, 8)
    # reflect: first padded row repeats the second-to-last source row
    assert np.array_equal(padded.data[0, 6, :6], img.data[0, 4, :])


@given(h=st.integers(1, 30), w=st.integers(1, 30), m=st.integers(1, 16))
@settings(max_examples=60, deadline=None)
def test_pad_dimensions_always_divide(h, w, m):
    img = PlanarImage(np.zeros((1, h, w), dtype=np.float32))
    padded, rec = pad_to_multiple(img, m)
    assert padded.height % m == 0 and padded.width % m == 0
    assert padded.height - h < m and padded.width - w < m
    assert crop_to(padded.data, rec).shape == (1, h, w)


def test_pad_rejects_bad_multiple(rng):
    with pytest.raises(ValueError):
        pad_to_multiple(_img(rng, 4, 4), 0)


# ----------------------------------------------------------- downsample


def test_downsample_examples():
    quad = PlanarImage(np.array([[[1.0, 2.0], [3.0, 4.0]]], dtype=np.float32))
    assert downsample_by_two(quad).data[0, 0, 0] == pytest.approx(2.5)
    const = PlanarImage(np.full((2, 4, 4), 0.7, dtype=np.float32))
    assert np.allclose(downsample_by_two(const).data, 0.7, atol=1e-7)
    checker = np.indices((4, 4)).sum(axis=0) % 2
    img = PlanarImage(checker[None].astype(np.float32))
    assert np.allclose(downsample_by_two(img).data, 0.5, atol=1e-7)


def test_downsample_rejects_odd(rng):
    with pytest.raises(ValueError):
        downsample_by_two(_img(rng, 3, 4))


def test_downsample_matches_block_oracle(rng):
    img = _img(rng, 6, 8, c=2)
    out = downsample_by_two(img)
    ref = oracles.block_mean_loops(img.data, 2)
    assert np.allclose(out.data, ref, atol=1e-6)


# ------------------------------------------------------------- features


def test_census_constant_image_all_zero():
    img = PlanarImage(np.full((1, 8, 8), 0.3, dtype=np.float32))
    feats = extract_features(img, "census")
    assert feats.channels == 25
    assert np.array_equal(feats.plane(0), img.plane(0))
    assert not feats.data[1:].any()  # ties compare false


def test_census_ramp_direction():
    ramp = np.tile(np.arange(9, dtype=np.float32) / 9.0, (9, 1))
    feats = extract_features(PlanarImage(ramp[None]), "census")
    bits = feats.data[1:]
    # row-major neighbour order: plane 11 is (dy=0, dx=-1), plane 12 is (0, +1)
    assert not bits[11, 3:6, 3:6].any()
    assert bits[12, 3:6, 3:6].all()


def test_census_matches_loop_oracle(rng):
    lum = rng.random((7, 9)).astype(np.float32)
    feats = extract_features(PlanarImage(lum[None]), "census")
    ref = oracles.census_loops(lum)
    assert np.array_equal(feats.data[1:], ref)


def test_census_monotone_remap_invariance(rng):
    lum = rng.random((10, 11)).astype(np.float32)
    remapped = (0.2 + 0.5 * lum**3).astype(np.float32)
    a = extract_features(PlanarImage(lum[None]), "census").data[1:]
    b = extract_features(PlanarImage(remapped[None]), "census").data[1:]
    assert np.array_equal(a, b)


def test_sad_and_ncc_features_are_luminance(rng):
    rgb = _img(rng, 5, 6, c=3)
    for kind in ("sad", "ncc"):
        feats = extract_features(rgb, kind)
        assert feats.channels == 1
        assert np.allclose(feats.plane(0), rgb.luminance(), atol=1e-7)


def test_extract_features_rejects_unknown_kind(rng):
    with pytest.raises(ValueError):
        extract_features(_img(rng, 4, 4), "gradient")


# --------------------------------------------------------------- pyramid


def test_pyramid_level_sizes(rng):
    cfg = validate_config(PipelineConfig(scale_dens=(24, 12, 6, 3)))
    pyr = build_pyramid(_img(rng, 96, 96), cfg)
    sizes = [(f.height, f.width) for _, f in pyr.levels]
    assert sizes == [(4, 4), (8, 8), (16, 16), (32, 32)]


def test_pyramid_coarsest_level_1248x384(rng):
    cfg = validate_config(PipelineConfig(scale_dens=(48, 24, 12, 6, 3)))
    pyr = build_pyramid(_img(rng, 384, 1248), cfg)
    assert (pyr.level(48).height, pyr.level(48).width) == (8, 26)


def test_pyramid_constant_input_constant_levels():
    cfg = validate_config(PipelineConfig(scale_dens=(12, 6, 3), head="sad"))
    img = PlanarImage(np.full((1, 48, 48), 0.25, dtype=np.float32))
    pyr = build_pyramid(img, cfg)
    for _, feats in pyr.levels:
        assert np.allclose(feats.data, 0.25, atol=1e-6)


def test_pyramid_levels_match_direct_downsample(rng):
    """Chain full -> /3 -> /6 equals one-shot block means at each scale."""
    img = _img(rng, 24, 30)
    cfg = validate_config(PipelineConfig(scale_dens=(6, 3), head="sad"))
    pyr = build_pyramid(img, cfg)
    ref3 = oracles.block_mean_loops(img.data, 3)
    assert np.allclose(pyr.level(3).plane(0), ref3[0], atol=1e-5)
    ref6 = oracles.block_mean_loops(ref3, 2)
    assert np.allclose(pyr.level(6).plane(0), ref6[0], atol=1e-5)


def test_pyramid_left_right_shapes_agree(rng):
    cfg = validate_config(PipelineConfig(scale_dens=(12, 6, 3)))
    a = build_pyramid(_img(rng, 37, 51), cfg)
    b = build_pyramid(_img(rng, 37, 51), cfg)
    for (da, fa), (db, fb) in zip(a.levels, b.levels):
        assert da == db and fa.data.shape == fb.data.shape
