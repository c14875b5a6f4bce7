import numpy as np
import pytest
from hypothesis import given, strategies as st

from restereo.types import DisparityMap, FeaturePyramid, PlanarImage, SymmetricCostVolume


# ---------------------------------------------------------------- volume


@pytest.mark.parametrize("d_cv", range(2, 65, 2))
def test_candidate_window_layout(d_cv):
    """Signed window spans [-d_cv/2 + 1, d_cv/2] with zero at slot d_cv/2 - 1."""
    cv = SymmetricCostVolume(np.zeros((d_cv, 2, 2), dtype=np.float32))
    cands = cv.candidate_values()
    assert cands[0] == -d_cv // 2 + 1
    assert cands[-1] == d_cv // 2
    assert cands[cv.zero_index] == 0
    assert cv.zero_index == d_cv // 2 - 1
    # positive candidates outnumber negative by exactly one
    assert (cands > 0).sum() == (cands < 0).sum() + 1
    # consecutive integers, so index <-> candidate is a bijection
    assert np.array_equal(np.diff(cands), np.ones(d_cv - 1))
    for k in range(d_cv):
        assert cv.candidate_of_index(k) == cands[k]


def test_candidate_index_bounds():
    cv = SymmetricCostVolume(np.zeros((4, 1, 1), dtype=np.float32))
    with pytest.raises(IndexError):
        cv.candidate_of_index(4)
    with pytest.raises(IndexError):
        cv.candidate_of_index(-1)


@pytest.mark.parametrize("d_cv", [1, 3, 5])
def test_volume_rejects_odd_window(d_cv):
    with pytest.raises(ValueError):
        SymmetricCostVolume(np.zeros((d_cv, 2, 2), dtype=np.float32))


def test_volume_rejects_nonfinite():
    costs = np.zeros((4, 2, 2), dtype=np.float32)
    costs[0, 0, 0] = np.nan
    with pytest.raises(ValueError):
        SymmetricCostVolume(costs)


def test_volume_buffer_is_frozen():
    cv = SymmetricCostVolume(np.zeros((4, 2, 2), dtype=np.float32))
    with pytest.raises(ValueError):
        cv.costs[0, 0, 0] = 1.0


# ---------------------------------------------------------------- image


def test_planar_image_shapes_and_planes(rng):
    arr = rng.random((3, 4, 5)).astype(np.float32)
    img = PlanarImage(arr)
    assert (img.channels, img.height, img.width) == (3, 4, 5)
    assert np.array_equal(img.plane(2), arr[2])


def test_planar_image_from_array_moves_channels(rng):
    hw = rng.random((4, 5))
    assert PlanarImage.from_array(hw).channels == 1
    hwc = rng.random((4, 5, 3))
    img = PlanarImage.from_array(hwc)
    assert img.channels == 3
    assert np.allclose(img.plane(1), hwc[:, :, 1], atol=1e-7)


def test_luminance_rec601(rng):
    rgb = rng.random((3, 6, 7)).astype(np.float32)
    img = PlanarImage(rgb)
    expected = 0.299 * rgb[0] + 0.587 * rgb[1] + 0.114 * rgb[2]
    assert np.allclose(img.luminance(), expected, atol=1e-6)
    gray = PlanarImage(rgb[:1])
    assert np.array_equal(gray.luminance(), rgb[0])


def test_planar_image_rejects_bad_input():
    with pytest.raises(ValueError):
        PlanarImage(np.zeros((4, 5), dtype=np.float32))  # missing channel axis
    with pytest.raises(ValueError):
        PlanarImage(np.full((1, 2, 2), np.inf, dtype=np.float32))
    with pytest.raises(ValueError):
        PlanarImage.from_array(np.zeros((2, 2, 2, 2)))


def test_planar_image_buffer_is_frozen(rng):
    img = PlanarImage(rng.random((1, 3, 3)).astype(np.float32))
    with pytest.raises(ValueError):
        img.data[0, 0, 0] = 0.5


# ------------------------------------------------------------- disparity


def test_disparity_defaults_and_dense():
    d = DisparityMap.dense(np.zeros((3, 4)), scale_den=6)
    assert d.valid.all()
    assert d.scale_den == 6
    assert (d.height, d.width) == (3, 4)


def test_disparity_rejects_mismatched_mask():
    with pytest.raises(ValueError):
        DisparityMap(np.zeros((3, 4)), np.ones((4, 3), dtype=bool), 1)


def test_disparity_rejects_bad_scale():
    with pytest.raises(ValueError):
        DisparityMap.dense(np.zeros((2, 2)), scale_den=0)
    with pytest.raises(ValueError):
        DisparityMap.dense(np.zeros((2, 2)), scale_den=1.5)


def test_disparity_allows_nonfinite_only_when_invalid():
    values = np.array([[np.nan, 1.0]])
    valid = np.array([[False, True]])
    d = DisparityMap(values, valid, 1)
    assert d.valid.sum() == 1
    with pytest.raises(ValueError):
        DisparityMap(values, np.array([[True, True]]), 1)


@given(st.integers(1, 6), st.integers(1, 6))
def test_disparity_none_mask_means_dense(h, w):
    d = DisparityMap(np.zeros((h, w)), None, 1)
    assert d.valid.all()


# --------------------------------------------------------------- pyramid


def test_pyramid_ordering_enforced(rng):
    img = PlanarImage(rng.random((1, 4, 4)).astype(np.float32))
    FeaturePyramid(((12, img), (6, img), (3, img)))
    with pytest.raises(ValueError):
        FeaturePyramid(((3, img), (6, img)))
    with pytest.raises(ValueError):
        FeaturePyramid(())


def test_pyramid_level_lookup(rng):
    a = PlanarImage(rng.random((1, 2, 2)).astype(np.float32))
    b = PlanarImage(rng.random((1, 4, 4)).astype(np.float32))
    pyr = FeaturePyramid(((6, a), (3, b)))
    assert pyr.scale_dens == (6, 3)
    assert pyr.level(3) is b
    with pytest.raises(KeyError):
        pyr.level(12)
