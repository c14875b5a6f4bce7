"""Core data containers shared by every pipeline stage.

All containers freeze their numpy buffers after validation, so a value
handed to another stage can be read concurrently but never mutated.
Operations return new containers instead of writing in place.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

LUMA_WEIGHTS = (0.299, 0.587, 0.114)  # Rec.601


def _freeze(arr):
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class PlanarImage:
    """Image stored as float32 planes with shape (channels, height, width)."""

    data: np.ndarray

    def __post_init__(self):
        data = np.ascontiguousarray(self.data, dtype=np.float32)
        if data.ndim != 3:
            raise ValueError("PlanarImage expects (channels, height, width)")
        if data.shape[0] < 1 or data.shape[1] < 1 or data.shape[2] < 1:
            raise ValueError("PlanarImage dimensions must be positive")
        if not np.all(np.isfinite(data)):
            raise ValueError("PlanarImage values must be finite")
        object.__setattr__(self, "data", _freeze(data))

    @classmethod
    def from_array(cls, arr) -> "PlanarImage":
        """Wrap a (H, W) or (H, W, C) array, moving channels to the front."""
        arr = np.asarray(arr)
        if arr.ndim == 2:
            arr = arr[None, :, :]
        elif arr.ndim == 3:
            arr = np.moveaxis(arr, -1, 0)
        else:
            raise ValueError("expected a 2-d or 3-d array")
        return cls(arr)

    @property
    def channels(self) -> int:
        return self.data.shape[0]

    @property
    def height(self) -> int:
        return self.data.shape[1]

    @property
    def width(self) -> int:
        return self.data.shape[2]

    def plane(self, i) -> np.ndarray:
        return self.data[i]

    def luminance(self) -> np.ndarray:
        """Rec.601 luminance as float32 (H, W); identity for single-plane images."""
        if self.channels == 1:
            return self.data[0]
        if self.channels >= 3:
            r, g, b = self.data[0], self.data[1], self.data[2]
            out = LUMA_WEIGHTS[0] * r + LUMA_WEIGHTS[1] * g + LUMA_WEIGHTS[2] * b
            return out.astype(np.float32)
        raise ValueError("luminance needs 1 or >=3 channels")


@dataclass(frozen=True)
class DisparityMap:
    """Disparity field in pixel units of its own scale.

    values : float64 (H, W), finite wherever valid is set
    valid  : bool (H, W)
    scale_den : denominator of the scale this map lives at (1 = full res)
    """

    values: np.ndarray
    valid: np.ndarray
    scale_den: int = 1

    def __post_init__(self):
        values = np.ascontiguousarray(self.values, dtype=np.float64)
        if values.ndim != 2:
            raise ValueError("DisparityMap values must be 2-d")
        if self.valid is None:
            valid = np.ones(values.shape, dtype=bool)
        else:
            valid = np.ascontiguousarray(self.valid, dtype=bool)
        if valid.shape != values.shape:
            raise ValueError("valid mask shape must match values")
        if not isinstance(self.scale_den, (int, np.integer)) or self.scale_den < 1:
            raise ValueError("scale_den must be a positive integer")
        if not np.all(np.isfinite(values[valid])):
            raise ValueError("disparity must be finite on valid pixels")
        object.__setattr__(self, "values", _freeze(values))
        object.__setattr__(self, "valid", _freeze(valid))
        object.__setattr__(self, "scale_den", int(self.scale_den))

    @classmethod
    def dense(cls, values, scale_den=1) -> "DisparityMap":
        values = np.asarray(values, dtype=np.float64)
        return cls(values, np.ones(values.shape, dtype=bool), scale_den)

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class SymmetricCostVolume:
    """Matching costs over a signed candidate window centred near zero.

    costs : float32 (d_cv, H, W); slice k holds the cost of signed
        candidate ``k - d_cv/2 + 1``, so candidates run from
        ``-d_cv/2 + 1`` to ``d_cv/2`` and index ``d_cv/2 - 1`` is the
        zero-shift candidate.  Positive candidates outnumber negative
        ones by exactly one.
    """

    costs: np.ndarray
    scale_den: int = 1

    def __post_init__(self):
        costs = np.ascontiguousarray(self.costs, dtype=np.float32)
        if costs.ndim != 3:
            raise ValueError("costs must be (d_cv, H, W)")
        d_cv = costs.shape[0]
        if d_cv < 2 or d_cv % 2 != 0:
            raise ValueError("d_cv must be even and >= 2")
        if not np.all(np.isfinite(costs)):
            raise ValueError("costs must be finite")
        if not isinstance(self.scale_den, (int, np.integer)) or self.scale_den < 1:
            raise ValueError("scale_den must be a positive integer")
        object.__setattr__(self, "costs", _freeze(costs))
        object.__setattr__(self, "scale_den", int(self.scale_den))

    @property
    def d_cv(self) -> int:
        return self.costs.shape[0]

    @property
    def height(self) -> int:
        return self.costs.shape[1]

    @property
    def width(self) -> int:
        return self.costs.shape[2]

    @property
    def zero_index(self) -> int:
        return self.d_cv // 2 - 1

    def candidate_of_index(self, k) -> int:
        """Signed disparity candidate stored at slice k."""
        if not 0 <= k < self.d_cv:
            raise IndexError("candidate index out of range")
        return k - self.d_cv // 2 + 1

    def candidate_values(self) -> np.ndarray:
        """All candidates in slice order, float64."""
        d = self.d_cv
        return np.arange(-d // 2 + 1, d // 2 + 1, dtype=np.float64)


@dataclass(frozen=True)
class FeaturePyramid:
    """Per-scale matching features, coarsest first.

    levels : tuple of (scale_den, PlanarImage) ordered by decreasing
        scale_den; every level's dimensions are the padded full
        resolution divided exactly by its scale_den.
    feature_kind : which head produced the features (census | sad | ncc)
    """

    levels: tuple
    feature_kind: str = "census"

    def __post_init__(self):
        levels = tuple((int(den), img) for den, img in self.levels)
        if not levels:
            raise ValueError("pyramid needs at least one level")
        dens = [den for den, _ in levels]
        if any(d < 1 for d in dens):
            raise ValueError("scale denominators must be positive")
        if any(nxt >= prev for prev, nxt in zip(dens, dens[1:])):
            raise ValueError("levels must be ordered coarsest to finest")
        object.__setattr__(self, "levels", levels)

    @property
    def scale_dens(self) -> tuple:
        return tuple(den for den, _ in self.levels)

    def level(self, scale_den) -> PlanarImage:
        for den, img in self.levels:
            if den == scale_den:
                return img
        raise KeyError(f"no pyramid level at scale 1/{scale_den}")
