"""Hot numeric kernels with switchable backends.

The compiled extension is imported dynamically to handle installs where
it was never built; a pure-numpy fallback provides identical semantics.
Selection order: the RESTEREO_KERNELS environment variable ("native",
"python", or "auto"), else native when available.  All wrappers
normalize dtypes and contiguity so backends can assume clean inputs.

Both backends are deterministic: results do not depend on the thread
count, which only affects the compiled backend's speed.
"""

from __future__ import annotations

import os

import numpy as np

from . import numpy_backend

_BACKENDS = {"python": numpy_backend}

try:
    from . import _native

    _BACKENDS["native"] = _native
except ImportError:
    _native = None

_DEFAULT_THREADS = 1


def _resolve(name):
    if name in (None, "", "auto"):
        return "native" if "native" in _BACKENDS else "python"
    if name not in _BACKENDS:
        if name == "native":
            raise RuntimeError(
                "native kernel backend requested but the compiled extension "
                "is not available"
            )
        raise ValueError(f"unknown kernel backend '{name}'")
    return name


_active_name = _resolve(os.environ.get("RESTEREO_KERNELS", "auto"))
_num_threads = _DEFAULT_THREADS


def available_backends():
    return tuple(sorted(_BACKENDS))


def get_backend() -> str:
    return _active_name


def set_backend(name) -> str:
    """Select 'native', 'python', or 'auto'; returns the resolved name."""
    global _active_name
    _active_name = _resolve(name)
    return _active_name


def get_num_threads() -> int:
    return _num_threads


def set_num_threads(n) -> int:
    """Worker threads for the compiled backend; numpy ignores this."""
    global _num_threads
    n = int(n)
    if n < 1:
        raise ValueError("thread count must be >= 1")
    _num_threads = n
    return _num_threads


def _impl():
    return _BACKENDS[_active_name]


def _f32(arr):
    return np.ascontiguousarray(arr, dtype=np.float32)


def _f64(arr):
    return np.ascontiguousarray(arr, dtype=np.float64)


def census_transform(lum):
    """24 binary planes from 5x5 neighbour-vs-centre comparisons."""
    return _impl().census_transform(_f32(lum), _num_threads)


def cost_volume_absdiff(f_left, f_right, d_cv, ch_start=0):
    """Mean |feature difference| over the signed candidate window."""
    fl, fr = _f32(f_left), _f32(f_right)
    if fl.shape != fr.shape:
        raise ValueError("feature shapes differ")
    if not 0 <= ch_start < fl.shape[0]:
        raise ValueError("ch_start out of range")
    return _impl().cost_volume_absdiff(fl, fr, int(d_cv), int(ch_start), _num_threads)


def cost_volume_ncc(left, right, d_cv, radius=2):
    """(1 - windowed NCC) / 2 over the signed candidate window."""
    l, r = _f32(left), _f32(right)
    if l.shape != r.shape:
        raise ValueError("feature shapes differ")
    return _impl().cost_volume_ncc(l, r, int(d_cv), int(radius), _num_threads)


def box_filter_volume(cv, radius=2, iterations=1):
    return _impl().box_filter_volume(_f32(cv), int(radius), int(iterations), _num_threads)


def sgm_aggregate(cv, p1, p2):
    """Four-path semi-global smoothing; identity when p1 = p2 = 0."""
    return _impl().sgm_aggregate(_f32(cv), float(p1), float(p2), _num_threads)


def soft_argmax(cv, first_candidate):
    """Softmax-weighted candidate expectation per pixel, float64."""
    return _impl().soft_argmax(_f32(cv), float(first_candidate), _num_threads)


def warp_horizontal(img, disp):
    """Resample img rows at x - disp with clamped linear interpolation."""
    im, d = _f32(img), _f64(disp)
    if im.shape[1:] != d.shape:
        raise ValueError("disparity shape must match image planes")
    return _impl().warp_horizontal(im, d, _num_threads)


def upsample_bilinear(vals, factor):
    return _impl().upsample_bilinear(_f64(vals), int(factor), _num_threads)


def block_mean(img, factor):
    f = int(factor)
    im = _f32(img)
    if im.shape[1] % f or im.shape[2] % f:
        raise ValueError("dimensions must be divisible by the block factor")
    return _impl().block_mean(im, f, _num_threads)


def bilateral_tables(spatial_sigma, range_sigma, radius, nbins=4096):
    """Shared weight tables so both backends filter identically.

    The range table is sampled at bin centres over |guide diff| in [0, 1].
    """
    r = int(radius)
    ax = np.arange(-r, r + 1, dtype=np.float64)
    dy2 = ax[:, None] ** 2 + ax[None, :] ** 2
    spatial = np.exp(-dy2 / (2.0 * float(spatial_sigma) ** 2))
    centres = (np.arange(nbins, dtype=np.float64) + 0.5) / nbins
    range_lut = np.exp(-(centres**2) / (2.0 * float(range_sigma) ** 2))
    return spatial, range_lut


def joint_bilateral(values, guide, conf, spatial_sigma, range_sigma, radius):
    """One confidence-weighted cross-bilateral pass over a float64 map."""
    v, g, c = _f64(values), _f32(guide), _f64(conf)
    if not (v.shape == g.shape == c.shape):
        raise ValueError("values, guide, and confidence shapes must match")
    spatial, lut = bilateral_tables(spatial_sigma, range_sigma, radius)
    return _impl().joint_bilateral(v, g, c, spatial, lut, _num_threads)


def fill_background(values, valid):
    """Row-wise fill of invalid pixels from nearest valid neighbours."""
    v = _f64(values)
    m = np.ascontiguousarray(valid, dtype=np.uint8)
    if v.shape != m.shape:
        raise ValueError("valid mask shape must match values")
    out_v, out_m = _impl().fill_background(v, m, _num_threads)
    return out_v, out_m.astype(bool)
