"""Disparity and image file formats.

PFM maps are written in a canonical little-endian form (scale -1.0,
rows bottom to top) so that write(read(f)) reproduces canonical files
byte for byte.  16-bit PNG disparity follows the KITTI convention:
value = pixel / 256, pixel 0 means unlabeled.
"""

from __future__ import annotations

import numpy as np

from .types import DisparityMap, PlanarImage


class FileFormatError(ValueError):
    """Raised for unreadable or malformed image and disparity files."""


def _cv2():
    import cv2

    return cv2


# ---------------------------------------------------------------- PFM


def read_pfm(path) -> PlanarImage:
    """Read a PFM file into planes; single-channel 'Pf' or colour 'PF'."""
    with open(path, "rb") as f:
        magic = f.readline().strip()
        if magic == b"PF":
            channels = 3
        elif magic == b"Pf":
            channels = 1
        else:
            raise FileFormatError(f"{path}: bad magic {magic!r}, expected Pf or PF")
        dims = f.readline().split()
        if len(dims) != 2:
            raise FileFormatError(f"{path}: bad dimensions line")
        try:
            width, height = int(dims[0]), int(dims[1])
        except ValueError as e:
            raise FileFormatError(f"{path}: bad dimensions line") from e
        if width < 1 or height < 1:
            raise FileFormatError(f"{path}: non-positive dimensions")
        try:
            scale = float(f.readline().strip())
        except ValueError as e:
            raise FileFormatError(f"{path}: bad scale line") from e
        if scale == 0:
            raise FileFormatError(f"{path}: zero scale")
        dtype = "<f4" if scale < 0 else ">f4"
        count = width * height * channels
        data = np.frombuffer(f.read(count * 4), dtype=dtype)
        if data.size != count:
            raise FileFormatError(f"{path}: truncated payload")
    if channels == 1:
        arr = data.reshape(height, width)
    else:
        arr = data.reshape(height, width, channels)
    arr = np.ascontiguousarray(arr[::-1])  # stored bottom-to-top
    if not np.all(np.isfinite(arr)):
        raise FileFormatError(f"{path}: non-finite values")
    if channels == 1:
        return PlanarImage(arr[None, :, :])
    return PlanarImage.from_array(arr)


def write_pfm(img: PlanarImage, path):
    """Write 1 or 3 planes as canonical little-endian PFM."""
    if img.channels == 1:
        arr = img.plane(0)
        magic = b"Pf"
    elif img.channels == 3:
        arr = np.stack([img.plane(0), img.plane(1), img.plane(2)], axis=-1)
        magic = b"PF"
    else:
        raise FileFormatError("PFM supports 1 or 3 channels")
    payload = np.ascontiguousarray(arr[::-1], dtype="<f4")
    with open(path, "wb") as f:
        f.write(magic + b"\n")
        f.write(f"{img.width} {img.height}\n".encode("ascii"))
        f.write(b"-1.0\n")
        f.write(payload.tobytes())


def read_pfm_disparity(path) -> DisparityMap:
    """Single-channel PFM as a dense full-resolution disparity map."""
    img = read_pfm(path)
    if img.channels != 1:
        raise FileFormatError(f"{path}: disparity PFM must be single-channel")
    return DisparityMap.dense(img.plane(0).astype(np.float64))


def write_pfm_disparity(d: DisparityMap, path):
    write_pfm(PlanarImage(d.values.astype(np.float32)[None, :, :]), path)


# --------------------------------------------------- 16-bit PNG (KITTI)


def read_png_disparity(path) -> DisparityMap:
    """16-bit single-channel PNG, value = pixel / 256, 0 = unlabeled."""
    arr = _cv2().imread(str(path), _cv2().IMREAD_UNCHANGED)
    if arr is None:
        raise FileFormatError(f"{path}: cannot read file")
    if arr.ndim != 2 or arr.dtype != np.uint16:
        raise FileFormatError(f"{path}: expected 16-bit single-channel PNG")
    values = arr.astype(np.float64) / 256.0
    valid = arr > 0
    return DisparityMap(values, valid, 1)


def write_png_disparity(d: DisparityMap, path):
    """Quantize to 1/256 px; negatives and invalid pixels store 0."""
    q = np.floor(d.values * 256.0 + 0.5)
    q[(d.values < 0) | ~d.valid] = 0
    q = np.clip(q, 0, 65535).astype(np.uint16)
    if not _cv2().imwrite(str(path), q):
        raise FileFormatError(f"{path}: cannot write file")


# ------------------------------------------------------------- images


def load_image(path) -> PlanarImage:
    """Read PNG/PPM/PGM (8 or 16 bit) into float planes scaled to [0, 1]."""
    cv2 = _cv2()
    arr = cv2.imread(str(path), cv2.IMREAD_UNCHANGED)
    if arr is None:
        raise FileFormatError(f"{path}: cannot read image")
    if arr.dtype == np.uint8:
        arr = arr.astype(np.float32) / 255.0
    elif arr.dtype == np.uint16:
        arr = arr.astype(np.float32) / 65535.0
    else:
        arr = arr.astype(np.float32)
    if arr.ndim == 2:
        return PlanarImage(arr[None, :, :])
    if arr.shape[2] == 4:
        arr = arr[:, :, :3]
    arr = arr[:, :, ::-1]  # cv2 loads BGR
    return PlanarImage.from_array(arr)


def save_image_gray16(arr, path):
    """Store a [0, 1] float image as 16-bit grayscale PNG."""
    q = np.clip(np.floor(np.asarray(arr, dtype=np.float64) * 65535.0 + 0.5), 0, 65535)
    if not _cv2().imwrite(str(path), q.astype(np.uint16)):
        raise FileFormatError(f"{path}: cannot write file")


# ----------------------------------------------------------- colormap

_TURBO_LUT = None


def _turbo_lut():
    # matplotlib import is deferred; the table is fixed at 256 entries so
    # rendering is identical everywhere.
    global _TURBO_LUT
    if _TURBO_LUT is None:
        from matplotlib import colormaps

        _TURBO_LUT = colormaps["turbo"](np.linspace(0.0, 1.0, 256))[:, :3].astype(
            np.float32
        )
    return _TURBO_LUT


def render_colormap(d: DisparityMap, max_disparity) -> PlanarImage:
    """Turbo-colormapped disparity; invalid pixels render black."""
    max_disparity = float(max_disparity)
    if max_disparity <= 0:
        raise ValueError("max_disparity must be positive")
    lut = _turbo_lut()
    t = np.clip(d.values / max_disparity, 0.0, 1.0)
    idx = np.rint(t * 255.0).astype(np.intp)
    rgb = lut[idx]
    rgb[~d.valid] = 0.0
    return PlanarImage.from_array(rgb)


def save_image_rgb8(img: PlanarImage, path):
    """Store float RGB planes as 8-bit PNG."""
    if img.channels != 3:
        raise FileFormatError("expected 3 channels")
    rgb = np.stack([img.plane(0), img.plane(1), img.plane(2)], axis=-1)
    q = np.clip(np.floor(rgb.astype(np.float64) * 255.0 + 0.5), 0, 255).astype(
        np.uint8
    )
    if not _cv2().imwrite(str(path), q[:, :, ::-1]):
        raise FileFormatError(f"{path}: cannot write file")
