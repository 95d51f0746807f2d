"""Pixel grids, raster I/O and structural primitives.

Gray images are 2-D ``float64`` arrays with intensities in ``[0, 255]``;
binary images are 2-D ``bool`` arrays (``True`` = foreground). Arrays are
indexed ``[row, col]``, so ``shape == (height, width)``.
"""
from enum import IntEnum
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError
from scipy import ndimage

from .errors import ImageIOError

__all__ = [
    "Connectivity",
    "ComponentLabeling",
    "as_gray",
    "as_binary",
    "is_binary",
    "load_gray",
    "load_binary",
    "save_gray",
    "save_binary",
    "connected_components",
    "contour_lengths",
    "count_foreground",
    "boundary_mask",
]


class Connectivity(IntEnum):
    FOUR = 4
    EIGHT = 8

    @property
    def structure(self):
        return ndimage.generate_binary_structure(2, 1 if self == 4 else 2)


def as_gray(img):
    """Validate and return ``img`` as a float64 gray image."""
    arr = np.asarray(img)
    if arr.ndim != 2 or arr.size == 0:
        raise ValueError(f"gray image must be a non-empty 2-D array, got shape {arr.shape}")
    if arr.dtype == bool:
        raise ValueError("expected a gray image, got a binary one")
    arr = arr.astype(np.float64, copy=False)
    if not np.all(np.isfinite(arr)) or arr.min() < 0 or arr.max() > 255:
        raise ValueError("gray intensities must lie in [0, 255]")
    return arr


def as_binary(img):
    arr = np.asarray(img)
    if arr.ndim != 2 or arr.size == 0:
        raise ValueError(f"binary image must be a non-empty 2-D array, got shape {arr.shape}")
    return arr.astype(bool, copy=False)


def is_binary(img):
    return np.asarray(img).dtype == bool


# --------------------------------------------------------------------------
# I/O

def _pil_to_gray(im):
    mode = im.mode
    if mode == "L":
        return np.asarray(im, dtype=np.float64)
    if mode == "1":
        return np.asarray(im, dtype=bool).astype(np.float64) * 255.0
    if mode.startswith("I;16"):
        return np.asarray(im, dtype=np.float64) * (255.0 / 65535.0)
    if mode in ("P", "PA", "LA", "RGB", "RGBA", "RGBX", "CMYK", "YCbCr", "La"):
        # ITU-R 601-2 luma, as done by Pillow
        return np.asarray(im.convert("L"), dtype=np.float64)
    raise ImageIOError(f"unsupported pixel mode {mode!r}")


def load_gray(path):
    """Read a raster file as a gray image (color is reduced to luminance)."""
    path = Path(path)
    if not path.is_file():
        raise ImageIOError(f"file not found: {path}")
    try:
        with Image.open(path) as im:
            im.load()
            if im.width == 0 or im.height == 0:
                raise ImageIOError(f"degenerate dimensions {im.width}x{im.height}: {path}")
            return _pil_to_gray(im)
    except UnidentifiedImageError as exc:
        raise ImageIOError(f"unsupported format: {path}") from exc
    except (OSError, SyntaxError, ValueError) as exc:
        if isinstance(exc, ImageIOError):
            raise
        if "size" in str(exc).lower() or "dimension" in str(exc).lower():
            raise ImageIOError(f"degenerate dimensions: {path}") from exc
        raise ImageIOError(f"unreadable file {path}: {exc}") from exc


def load_binary(path):
    """Read a raster file as a binary image; foreground is intensity > 127."""
    return load_gray(path) > 127


def _write(arr, path):
    path = Path(path)
    try:
        # optimize=False and no metadata keep the bytes reproducible
        Image.fromarray(arr, mode="L").save(path, format="PNG")
    except (OSError, ValueError) as exc:
        raise ImageIOError(f"cannot write {path}: {exc}") from exc


def save_gray(img, path):
    """Write a gray image as 8-bit PNG (intensities rounded)."""
    arr = np.clip(np.rint(as_gray(img)), 0, 255).astype(np.uint8)
    _write(arr, path)


def save_binary(img, path):
    """Write a binary image as 8-bit PNG with foreground 255, background 0."""
    arr = as_binary(img).astype(np.uint8) * 255
    _write(arr, path)


# --------------------------------------------------------------------------
# structure

class ComponentLabeling:
    """Dense labeling of foreground components (0 = background)."""

    __slots__ = ("labels", "component_count", "component_sizes")

    def __init__(self, labels, component_count, component_sizes):
        self.labels = labels
        self.component_count = int(component_count)
        self.component_sizes = component_sizes

    def __repr__(self):
        return (f"ComponentLabeling(count={self.component_count}, "
                f"sizes={self.component_sizes.tolist()})")


def connected_components(img, conn=Connectivity.EIGHT):
    img = as_binary(img)
    labels, count = ndimage.label(img, structure=Connectivity(conn).structure)
    sizes = np.bincount(labels.ravel(), minlength=count + 1)[1:]
    return ComponentLabeling(labels, count, sizes)


def boundary_mask(img):
    """Foreground pixels with a background or out-of-bounds 4-neighbor."""
    img = as_binary(img)
    padded = np.pad(img, 1, constant_values=False)
    interior = (padded[:-2, 1:-1] & padded[2:, 1:-1]
                & padded[1:-1, :-2] & padded[1:-1, 2:])
    return img & ~interior


def contour_lengths(img, conn=Connectivity.EIGHT):
    """Boundary pixel count of each component, in label order."""
    lab = connected_components(img, conn)
    if lab.component_count == 0:
        return []
    edge_labels = lab.labels[boundary_mask(img)]
    counts = np.bincount(edge_labels, minlength=lab.component_count + 1)[1:]
    return counts.tolist()


def count_foreground(img):
    return int(np.count_nonzero(as_binary(img)))
