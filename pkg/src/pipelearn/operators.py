"""Operator library and name-based registry.

Operator names follow the Matlab tokens they stand in for (``medfilt2``,
``edge``, ``bwareaopen``...). Each registered operator declares its
parameters in a fixed order together with a default value grid; a
configuration can override any grid.

Neighborhood filters on gray images use zero padding. The edge detectors
replicate border pixels instead, so that image borders are not reported
as edges.
"""
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import ndimage

from .errors import KindMismatchError, OperatorError
from .imgcore import Connectivity, as_binary, as_gray, boundary_mask, connected_components, is_binary

__all__ = [
    "Kind",
    "OperatorSpec",
    "OperatorInstance",
    "REGISTRY",
    "operator_spec",
    "apply_operator",
    "median_filter",
    "order_filter",
    "wiener_filter",
    "edge_detect",
    "area_open",
    "structuring_element",
    "dilate",
    "erode",
    "fill_holes",
    "perimeter",
    "EDGE_METHODS",
    "LOG_SIGMA",
    "LOG_WIDTH",
    "CANNY_LOW_RATIO",
]

EDGE_METHODS = ("sobel", "prewitt", "log", "zerocross", "canny")
LOG_SIGMA = 2.0
LOG_WIDTH = 13
CANNY_SIGMA = 1.0
CANNY_LOW_RATIO = 0.4
WIENER_VAR_FLOOR = 1e-9


def _check_size(size):
    if isinstance(size, bool) or not isinstance(size, (int, np.integer)):
        raise OperatorError(f"filter size must be an integer, got {size!r}")
    if size < 1 or size % 2 == 0:
        raise OperatorError(f"filter size must be odd and positive, got {size}")
    return int(size)


# --------------------------------------------------------------------------
# gray -> gray

def median_filter(img, size):
    """Median over the ``size`` x ``size`` zero-padded neighborhood."""
    size = _check_size(size)
    return ndimage.median_filter(as_gray(img), size=size, mode="constant", cval=0.0)


def order_filter(img, size, order):
    """``order``-th smallest value (1-based) of the zero-padded neighborhood."""
    size = _check_size(size)
    if order == "median":
        order = (size * size + 1) // 2
    if isinstance(order, bool) or not isinstance(order, (int, np.integer)):
        raise OperatorError(f"order must be an integer rank, got {order!r}")
    if not 1 <= order <= size * size:
        raise OperatorError(f"order {order} out of range [1, {size * size}]")
    return ndimage.rank_filter(as_gray(img), rank=int(order) - 1, size=size,
                               mode="constant", cval=0.0)


def wiener_filter(img, size):
    """Pixelwise adaptive Wiener filter.

    Local mean and variance come from the zero-padded window; the noise
    power is estimated as the mean of all local variances.
    """
    size = _check_size(size)
    x = as_gray(img)
    mu = ndimage.uniform_filter(x, size=size, mode="constant", cval=0.0)
    sq = ndimage.uniform_filter(x * x, size=size, mode="constant", cval=0.0)
    var = np.maximum(sq - mu * mu, 0.0)
    noise = var.mean()
    gain = np.maximum(var - noise, 0.0) / np.maximum(var, WIENER_VAR_FLOOR)
    return np.clip(mu + gain * (x - mu), 0.0, 255.0)


# --------------------------------------------------------------------------
# gray -> binary

_SOBEL = np.array([[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]], dtype=np.float64)
_PREWITT = np.array([[-1, 0, 1], [-1, 0, 1], [-1, 0, 1]], dtype=np.float64)


def _gradient_magnitude(x, kernel):
    gx = ndimage.correlate(x, kernel, mode="nearest")
    gy = ndimage.correlate(x, kernel.T, mode="nearest")
    return np.hypot(gx, gy), gx, gy


def _normalized(mag):
    peak = mag.max()
    if peak <= 1e-9:
        return None
    return mag / peak


def log_kernel(sigma=LOG_SIGMA, width=LOG_WIDTH):
    """Zero-sum Laplacian-of-Gaussian kernel."""
    half = width // 2
    y, x = np.mgrid[-half:half + 1, -half:half + 1].astype(np.float64)
    r2 = (x * x + y * y) / (2.0 * sigma * sigma)
    k = (r2 - 1.0) * np.exp(-r2)
    return k - k.mean()


def _zero_crossings(resp, threshold):
    scale = np.abs(resp).max()
    out = np.zeros(resp.shape, dtype=bool)
    if scale <= 1e-9:
        return out
    limit = threshold * scale
    for a, b, sl_a, sl_b in (
        (resp[:, :-1], resp[:, 1:], (slice(None), slice(None, -1)), (slice(None), slice(1, None))),
        (resp[:-1, :], resp[1:, :], (slice(None, -1), slice(None)), (slice(1, None), slice(None))),
    ):
        hit = (a * b < 0) & (np.abs(a - b) > limit)
        out[sl_a] |= hit
        out[sl_b] |= hit
    return out


def _non_max_suppression(mag, gx, gy):
    h, w = mag.shape
    padded = np.pad(mag, 1, constant_values=0.0)
    angle = np.rad2deg(np.arctan2(gy, gx)) % 180.0
    # neighbor offsets (drow, dcol) along the gradient direction, 4 sectors
    sector = (((angle + 22.5) // 45.0).astype(int)) % 4
    offsets = ((0, 1), (1, 1), (1, 0), (1, -1))
    keep = np.zeros_like(mag, dtype=bool)
    for k, (dr, dc) in enumerate(offsets):
        fwd = padded[1 + dr:1 + dr + h, 1 + dc:1 + dc + w]
        bwd = padded[1 - dr:1 - dr + h, 1 - dc:1 - dc + w]
        keep |= (sector == k) & (mag >= fwd) & (mag >= bwd)
    return np.where(keep, mag, 0.0)


def _canny(x, threshold):
    smooth = ndimage.gaussian_filter(x, CANNY_SIGMA, mode="nearest")
    mag, gx, gy = _gradient_magnitude(smooth, _SOBEL)
    norm = _normalized(mag)
    if norm is None:
        return np.zeros(x.shape, dtype=bool)
    thin = _non_max_suppression(norm, gx, gy)
    weak = thin > CANNY_LOW_RATIO * threshold
    strong = thin > threshold
    lab = connected_components(weak, Connectivity.EIGHT)
    seeded = np.zeros(lab.component_count + 1, dtype=bool)
    seeded[np.unique(lab.labels[strong])] = True
    seeded[0] = False
    return seeded[lab.labels]


def edge_detect(img, method, threshold):
    """Binary edge map of a gray image.

    Thresholds are relative: gradient methods compare against the
    magnitude normalized by its image maximum, the Laplacian methods
    against the largest absolute filter response.
    """
    if method not in EDGE_METHODS:
        raise OperatorError(f"unknown edge method {method!r}; expected one of {EDGE_METHODS}")
    threshold = float(threshold)
    if not threshold >= 0:
        raise OperatorError(f"edge threshold must be >= 0, got {threshold}")
    x = as_gray(img)
    if method in ("sobel", "prewitt"):
        mag, _, _ = _gradient_magnitude(x, _SOBEL if method == "sobel" else _PREWITT)
        norm = _normalized(mag)
        if norm is None:
            return np.zeros(x.shape, dtype=bool)
        return norm > threshold
    if method == "canny":
        return _canny(x, threshold)
    resp = ndimage.correlate(x, log_kernel(), mode="nearest")
    return _zero_crossings(resp, threshold)


# --------------------------------------------------------------------------
# binary -> binary

def area_open(img, min_size, conn=Connectivity.EIGHT):
    """Remove components with fewer than ``min_size`` pixels."""
    if min_size < 0:
        raise OperatorError(f"min_size must be >= 0, got {min_size}")
    img = as_binary(img)
    lab = connected_components(img, conn)
    keep = np.concatenate(([False], lab.component_sizes >= min_size))
    return keep[lab.labels]


def structuring_element(shape, size):
    """``line``: horizontal run of odd length ``size``; ``diamond``: radius ``size``."""
    if isinstance(size, bool) or not isinstance(size, (int, np.integer)):
        raise OperatorError(f"structuring element size must be an integer, got {size!r}")
    if shape == "line":
        if size < 1 or size % 2 == 0:
            raise OperatorError(f"line length must be odd and positive, got {size}")
        return np.ones((1, size), dtype=bool)
    if shape == "diamond":
        if size < 0:
            raise OperatorError(f"diamond radius must be >= 0, got {size}")
        y, x = np.mgrid[-size:size + 1, -size:size + 1]
        return (np.abs(x) + np.abs(y)) <= size
    raise OperatorError(f"unsupported structuring element {shape!r}")


def dilate(img, se):
    return ndimage.binary_dilation(as_binary(img), structure=np.asarray(se, dtype=bool))


def erode(img, se):
    return ndimage.binary_erosion(as_binary(img), structure=np.asarray(se, dtype=bool),
                                  border_value=0)


def fill_holes(img):
    """Set background regions not 4-connected to the border to foreground."""
    return ndimage.binary_fill_holes(as_binary(img))


def perimeter(img):
    return boundary_mask(img)


# --------------------------------------------------------------------------
# registry

class Kind(str, Enum):
    GRAY = "gray"
    BINARY = "binary"


def _int_param(check=None):
    def validate(v):
        if isinstance(v, bool) or not isinstance(v, int):
            raise OperatorError(f"expected an integer, got {v!r}")
        if check is not None and not check(v):
            raise OperatorError(f"value {v!r} out of range")
        return v
    return validate


def _real_param(v):
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v) or v < 0:
        raise OperatorError(f"expected a non-negative real, got {v!r}")
    return float(v)


def _symbol_param(*vocab):
    def validate(v):
        if v not in vocab:
            raise OperatorError(f"symbol {v!r} not in {vocab}")
        return v
    return validate


def _rank_param(v):
    if v == "median":
        return v
    return _int_param(lambda r: r >= 1)(v)


_odd = _int_param(lambda s: s >= 1 and s % 2 == 1)


@dataclass(frozen=True)
class _Entry:
    func: object
    params: tuple        # ((name, validator, default_grid), ...)
    input_kind: Kind
    output_kind: Kind


REGISTRY = {
    "medfilt2": _Entry(
        lambda img, size: median_filter(img, size),
        (("size", _odd, (3, 5)),), Kind.GRAY, Kind.GRAY),
    "ordfilt2": _Entry(
        lambda img, size, order: order_filter(img, size, order),
        (("size", _odd, (3, 5)), ("order", _rank_param, ("median",))), Kind.GRAY, Kind.GRAY),
    "wiener2": _Entry(
        lambda img, size: wiener_filter(img, size),
        (("size", _odd, (3, 5)),), Kind.GRAY, Kind.GRAY),
    "edge": _Entry(
        lambda img, method, threshold: edge_detect(img, method, threshold),
        (("method", _symbol_param(*EDGE_METHODS), ("sobel", "prewitt", "zerocross", "log")),
         ("threshold", _real_param,
          (0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08, 0.09, 0.1))),
        Kind.GRAY, Kind.BINARY),
    "bwareaopen": _Entry(
        lambda img, min_size, conn: area_open(img, min_size, Connectivity(conn)),
        (("min_size", _int_param(lambda v: v >= 0), (5, 10, 15, 20)),
         ("conn", _int_param(lambda v: v in (4, 8)), (8,))),
        Kind.BINARY, Kind.BINARY),
    "imdilate": _Entry(
        lambda img, shape, size: dilate(img, structuring_element(shape, size)),
        (("shape", _symbol_param("line", "diamond"), ("line",)),
         ("size", _int_param(lambda v: v >= 0), (3, 5))),
        Kind.BINARY, Kind.BINARY),
    "imerode": _Entry(
        lambda img, shape, size: erode(img, structuring_element(shape, size)),
        (("shape", _symbol_param("line", "diamond"), ("diamond",)),
         ("size", _int_param(lambda v: v >= 0), (1,))),
        Kind.BINARY, Kind.BINARY),
    "imfill": _Entry(
        lambda img, mode: fill_holes(img),
        (("mode", _symbol_param("holes"), ("holes",)),), Kind.BINARY, Kind.BINARY),
    "bwperim": _Entry(
        lambda img, width: perimeter(img),
        (("width", _int_param(lambda v: v == 1), (1,)),), Kind.BINARY, Kind.BINARY),
}


@dataclass(frozen=True)
class OperatorSpec:
    """An operator together with the value grid of each of its parameters."""

    name: str
    param_names: tuple
    param_grids: tuple
    input_kind: Kind
    output_kind: Kind

    def __post_init__(self):
        if len(self.param_names) != len(self.param_grids):
            raise OperatorError(f"{self.name}: parameter names and grids differ in length")
        for pname, grid in zip(self.param_names, self.param_grids):
            if len(grid) == 0:
                raise OperatorError(f"{self.name}: empty grid for parameter {pname!r}")

    def grids_dict(self):
        return {n: list(g) for n, g in zip(self.param_names, self.param_grids)}


def operator_spec(name, grids=None):
    """Build an :class:`OperatorSpec` for a registered operator.

    ``grids`` maps parameter names to value lists; parameters left out
    keep their default grid.
    """
    try:
        entry = REGISTRY[name]
    except KeyError:
        raise OperatorError(f"unknown operator {name!r}") from None
    grids = dict(grids or {})
    names, out = [], []
    for pname, validate, default in entry.params:
        grid = grids.pop(pname, default)
        if isinstance(grid, (str, int, float)):
            grid = [grid]
        try:
            grid = tuple(validate(v) for v in grid)
        except OperatorError as exc:
            raise OperatorError(f"{name}.{pname}: {exc}") from None
        if not grid:
            raise OperatorError(f"{name}.{pname}: empty grid")
        if len(set(grid)) != len(grid):
            raise OperatorError(f"{name}.{pname}: duplicate values in grid {list(grid)}")
        names.append(pname)
        out.append(grid)
    if grids:
        raise OperatorError(f"{name}: unknown parameter(s) {sorted(grids)}")
    return OperatorSpec(name, tuple(names), tuple(out), entry.input_kind, entry.output_kind)


@dataclass(frozen=True)
class OperatorInstance:
    spec: OperatorSpec
    values: tuple

    def __post_init__(self):
        if len(self.values) != len(self.spec.param_names):
            raise OperatorError(f"{self.spec.name}: expected {len(self.spec.param_names)} values")
        for pname, grid, v in zip(self.spec.param_names, self.spec.param_grids, self.values):
            if v not in grid:
                raise OperatorError(f"{self.spec.name}.{pname}: {v!r} not in grid {list(grid)}")


def apply_operator(inst, img):
    """Run ``inst`` on ``img`` after checking the input kind."""
    try:
        entry = REGISTRY[inst.spec.name]
    except KeyError:
        raise OperatorError(f"unknown operator {inst.spec.name!r}") from None
    got = Kind.BINARY if is_binary(img) else Kind.GRAY
    if got != inst.spec.input_kind:
        raise KindMismatchError(
            f"{inst.spec.name} expects a {inst.spec.input_kind.value} image, got {got.value}")
    return entry.func(img, **dict(zip(inst.spec.param_names, inst.values)))
