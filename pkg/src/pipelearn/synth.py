"""Synthetic shape images with edge-map ground truth.

Each sample is one filled circle, triangle or rectangle brighter than a
flat background, with additive Gaussian noise whose standard deviation
is ``noise * 255``. The reference is the perimeter of the noiseless
shape mask.
"""
from pathlib import Path

import numpy as np

from .imgcore import save_binary, save_gray
from .operators import perimeter

__all__ = ["SHAPES", "make_sample", "generate_dataset"]

SHAPES = ("circle", "triangle", "rectangle")


def _shape_mask(kind, size, rng):
    yy, xx = np.mgrid[0:size, 0:size].astype(np.float64)
    lo, hi = 0.15 * size, 0.85 * size
    if kind == "circle":
        r = rng.uniform(0.15, 0.3) * size
        cx, cy = rng.uniform(r + 2, size - r - 3, size=2)
        return (xx - cx) ** 2 + (yy - cy) ** 2 <= r * r
    if kind == "rectangle":
        x0, y0 = rng.uniform(lo, 0.45 * size, size=2)
        w, h = rng.uniform(0.25, 0.4, size=2) * size
        return (xx >= x0) & (xx <= x0 + w) & (yy >= y0) & (yy <= y0 + h)
    if kind == "triangle":
        while True:
            pts = rng.uniform(lo, hi, size=(3, 2))
            (ax, ay), (bx, by) = pts[1] - pts[0], pts[2] - pts[0]
            area = 0.5 * abs(ax * by - ay * bx)
            if area > 0.08 * size * size:
                break
        sides = []
        for i in range(3):
            (x1, y1), (x2, y2) = pts[i], pts[(i + 1) % 3]
            sides.append((x2 - x1) * (yy - y1) - (y2 - y1) * (xx - x1))
        sides = np.stack(sides)
        return np.all(sides >= 0, axis=0) | np.all(sides <= 0, axis=0)
    raise ValueError(f"unknown shape {kind!r}")


def make_sample(rng, size=64, noise=0.1, kind=None):
    """Return ``(image, mask, reference, shape_intensity)`` for one sample."""
    if noise < 0:
        raise ValueError(f"noise must be >= 0, got {noise}")
    if kind is None:
        kind = SHAPES[rng.integers(len(SHAPES))]
    mask = _shape_mask(kind, size, rng)
    background = float(rng.integers(20, 90))
    foreground = float(rng.integers(150, 236))
    img = np.where(mask, foreground, background)
    if noise > 0:
        img = img + rng.normal(0.0, noise * 255.0, size=img.shape)
    img = np.clip(np.rint(img), 0, 255)
    return img, mask, perimeter(mask), foreground


def generate_dataset(out_dir, count, seed=0, noise=0.1, size=64, suffix="_gt"):
    """Write ``count`` image/reference PNG pairs and return their paths."""
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    paths = []
    for i in range(count):
        img, _, ref, _ = make_sample(rng, size, noise)
        img_path = out / f"shape_{i:03d}.png"
        ref_path = out / f"shape_{i:03d}{suffix}.png"
        save_gray(img, img_path)
        save_binary(ref, ref_path)
        paths.append((img_path, ref_path))
    return paths
