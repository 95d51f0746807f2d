"""
Operators on a synthetic shape
==============================

Every operator that a pipeline can chain, applied to one noisy image.
Gray-level filters keep the image gray; ``edge`` turns it binary; the
morphological operators clean the binary result.
"""

import numpy as np

from pipelearn.metrics import quality
from pipelearn.operators import (area_open, dilate, edge_detect, erode, fill_holes, median_filter,
                                 order_filter, perimeter, structuring_element, wiener_filter)
from pipelearn.synth import make_sample

rng = np.random.default_rng(4)
img, mask, reference, level = make_sample(rng, size=48, noise=0.1)
print(f"image {img.shape}, shape intensity {level:.0f}, {reference.sum()} reference pixels")


def ascii(bw, step=2):
    return "\n".join("".join("#" if v else "." for v in row[::step]) for row in bw[::step])


# %%
# Smoothing filters
# -----------------
# All three use a zero-padded square window, so the outermost rows and
# columns darken. Compare the noise left inside the shape.

inside = mask & (np.arange(48)[:, None] > 4)
for name, out in [("input", img),
                  ("median 3", median_filter(img, 3)),
                  ("min (rank 1) 3", order_filter(img, 3, 1)),
                  ("wiener 5", wiener_filter(img, 5))]:
    print(f"{name:>16}: std inside shape {out[inside].std():6.2f}")

# %%
# Edge detectors
# --------------
# Thresholds are relative to the strongest response in the image.

smooth = wiener_filter(img, 5)
for method in ("sobel", "prewitt", "log", "canny"):
    for t in (0.05, 0.3):
        bw = edge_detect(smooth, method, t)
        print(f"{method:>8} t={t:<4}: {bw.sum():4d} pixels, D = {quality(bw, reference):.3f}")

# %%
# Cleaning up the binary map
# --------------------------

bw = edge_detect(smooth, "sobel", 0.3)
clean = area_open(bw, 10)
print(f"area opening: {bw.sum()} -> {clean.sum()} pixels")
print(f"dilate by a 3-line: {dilate(clean, structuring_element('line', 3)).sum()} pixels")
print(f"erode by a diamond: {erode(clean, structuring_element('diamond', 1)).sum()} pixels")
filled = fill_holes(clean)
print(f"fill holes: {filled.sum()} pixels, perimeter {perimeter(filled).sum()} pixels")
print()
print(ascii(clean))
