"""
Scoring a segmentation
======================

A result is compared with its reference through three error terms and
their weighted sum ``D``. The learner only ever sees ``D`` through a
three-level reward.
"""

import numpy as np

from pipelearn.metrics import (ErrorWeights, RewardThresholds, localization_error,
                               over_detection_error, quality, reward, under_detection_error)

reference = np.zeros((8, 8), bool)
reference[2, 1:7] = True

cases = {
    "perfect": reference.copy(),
    "empty": np.zeros_like(reference),
    "half": reference & (np.arange(8) < 4),
    "shifted": np.roll(reference, 1, axis=0),
    "thick": reference | np.roll(reference, 1, axis=0),
}

# %%
# The three terms
# ---------------
# over-detection: false pixels among the true background
# under-detection: missed reference pixels
# localization: symmetric difference relative to the result size

print(f"{'case':>8} {'D1':>6} {'D2':>6} {'D3':>6} {'D':>6}")
for name, res in cases.items():
    print(f"{name:>8} {over_detection_error(res, reference):6.3f} "
          f"{under_detection_error(res, reference):6.3f} "
          f"{localization_error(res, reference):6.3f} {quality(res, reference):6.3f}")

# %%
# Weights change the trade-off. Penalising misses only:

misses = ErrorWeights(0.0, 1.0, 0.0)
print("misses only:", {k: round(quality(v, reference, misses), 3) for k, v in cases.items()})

# %%
# Reward
# ------
# Below ``eps_quality`` the step is rewarded and the episode ends; a band
# of width ``delta`` above it is neutral; anything worse is punished.

th = RewardThresholds(eps_quality=0.1, delta=0.1)
for d in (0.0, 0.05, 0.1, 0.15, 0.2, 0.7):
    print(f"D={d:<5} -> reward, terminal = {reward(d, th)}")
