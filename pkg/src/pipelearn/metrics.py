"""Supervised contour-evaluation errors and the ternary reward.

All three errors compare a binary result against a binary reference of
the same shape. Lower is better; a perfect result scores 0.
"""
import math
from dataclasses import dataclass

import numpy as np

from .errors import MetricError
from .imgcore import as_binary

__all__ = [
    "ErrorWeights",
    "RewardThresholds",
    "over_detection_error",
    "under_detection_error",
    "localization_error",
    "quality",
    "reward",
    "REWARD",
    "PUNISHMENT",
]

REWARD = 10
PUNISHMENT = -10


@dataclass(frozen=True)
class ErrorWeights:
    w1: float = 1.0 / 3.0
    w2: float = 1.0 / 3.0
    w3: float = 1.0 / 3.0

    def __post_init__(self):
        ws = (self.w1, self.w2, self.w3)
        if any(not math.isfinite(w) or w < 0 for w in ws):
            raise MetricError(f"weights must be finite and non-negative, got {ws}")
        if sum(ws) <= 0:
            raise MetricError("at least one weight must be positive")


@dataclass(frozen=True)
class RewardThresholds:
    eps_quality: float = 0.1
    delta: float = 0.1

    def __post_init__(self):
        if not self.eps_quality > 0:
            raise MetricError(f"eps_quality must be > 0, got {self.eps_quality}")
        if not self.delta >= 0:
            raise MetricError(f"delta must be >= 0, got {self.delta}")


def _pair(result, reference):
    r, ref = as_binary(result), as_binary(reference)
    if r.shape != ref.shape:
        raise MetricError(f"dimension mismatch: result {r.shape} vs reference {ref.shape}")
    return r, ref


def over_detection_error(result, reference):
    """False positives as a fraction of the non-reference pixels."""
    r, ref = _pair(result, reference)
    free = ref.size - np.count_nonzero(ref)
    if free == 0:
        return 0.0
    return np.count_nonzero(r & ~ref) / free


def under_detection_error(result, reference):
    """Fraction of reference pixels missing from the result."""
    r, ref = _pair(result, reference)
    n_ref = np.count_nonzero(ref)
    if n_ref == 0:
        return 0.0
    return np.count_nonzero(ref & ~r) / n_ref


def localization_error(result, reference):
    """Symmetric difference over the result size (clamped to 1)."""
    r, ref = _pair(result, reference)
    return np.count_nonzero(r ^ ref) / max(np.count_nonzero(r), 1)


def quality(result, reference, weights=ErrorWeights()):
    r, ref = _pair(result, reference)
    return (weights.w1 * over_detection_error(r, ref)
            + weights.w2 * under_detection_error(r, ref)
            + weights.w3 * localization_error(r, ref))


def reward(d, thresholds=RewardThresholds()):
    """Map an aggregate error to ``(reward, terminal)``.

    Below ``eps_quality`` the result is accepted (+10, episode ends); up to
    ``eps_quality + delta`` it is neutral; anything worse is punished.
    """
    if not math.isfinite(d):
        raise MetricError(f"aggregate error must be finite, got {d}")
    if d < thresholds.eps_quality:
        return REWARD, True
    if d < thresholds.eps_quality + thresholds.delta:
        return 0, False
    return PUNISHMENT, False
