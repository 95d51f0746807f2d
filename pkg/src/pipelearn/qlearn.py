"""Tabular Q-learning over the joint action space of one combination.

States are buckets of a three-feature comparison between a pipeline
result and its reference image, plus a distinguished ``START`` state
used before any action has been taken. Every step re-runs the pipeline
on the original image, so the next state depends only on the action and
the image, never on the previous output.
"""
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import PipelineError
from .imgcore import Connectivity, connected_components, contour_lengths, count_foreground
from .metrics import ErrorWeights, RewardThresholds, quality, reward
from .pipeline import apply_pipeline, build_action_space, decode_action

__all__ = [
    "LearnerConfig",
    "FeatureVector",
    "Step",
    "PaResult",
    "PipelineEnv",
    "START",
    "BIN_EDGES",
    "num_states",
    "extract_features",
    "discretize",
    "new_qtable",
    "select_action",
    "q_update",
    "run_episode",
    "train",
]

START = 0
BIN_EDGES = (0.5, 0.9, 1.1, 2.0)


@dataclass(frozen=True)
class LearnerConfig:
    alpha: float = 0.5
    gamma: float = 0.8
    eps_explore: float = 0.5
    episodes: int = 200
    steps_per_episode: int = 80
    rng_seed: int = 0

    def __post_init__(self):
        if not 0 < self.alpha <= 1:
            raise ValueError(f"alpha must be in (0, 1], got {self.alpha}")
        if not 0 <= self.gamma < 1:
            raise ValueError(f"gamma must be in [0, 1), got {self.gamma}")
        if not 0 <= self.eps_explore <= 1:
            raise ValueError(f"eps_explore must be in [0, 1], got {self.eps_explore}")
        if self.episodes < 1 or self.steps_per_episode < 1:
            raise ValueError("episodes and steps_per_episode must be >= 1")


class FeatureVector(NamedTuple):
    chi1: float   # component count ratio
    chi2: float   # foreground pixel ratio
    chi3: float   # longest contour ratio


class Step(NamedTuple):
    action: int
    d: float
    reward: int


def _ratio(num, den):
    return math.inf if den == 0 else num / den


def extract_features(result, reference, conn=Connectivity.EIGHT):
    res_len = contour_lengths(result, conn)
    ref_len = contour_lengths(reference, conn)
    return FeatureVector(
        _ratio(connected_components(result, conn).component_count,
               connected_components(reference, conn).component_count),
        _ratio(count_foreground(result), count_foreground(reference)),
        _ratio(max(res_len, default=0), max(ref_len, default=0)),
    )


def num_states(edges=BIN_EDGES):
    return (len(edges) + 1) ** 3 + 1


def discretize(features, edges=BIN_EDGES):
    """Bucket each feature on ``edges`` and combine the three bin indices.

    Bins are left-closed, so a value equal to an edge goes to the upper
    bin. The result is offset by one to keep 0 for ``START``.
    """
    nbins = len(edges) + 1
    state = 0
    for x in features:
        if math.isnan(x) or x < 0:
            raise ValueError(f"features must be non-negative, got {tuple(features)}")
        state = state * nbins + int(np.searchsorted(edges, x, side="right"))
    return state + 1


def new_qtable(n_actions, edges=BIN_EDGES):
    return np.zeros((num_states(edges), n_actions))


def select_action(q, state, eps_explore, rng):
    """Epsilon-greedy: uniform random with probability ``eps_explore``,
    otherwise the lowest-index maximizer of ``q[state]``."""
    if eps_explore > 0 and rng.random() < eps_explore:
        return int(rng.integers(q.shape[1]))
    return int(np.argmax(q[state]))


def q_update(q, state, action, r, next_state, alpha, gamma):
    target = r + gamma * q[next_state].max()
    q[state, action] = (1.0 - alpha) * q[state, action] + alpha * target


class PipelineEnv:
    """Scores actions of one combination on a fixed dataset.

    Pipelines are deterministic, so the (error, state) outcome of each
    (action, image) pair is computed once and cached.
    """

    def __init__(self, combination, dataset, weights=ErrorWeights(),
                 thresholds=RewardThresholds(), edges=BIN_EDGES):
        if len(dataset) == 0:
            raise ValueError("empty dataset")
        for img, ref in dataset:
            if np.shape(img) != np.shape(ref):
                raise ValueError(f"image {np.shape(img)} and reference {np.shape(ref)} differ")
        self.combination = combination
        self.space = build_action_space(combination)
        self.dataset = dataset
        self.weights = weights
        self.thresholds = thresholds
        self.edges = edges
        self._cache = {}

    def evaluate(self, action, image_index):
        """Return ``(d, state)`` for running ``action`` on one image."""
        key = (action, image_index)
        hit = self._cache.get(key)
        if hit is None:
            img, ref = self.dataset[image_index]
            out = apply_pipeline(img, self.combination, decode_action(self.space, action))
            d = float(quality(out, ref, self.weights))
            hit = (d, discretize(extract_features(out, ref), self.edges))
            self._cache[key] = hit
        return hit

    def mean_error(self, action):
        per_image = [self.evaluate(action, i)[0] for i in range(len(self.dataset))]
        return float(np.mean(per_image)), per_image


def run_episode(env, image_index, q, cfg, rng):
    """One episode from ``START`` on a single image; returns its trace."""
    state = START
    trace = []
    for _ in range(cfg.steps_per_episode):
        a = select_action(q, state, cfg.eps_explore, rng)
        d, next_state = env.evaluate(a, image_index)
        r, terminal = reward(d, env.thresholds)
        q_update(q, state, a, r, next_state, cfg.alpha, cfg.gamma)
        trace.append(Step(a, d, r))
        state = next_state
        if terminal:
            break
    return trace


@dataclass
class PaResult:
    """Outcome of learning one combination."""

    combination: object
    action_space_size: int
    best_action: object = None
    quality: float = math.inf
    per_image: list = field(default_factory=list)
    seed: int = 0
    episodes: int = 0
    steps_per_episode: int = 0
    error: str = None
    qtable: np.ndarray = field(default=None, repr=False, compare=False)

    @property
    def ok(self):
        return self.error is None


def train(combination, dataset, cfg=LearnerConfig(), weights=ErrorWeights(),
          thresholds=RewardThresholds(), edges=BIN_EDGES):
    """Learn the best action of ``combination`` over ``dataset``.

    Episode ``i`` runs on image ``i mod len(dataset)``. The best action is
    the greedy action from ``START`` once training ends; its quality is the
    mean error over the whole dataset.
    """
    if len(dataset) == 0:
        raise PipelineError("cannot train on an empty dataset")
    env = PipelineEnv(combination, dataset, weights, thresholds, edges)
    rng = np.random.default_rng(cfg.rng_seed)
    q = new_qtable(env.space.size, edges)
    for episode in range(cfg.episodes):
        run_episode(env, episode % len(dataset), q, cfg, rng)
    best = int(np.argmax(q[START]))
    mean_d, per_image = env.mean_error(best)
    return PaResult(
        combination=combination,
        action_space_size=env.space.size,
        best_action=decode_action(env.space, best),
        quality=mean_d,
        per_image=per_image,
        seed=cfg.rng_seed,
        episodes=cfg.episodes,
        steps_per_episode=cfg.steps_per_episode,
        qtable=q,
    )
