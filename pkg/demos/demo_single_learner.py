"""
One learner, one combination
============================

A Q-learner searches the parameter grid of a fixed operator chain. On a
grid this small we can also score every action directly and see how
close the learner gets. Neighbouring actions often differ by less than
0.01 in mean error, so landing next to the optimum is common.
"""

import numpy as np

from pipelearn.metrics import RewardThresholds
from pipelearn.operators import operator_spec
from pipelearn.pipeline import Combination, build_action_space
from pipelearn.qlearn import START, LearnerConfig, PipelineEnv, train
from pipelearn.synth import make_sample

rng = np.random.default_rng(0)
dataset = [make_sample(rng, 48, 0.1)[::2] for _ in range(8)]

combo = Combination((
    operator_spec("wiener2", {"size": [3, 5]}),
    operator_spec("edge", {"method": ["sobel", "log"], "threshold": [0.05, 0.3, 0.6]}),
    operator_spec("bwareaopen", {"min_size": [5, 20], "conn": [8]}),
))
space = build_action_space(combo)
print(f"{combo.label}: {space.size} actions, grids {space.dims}")

# %%
# Training
# --------
# Thresholds on ``D`` decide what counts as good enough. Synthetic shapes
# rarely score below 0.2, so the bar is set where the best actions sit.

thresholds = RewardThresholds(eps_quality=0.3, delta=0.1)
cfg = LearnerConfig(episodes=150, steps_per_episode=15, rng_seed=1)
result = train(combo, dataset, cfg, thresholds=thresholds)
print(f"learned action #{result.best_action.index}: {result.best_action.assignment}")
print(f"mean D {result.quality:.4f}")

# %%
# Checking against every action
# -----------------------------

env = PipelineEnv(combo, dataset, thresholds=thresholds)
scores = sorted((env.mean_error(a)[0], a) for a in range(space.size))
for d, a in scores[:5]:
    mark = "<- learned" if a == result.best_action.index else ""
    print(f"  #{a:>2} D={d:.4f} {mark}")

# %%
# Greedy values of the start state, best first

row = result.qtable[START]
top = np.argsort(-row, kind="stable")[:5]
print("Q[start]:", ", ".join(f"#{a}={row[a]:.2f}" for a in top))
