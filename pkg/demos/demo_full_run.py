"""
From a folder of images to a reusable model
===========================================

Generate a dataset, learn every combination of a small task config,
save the model, and segment a new image with it. The same steps are
available from the command line as ``pipelearn gen-dataset``,
``pipelearn learn``, ``pipelearn apply`` and ``pipelearn inspect``.
"""

import tempfile
from pathlib import Path

import numpy as np

from pipelearn import apply_model, load_model, parse_config, run, save_model
from pipelearn.synth import generate_dataset, make_sample

work = Path(tempfile.mkdtemp(prefix="pipelearn-demo-"))
generate_dataset(work / "data", count=10, seed=3, size=48)
print("dataset in", work / "data")

# %%
# Task config
# -----------
# One candidate list per phase. Grids override the defaults of each
# operator. ``demos/standard_config.yaml`` holds the full-size grids.

cfg = parse_config({
    "phases": [
        {"name": "preprocessing", "operators": [
            {"name": "medfilt2", "params": {"size": [3, 5]}},
            {"name": "wiener2", "params": {"size": [3, 5]}}]},
        {"name": "processing", "operators": [
            {"name": "edge", "params": {"method": ["sobel", "log"],
                                        "threshold": [0.05, 0.2, 0.4]}}]},
        {"name": "postprocessing", "operators": [
            {"name": "bwareaopen", "params": {"min_size": [5, 15], "conn": [8]}}]},
    ],
    "metrics": {"eps_quality": 0.3, "delta": 0.1},
    "learner": {"episodes": 60, "steps": 15, "seed": 0},
    "dataset": {"path": "data"},
}, base_dir=work)

# %%
# Learning
# --------

model = run(cfg)
for rank, res in enumerate(model.results, 1):
    print(f"{rank}. {res.combination.label:<32} D={res.quality:.4f} {res.best_action.assignment}")

path = work / "model.json"
save_model(model, path)
print("saved", path)

# %%
# Applying
# --------

model = load_model(path)
img, _, reference, _ = make_sample(np.random.default_rng(99), 48, 0.1)
out = apply_model(model, img)
print(f"new image: {out.sum()} pixels marked, {reference.sum()} in the reference")
