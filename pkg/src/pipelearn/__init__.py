"""Learn which image-processing operators to chain, and with which
parameter values, from images paired with ground-truth results.

One tabular Q-learner per candidate operator combination searches the
joint parameter grid; the combination with the lowest mean error wins.
"""
from .config import STANDARD_CONFIG, TaskConfig, load_config, parse_config
from .errors import PipelearnError
from .imgcore import Connectivity, load_binary, load_gray, save_binary, save_gray
from .metrics import ErrorWeights, RewardThresholds, quality, reward
from .operators import apply_operator, operator_spec
from .orchestrator import LearnedModel, apply_model, load_dataset, load_model, run, save_model
from .pipeline import (apply_pipeline, build_action_space, decode_action,
                       encode_action, enumerate_combinations)
from .qlearn import LearnerConfig, train

__version__ = "0.1.0"

__all__ = [
    "STANDARD_CONFIG", "TaskConfig", "load_config", "parse_config",
    "PipelearnError",
    "Connectivity", "load_binary", "load_gray", "save_binary", "save_gray",
    "ErrorWeights", "RewardThresholds", "quality", "reward",
    "apply_operator", "operator_spec",
    "LearnedModel", "apply_model", "load_dataset", "load_model", "run", "save_model",
    "apply_pipeline", "build_action_space", "decode_action", "encode_action",
    "enumerate_combinations",
    "LearnerConfig", "train",
]
