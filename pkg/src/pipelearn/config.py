"""Task configuration: YAML parsing, validation and serialization.

A configuration declares the processing phases with their candidate
operators and parameter grids, the error weights and reward thresholds,
the learner hyperparameters and where the training images live. Unknown
keys are rejected with their location (e.g. ``learner.alpah``).
"""
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .errors import ConfigError, PipelearnError
from .metrics import ErrorWeights, RewardThresholds
from .operators import operator_spec
from .pipeline import Phase
from .qlearn import LearnerConfig

__all__ = ["TaskConfig", "parse_config", "load_config", "config_to_dict", "STANDARD_CONFIG"]


@dataclass(frozen=True)
class TaskConfig:
    phases: tuple
    weights: ErrorWeights = ErrorWeights()
    thresholds: RewardThresholds = RewardThresholds()
    learner: LearnerConfig = LearnerConfig()
    dataset_path: str = "data"
    ground_truth_suffix: str = "_gt"
    # directory relative dataset paths are resolved against; not serialized
    base_dir: Path = field(default=Path("."), compare=False)
    workers: int = field(default=1, compare=False)

    def resolved_dataset_path(self):
        p = Path(self.dataset_path)
        return p if p.is_absolute() else self.base_dir / p


def _mapping(obj, where, allowed, required=()):
    if not isinstance(obj, dict):
        raise ConfigError(f"{where}: expected a mapping, got {type(obj).__name__}")
    unknown = [k for k in obj if k not in allowed]
    if unknown:
        raise ConfigError(f"{where}: unknown key(s) {', '.join(map(str, unknown))}")
    missing = [k for k in required if k not in obj]
    if missing:
        raise ConfigError(f"{where}: missing key(s) {', '.join(missing)}")
    return obj


def _number(obj, where, kind=float):
    if isinstance(obj, bool) or not isinstance(obj, (int, float)) or (
            kind is int and not isinstance(obj, int)):
        raise ConfigError(f"{where}: expected {'an integer' if kind is int else 'a number'}, got {obj!r}")
    return kind(obj)


def _phases(obj):
    if not isinstance(obj, list) or not obj:
        raise ConfigError("phases: expected a non-empty list")
    phases = []
    for i, ph in enumerate(obj):
        where = f"phases[{i}]"
        _mapping(ph, where, ("name", "operators"), ("name", "operators"))
        name = str(ph["name"])
        where = f"phases[{i}] ({name})"
        ops = ph["operators"]
        if not isinstance(ops, list) or not ops:
            raise ConfigError(f"{where}: phase {name!r} has no operators")
        specs = []
        for j, op in enumerate(ops):
            owhere = f"{where}.operators[{j}]"
            if isinstance(op, str):
                op = {"name": op}
            _mapping(op, owhere, ("name", "params"), ("name",))
            params = op.get("params") or {}
            if not isinstance(params, dict):
                raise ConfigError(f"{owhere}.params: expected a mapping")
            try:
                specs.append(operator_spec(op["name"], params))
            except PipelearnError as exc:
                raise ConfigError(f"{owhere}: {exc}") from None
        try:
            phases.append(Phase(name, tuple(specs)))
        except PipelearnError as exc:
            raise ConfigError(f"{where}: {exc}") from None
    return tuple(phases)


def parse_config(doc, base_dir="."):
    """Validate a configuration mapping and build a :class:`TaskConfig`."""
    _mapping(doc, "config", ("phases", "metrics", "learner", "dataset", "run"), ("phases",))
    phases = _phases(doc["phases"])

    metrics = _mapping(doc.get("metrics") or {}, "metrics", ("weights", "eps_quality", "delta"))
    try:
        if "weights" in metrics:
            w = metrics["weights"]
            if not isinstance(w, list) or len(w) != 3:
                raise ConfigError("metrics.weights: expected a list of three numbers")
            weights = ErrorWeights(*(_number(x, "metrics.weights") for x in w))
        else:
            weights = ErrorWeights()
        thresholds = RewardThresholds(
            _number(metrics.get("eps_quality", RewardThresholds.eps_quality), "metrics.eps_quality"),
            _number(metrics.get("delta", RewardThresholds.delta), "metrics.delta"))
    except ConfigError:
        raise
    except (PipelearnError, ValueError) as exc:
        raise ConfigError(f"metrics: {exc}") from None

    lr = _mapping(doc.get("learner") or {}, "learner",
                  ("alpha", "gamma", "eps_explore", "episodes", "steps", "seed"))
    d = LearnerConfig()
    try:
        learner = LearnerConfig(
            alpha=_number(lr.get("alpha", d.alpha), "learner.alpha"),
            gamma=_number(lr.get("gamma", d.gamma), "learner.gamma"),
            eps_explore=_number(lr.get("eps_explore", d.eps_explore), "learner.eps_explore"),
            episodes=_number(lr.get("episodes", d.episodes), "learner.episodes", int),
            steps_per_episode=_number(lr.get("steps", d.steps_per_episode), "learner.steps", int),
            rng_seed=_number(lr.get("seed", d.rng_seed), "learner.seed", int),
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"learner: {exc}") from None

    ds = _mapping(doc.get("dataset") or {}, "dataset", ("path", "ground_truth_suffix"))
    run = _mapping(doc.get("run") or {}, "run", ("workers",))
    workers = _number(run.get("workers", 1), "run.workers", int)
    if workers < 1:
        raise ConfigError("run.workers: must be >= 1")

    return TaskConfig(
        phases=phases,
        weights=weights,
        thresholds=thresholds,
        learner=learner,
        dataset_path=str(ds.get("path", "data")),
        ground_truth_suffix=str(ds.get("ground_truth_suffix", "_gt")),
        base_dir=Path(base_dir),
        workers=workers,
    )


def load_config(path):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: invalid YAML: {exc}") from None
    return parse_config(doc, base_dir=path.parent)


def config_to_dict(cfg):
    """Plain-data form of ``cfg`` that :func:`parse_config` reads back."""
    return {
        "phases": [
            {"name": ph.name,
             "operators": [{"name": op.name, "params": op.grids_dict()} for op in ph.candidates]}
            for ph in cfg.phases
        ],
        "metrics": {
            "weights": [cfg.weights.w1, cfg.weights.w2, cfg.weights.w3],
            "eps_quality": cfg.thresholds.eps_quality,
            "delta": cfg.thresholds.delta,
        },
        "learner": {
            "alpha": cfg.learner.alpha,
            "gamma": cfg.learner.gamma,
            "eps_explore": cfg.learner.eps_explore,
            "episodes": cfg.learner.episodes,
            "steps": cfg.learner.steps_per_episode,
            "seed": cfg.learner.rng_seed,
        },
        "dataset": {"path": cfg.dataset_path, "ground_truth_suffix": cfg.ground_truth_suffix},
    }


# {medfilt2, wiener2, ordfilt2} -> edge -> bwareaopen: 3 combinations, 288 actions each.
STANDARD_CONFIG = {
    "phases": [
        {"name": "preprocessing", "operators": [
            {"name": "medfilt2", "params": {"size": [3, 5]}},
            {"name": "wiener2", "params": {"size": [3, 5]}},
            {"name": "ordfilt2", "params": {"size": [3, 5]}},
        ]},
        {"name": "processing", "operators": [
            {"name": "edge", "params": {
                "method": ["sobel", "prewitt", "zerocross", "log"],
                "threshold": [0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08, 0.09, 0.1]}},
        ]},
        {"name": "postprocessing", "operators": [
            {"name": "bwareaopen", "params": {"min_size": [5, 10, 15, 20], "conn": [8]}},
        ]},
    ],
    "learner": {"alpha": 0.5, "gamma": 0.8, "eps_explore": 0.5, "episodes": 200, "steps": 80,
                "seed": 0},
}
