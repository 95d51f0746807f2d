"""Run one learner per operator combination and keep the best.

Learners are independent: each gets its own child seed (base seed plus
combination index), so running them in parallel or in sequence yields
the same model.
"""
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import NamedTuple

from .config import config_to_dict, parse_config
from .errors import DatasetError, ImageIOError, ModelFormatError, PipelearnError, PipelineError
from .imgcore import load_binary, load_gray
from .operators import operator_spec
from .pipeline import (Action, Combination, apply_pipeline, build_action_space,
                       encode_action, enumerate_combinations)
from .qlearn import PaResult, train

__all__ = [
    "Sample",
    "LearnedModel",
    "FORMAT_VERSION",
    "IMAGE_EXTENSIONS",
    "load_dataset",
    "combination_names",
    "run",
    "apply_model",
    "model_to_dict",
    "model_from_dict",
    "save_model",
    "load_model",
]

log = logging.getLogger(__name__)

FORMAT = "pipelearn-model"
FORMAT_VERSION = 1
IMAGE_EXTENSIONS = (".png", ".pgm", ".ppm", ".pbm", ".bmp", ".tif", ".tiff")


class Sample(NamedTuple):
    name: str
    image: object
    reference: object


def load_dataset(path, suffix="_gt"):
    """Pair each image ``F.ext`` in ``path`` with its reference ``F<suffix>.ext``."""
    root = Path(path)
    if not root.is_dir():
        raise DatasetError(f"dataset directory not found: {root}")
    files = sorted(p for p in root.iterdir()
                   if p.is_file() and p.suffix.lower() in IMAGE_EXTENSIONS)
    samples = []
    for f in files:
        if f.stem.endswith(suffix):
            continue
        ref = f.with_name(f.stem + suffix + f.suffix)
        if not ref.is_file():
            log.warning("skipping %s: no reference %s", f.name, ref.name)
            continue
        try:
            img, gt = load_gray(f), load_binary(ref)
        except ImageIOError as exc:
            raise DatasetError(str(exc)) from None
        if img.shape != gt.shape:
            raise DatasetError(
                f"{f.name}: image {img.shape} and reference {gt.shape} dimensions differ")
        samples.append(Sample(f.stem, img, gt))
    if not samples:
        raise DatasetError(f"no image/reference pairs in {root} (suffix {suffix!r})")
    return samples


@dataclass
class LearnedModel:
    winner: PaResult
    results: list          # sorted best first
    config: object         # TaskConfig
    images: list           # names of the training images, aligned with per_image
    format_version: int = FORMAT_VERSION


def combination_names(combination, index):
    """Names a combination can be selected by: ``C<k>`` (1-based) or its chain."""
    return {f"C{index + 1}", "+".join(combination.names)}


def _train_one(job):
    index, combination, pairs, cfg = job
    learner = replace(cfg.learner, rng_seed=cfg.learner.rng_seed + index)
    try:
        return train(combination, pairs, learner, cfg.weights, cfg.thresholds)
    except (PipelearnError, ValueError, ArithmeticError) as exc:
        return PaResult(combination, build_action_space(combination).size,
                        seed=learner.rng_seed, episodes=learner.episodes,
                        steps_per_episode=learner.steps_per_episode,
                        error=f"{type(exc).__name__}: {exc}")


def _rank_key(item):
    index, res = item
    q = res.quality if res.ok else math.inf
    return (q, res.action_space_size, index)


def run(cfg, dataset=None, workers=None, only=None):
    """Learn every combination of ``cfg`` and return the ranked model.

    ``only`` restricts learning to combinations named ``C<k>`` or by their
    ``+``-joined operator chain. ``workers`` > 1 runs learners in worker
    processes.
    """
    if dataset is None:
        dataset = load_dataset(cfg.resolved_dataset_path(), cfg.ground_truth_suffix)
    combos = list(enumerate(enumerate_combinations(cfg.phases)))
    if only:
        wanted = set(only)
        combos = [(i, c) for i, c in combos if combination_names(c, i) & wanted]
        if not combos:
            raise PipelineError(f"no combination matches {sorted(wanted)}")
    pairs = [(s.image, s.reference) for s in dataset]
    jobs = [(i, c, pairs, cfg) for i, c in combos]
    workers = cfg.workers if workers is None else workers
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
            results = list(pool.map(_train_one, jobs))
    else:
        results = [_train_one(job) for job in jobs]
    for res in results:
        if not res.ok:
            log.warning("%s disqualified: %s", res.combination.label, res.error)
    ranked = [r for _, r in sorted(zip([i for i, _ in combos], results), key=_rank_key)]
    if not ranked[0].ok:
        raise PipelineError("all learners failed")
    return LearnedModel(ranked[0], ranked, cfg, [s.name for s in dataset])


def apply_model(model, img):
    return apply_pipeline(img, model.winner.combination, model.winner.best_action)


# --------------------------------------------------------------------------
# persistence

def _result_to_dict(res):
    combo = res.combination
    out = {
        "combination": [op.name for op in combo.operators],
        "operators": [{"name": op.name, "params": op.grids_dict()} for op in combo.operators],
        "action_space_size": res.action_space_size,
        "best_action": None,
        "quality": res.quality if res.ok else None,
        "per_image": list(res.per_image),
        "seed": res.seed,
        "episodes": res.episodes,
        "steps_per_episode": res.steps_per_episode,
        "error": res.error,
    }
    if res.best_action is not None:
        out["best_action"] = {
            "index": res.best_action.index,
            "assignment": [
                {"operator": op.name, "values": dict(zip(op.param_names, vals))}
                for op, vals in zip(combo.operators, res.best_action.per_operator(combo))
            ],
        }
    return out


def model_to_dict(model):
    return {
        "format": FORMAT,
        "format_version": model.format_version,
        "winner": _result_to_dict(model.winner),
        "results": [_result_to_dict(r) for r in model.results],
        "images": list(model.images),
        "config": config_to_dict(model.config),
    }


def _result_from_dict(d):
    try:
        combo = Combination(tuple(operator_spec(op["name"], op["params"]) for op in d["operators"]))
        space = build_action_space(combo)
        best = None
        if d["best_action"] is not None:
            ba = d["best_action"]
            steps = ba["assignment"]
            if [s["operator"] for s in steps] != list(combo.names):
                raise ModelFormatError("best_action operators do not match the combination")
            flat = []
            for op, step in zip(combo.operators, steps):
                if set(step["values"]) != set(op.param_names):
                    raise ModelFormatError(f"best_action values for {op.name} do not match its parameters")
                flat.extend(step["values"][n] for n in op.param_names)
            index = encode_action(space, flat)
            if index != ba["index"]:
                log.warning("stored action index %s disagrees with its assignment; using %s",
                            ba["index"], index)
            best = Action(index, tuple(flat))
        quality = d["quality"]
        return PaResult(
            combination=combo,
            action_space_size=space.size,
            best_action=best,
            quality=math.inf if quality is None else float(quality),
            per_image=[float(x) for x in d["per_image"]],
            seed=int(d["seed"]),
            episodes=int(d["episodes"]),
            steps_per_episode=int(d["steps_per_episode"]),
            error=d["error"],
        )
    except ModelFormatError:
        raise
    except (KeyError, TypeError, ValueError, PipelearnError) as exc:
        raise ModelFormatError(f"malformed result entry: {type(exc).__name__}: {exc}") from None


def model_from_dict(doc, base_dir="."):
    if not isinstance(doc, dict) or doc.get("format") != FORMAT:
        raise ModelFormatError("not a pipelearn model file")
    if doc.get("format_version") != FORMAT_VERSION:
        raise ModelFormatError(f"unsupported format version {doc.get('format_version')!r}")
    try:
        winner = _result_from_dict(doc["winner"])
        results = [_result_from_dict(r) for r in doc["results"]]
        cfg = parse_config(doc["config"], base_dir)
        images = list(doc["images"])
    except KeyError as exc:
        raise ModelFormatError(f"missing field {exc}") from None
    except PipelearnError as exc:
        if isinstance(exc, ModelFormatError):
            raise
        raise ModelFormatError(f"invalid embedded config: {exc}") from None
    if winner.best_action is None or not winner.ok:
        raise ModelFormatError("winner has no learned action")
    return LearnedModel(winner, results, cfg, images, doc["format_version"])


def save_model(model, path):
    text = json.dumps(model_to_dict(model), indent=2, allow_nan=False) + "\n"
    Path(path).write_text(text, encoding="utf-8")


def load_model(path):
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ModelFormatError(f"model file not found: {path}") from None
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ModelFormatError(f"cannot read model {path}: {exc}") from None
    return model_from_dict(doc, base_dir=path.parent)
