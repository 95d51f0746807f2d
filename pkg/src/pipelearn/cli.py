"""Command-line entry point: ``learn``, ``apply``, ``inspect``, ``gen-dataset``.

Failures exit non-zero and print one line ``error[CODE]: message`` on
stderr.
"""
import argparse
import logging
import sys

from .config import load_config
from .errors import PipelearnError
from .imgcore import load_gray, save_binary
from .orchestrator import apply_model, load_model, run, save_model
from .synth import generate_dataset

log = logging.getLogger("pipelearn")


def _format_values(combination, action):
    parts = []
    for op, vals in zip(combination.operators, action.per_operator(combination)):
        inner = ", ".join(f"{n}={v}" for n, v in zip(op.param_names, vals))
        parts.append(f"{op.name}({inner})")
    return " -> ".join(parts)


def _ranking_table(model, out):
    print(f"{'':2}{'rank':>4}  {'quality':>10}  {'actions':>7}  combination / best action", file=out)
    for rank, res in enumerate(model.results, 1):
        mark = "*" if rank == 1 and res.ok else " "
        if res.ok:
            print(f"{mark:2}{rank:>4}  {res.quality:>10.6f}  {res.action_space_size:>7}  "
                  f"{_format_values(res.combination, res.best_action)}", file=out)
        else:
            print(f"{mark:2}{rank:>4}  {'failed':>10}  {res.action_space_size:>7}  "
                  f"{res.combination.label}: {res.error}", file=out)


def cmd_learn(args):
    cfg = load_config(args.config)
    only = [s.strip() for s in args.combinations.split(",") if s.strip()] if args.combinations else None
    model = run(cfg, workers=args.workers, only=only)
    save_model(model, args.out)
    _ranking_table(model, sys.stdout)
    print(f"model written to {args.out}")
    return 0


def cmd_apply(args):
    model = load_model(args.model)
    out = apply_model(model, load_gray(args.input))
    save_binary(out, args.out)
    return 0


def cmd_inspect(args):
    model = load_model(args.model)
    w = model.winner
    print(f"winner: {w.combination.label}")
    print(f"action: #{w.best_action.index} {_format_values(w.combination, w.best_action)}")
    print(f"quality (mean D): {w.quality:.6f}")
    print()
    _ranking_table(model, sys.stdout)
    print()
    print("per-image D of the winner:")
    for name, d in zip(model.images, w.per_image):
        print(f"  {name}: {d:.6f}")
    return 0


def cmd_gen_dataset(args):
    try:
        paths = generate_dataset(args.out, args.count, seed=args.seed, noise=args.noise,
                                 size=args.size)
    except OSError as exc:
        raise PipelearnError(f"cannot write dataset: {exc}") from None
    print(f"wrote {len(paths)} image/reference pairs to {args.out}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="pipelearn",
        description="Learn the best image-processing pipeline and its parameters.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("learn", help="train one learner per combination and save the model")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--workers", type=int, default=None, help="learner processes (default: config)")
    p.add_argument("--combinations", default=None,
                   help="comma-separated subset, e.g. C1,C3 or wiener2+edge+bwareaopen")
    p.set_defaults(func=cmd_learn)

    p = sub.add_parser("apply", help="segment one image with a learned model")
    p.add_argument("--model", required=True)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_apply)

    p = sub.add_parser("gen-dataset", help="write a synthetic shapes dataset")
    p.add_argument("--out", required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise", type=float, default=0.1)
    p.add_argument("--size", type=int, default=64)
    p.set_defaults(func=cmd_gen_dataset)

    p = sub.add_parser("inspect", help="print the contents of a model file")
    p.add_argument("--model", required=True)
    p.set_defaults(func=cmd_inspect)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except PipelearnError as exc:
        print(f"error[{exc.code}]: {exc}", file=sys.stderr)
    except ValueError as exc:
        print(f"error[E_VALUE]: {exc}", file=sys.stderr)
    except OSError as exc:
        print(f"error[E_IO]: {exc}", file=sys.stderr)
    return 1


if __name__ == "__main__":
    sys.exit(main())
