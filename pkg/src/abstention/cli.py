"""Batch command line interface.

Subcommands: train, predict, evaluate, sweep, synth.  Exit codes: 0 on
success, 1 for runtime errors (missing or malformed files, incompatible
shapes), 2 for usage errors (bad flags, values outside their domain).
All flag validation happens before any file is touched.
"""

from __future__ import annotations

import argparse
import os
import sys
import time

import numpy as np

from .core import Dataset, Hyperparameters, LwaModel, predict
from .data import (
    SWEEP_HEADER,
    SynthSpec,
    apply_normalizer,
    fit_normalizer,
    generate_synthetic,
    load_csv,
    load_feature_csv,
    load_model,
    save_csv,
    save_model,
    save_report,
    save_sweep_table,
)
from .evaluation import LwaTrainer, NnTrainer, SvmTrainer, loocv, sweep_c
from .losses import objective_value
from .solvers import train_lwa, train_svm

DEFAULT_LAMBDA_W = 1e-3
DEFAULT_LAMBDA_U = 1e-3
DEFAULT_C = 0.45
DEFAULT_ITERATIONS = 100_000
DEFAULT_SEED = 0

_KIND_DEFAULTS = {
    # (dim, separation); separation is ignored by patch-texture
    "two-blobs": (2, 8.0),
    "overlap-blobs": (2, 1.0),
    "patch-texture": (4096, 0.0),
}


class UsageError(Exception):
    """Flag-level mistake; maps to exit code 2."""


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="abstention",
        description="Selective linear classification: train, predict, evaluate, sweep the abstention cost.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_hyper_flags(p, with_c=True):
        if with_c:
            p.add_argument("--c", type=float, default=None, help=f"abstention cost in (0, 0.5) (default {DEFAULT_C})")
        p.add_argument("--lambda", dest="lambda_w", type=float, default=None,
                       help=f"discriminant regularization (default {DEFAULT_LAMBDA_W})")
        p.add_argument("--lambda-prime", dest="lambda_u", type=float, default=None,
                       help=f"acceptance regularization (default {DEFAULT_LAMBDA_U})")
        p.add_argument("--iters", type=int, default=None,
                       help=f"subgradient iterations (default {DEFAULT_ITERATIONS})")
        p.add_argument("--seed", type=int, default=None, help=f"RNG seed (default {DEFAULT_SEED})")

    p = sub.add_parser("train", help="train a model and write it to a file")
    p.add_argument("--algo", choices=("lwa", "svm"), required=True)
    p.add_argument("--input", required=True, help="labeled CSV: label,f1,f2,...")
    p.add_argument("--model", required=True, help="output model file (JSON)")
    add_hyper_flags(p)
    p.add_argument("--normalize", action="store_true",
                   help="min-max scale features before training; the scaling is stored in the model file")

    p = sub.add_parser("predict", help="score a feature CSV with a trained model")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True, help="output CSV: h_score,r_score,outcome")
    p.add_argument("--no-labels", action="store_true", help="input has no label column")

    p = sub.add_parser("evaluate", help="leave-one-out cross-validation with a metrics report")
    p.add_argument("--algo", choices=("lwa", "svm", "nn"), required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--report", required=True, help="output report file (JSON)")
    add_hyper_flags(p)
    p.add_argument("--normalize", action="store_true", help="refit min-max scaling inside every fold")
    p.add_argument("--jobs", type=int, default=None, help="parallel fold workers (default: all cores)")

    p = sub.add_parser("sweep", help="LOOCV at every abstention cost in a grid")
    p.add_argument("--input", required=True)
    p.add_argument("--c-grid", required=True, help="grid as start:stop:step, e.g. 0.05:0.45:0.05")
    p.add_argument("--output", required=True, help="output CSV table")
    add_hyper_flags(p, with_c=False)
    p.add_argument("--normalize", action="store_true", help="refit min-max scaling inside every fold")
    p.add_argument("--jobs", type=int, default=None, help="parallel fold workers (default: all cores)")

    p = sub.add_parser("synth", help="write a synthetic labeled dataset")
    p.add_argument("--kind", choices=tuple(_KIND_DEFAULTS), required=True)
    p.add_argument("--n", type=int, required=True, help="examples per class")
    p.add_argument("--dim", type=int, default=None, help="feature count (default depends on kind)")
    p.add_argument("--separation", type=float, default=None,
                   help="distance between class means (blob kinds only)")
    p.add_argument("--seed", type=int, default=None, help=f"RNG seed (default {DEFAULT_SEED})")
    p.add_argument("--output", required=True)

    return parser


def _check(condition: bool, message: str) -> None:
    if not condition:
        raise UsageError(message)


def _reject_flags(args, names: dict[str, str], algo: str) -> None:
    for attr, flag in names.items():
        if getattr(args, attr, None) is not None:
            raise UsageError(f"{flag} is not applicable to --algo {algo}")


def _validated_hyper(args) -> Hyperparameters:
    c = DEFAULT_C if args.c is None else args.c
    lambda_w = DEFAULT_LAMBDA_W if args.lambda_w is None else args.lambda_w
    lambda_u = DEFAULT_LAMBDA_U if args.lambda_u is None else args.lambda_u
    iterations = DEFAULT_ITERATIONS if args.iters is None else args.iters
    seed = DEFAULT_SEED if args.seed is None else args.seed
    _check(0.0 < c < 0.5, f"--c must lie strictly in (0, 0.5), got {c}")
    _check(lambda_w > 0, f"--lambda must be positive, got {lambda_w}")
    _check(lambda_u > 0, f"--lambda-prime must be positive, got {lambda_u}")
    _check(iterations >= 1, f"--iters must be >= 1, got {iterations}")
    _check(seed >= 0, f"--seed must be non-negative, got {seed}")
    return Hyperparameters(lambda_w=lambda_w, lambda_u=lambda_u, c=c, iterations=iterations, seed=seed)


def _validated_jobs(args) -> int:
    jobs = args.jobs if args.jobs is not None else (os.cpu_count() or 1)
    _check(jobs >= 1, f"--jobs must be >= 1, got {args.jobs}")
    return jobs


def _parse_c_grid(text: str) -> list[float]:
    parts = text.split(":")
    _check(len(parts) == 3, f"--c-grid must look like start:stop:step, got {text!r}")
    try:
        start, stop, step = (float(part) for part in parts)
    except ValueError:
        raise UsageError(f"--c-grid must contain three numbers, got {text!r}") from None
    _check(step > 0, f"--c-grid step must be positive, got {step}")
    _check(start <= stop, f"--c-grid start must not exceed stop, got {text!r}")
    values = []
    k = 0
    while True:
        value = round(start + k * step, 12)
        if value > stop + 1e-12:
            break
        values.append(value)
        k += 1
    for value in values:
        _check(0.0 < value < 0.5, f"--c-grid value {value} outside (0, 0.5); c must lie strictly between 0 and 0.5")
    return values


def _fmt(value, digits=4) -> str:
    return "n/a" if value is None else f"{value:.{digits}f}"


def cmd_train(args) -> int:
    if args.algo == "svm":
        _reject_flags(args, {"c": "--c", "lambda_u": "--lambda-prime"}, "svm")
    hyper = _validated_hyper(args) if args.algo == "lwa" else None
    if args.algo == "svm":
        lambda_w = DEFAULT_LAMBDA_W if args.lambda_w is None else args.lambda_w
        iterations = DEFAULT_ITERATIONS if args.iters is None else args.iters
        seed = DEFAULT_SEED if args.seed is None else args.seed
        _check(lambda_w > 0, f"--lambda must be positive, got {lambda_w}")
        _check(iterations >= 1, f"--iters must be >= 1, got {iterations}")
        _check(seed >= 0, f"--seed must be non-negative, got {seed}")

    started = time.perf_counter()
    data = load_csv(args.input)
    normalization = None
    if args.normalize:
        normalization = fit_normalizer(data)
        data = apply_normalizer(normalization, data)

    if args.algo == "lwa":
        model, _ = train_lwa(data, hyper, trace_stride=0)
        summary = f"objective {objective_value(data, model):.6f}"
    else:
        model = train_svm(data, lambda_w, iterations, seed)
        train_acc = float(np.mean(np.sign(data.X @ model.w + model.b) * data.y > 0))
        summary = f"training accuracy {train_acc:.4f}"
    save_model(model, args.model, normalization)
    wall = time.perf_counter() - started
    print(f"trained {args.algo} on {len(data)} examples (dim {data.dim}) in {wall:.2f}s; {summary} -> {args.model}")
    return 0


def cmd_predict(args) -> int:
    loaded = load_model(args.model)
    model = loaded.model
    if args.no_labels:
        X = load_feature_csv(args.input)
    else:
        X = load_csv(args.input).X
    if X.shape[1] != model.dim:
        raise ValueError(f"input has {X.shape[1]} features, model expects {model.dim}")
    if loaded.normalization is not None:
        X = loaded.normalization.transform(X)

    lines = ["h_score,r_score,outcome"]
    n_rejected = 0
    for x in X:
        if isinstance(model, LwaModel):
            outcome = predict(model, x)
            cell = "REJECT" if outcome.is_rejected else str(outcome.label)
            n_rejected += outcome.is_rejected
            lines.append(f"{outcome.h_score!r},{outcome.r_score!r},{cell}")
        else:
            h = float(model.w @ x + model.b)
            lines.append(f"{h!r},nan,{1 if h >= 0 else -1}")
    with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    print(f"scored {len(X)} examples ({n_rejected} rejected) -> {args.output}")
    return 0


def _trainer_for(args):
    if args.algo == "lwa":
        return LwaTrainer(_validated_hyper(args))
    if args.algo == "svm":
        _reject_flags(args, {"c": "--c", "lambda_u": "--lambda-prime"}, "svm")
        lambda_w = DEFAULT_LAMBDA_W if args.lambda_w is None else args.lambda_w
        iterations = DEFAULT_ITERATIONS if args.iters is None else args.iters
        seed = DEFAULT_SEED if args.seed is None else args.seed
        _check(lambda_w > 0, f"--lambda must be positive, got {lambda_w}")
        _check(iterations >= 1, f"--iters must be >= 1, got {iterations}")
        _check(seed >= 0, f"--seed must be non-negative, got {seed}")
        return SvmTrainer(lambda_w=lambda_w, iterations=iterations, seed=seed)
    _reject_flags(
        args,
        {"c": "--c", "lambda_w": "--lambda", "lambda_u": "--lambda-prime", "iters": "--iters", "seed": "--seed"},
        "nn",
    )
    return NnTrainer()


def cmd_evaluate(args) -> int:
    trainer = _trainer_for(args)
    jobs = _validated_jobs(args)
    started = time.perf_counter()
    data = load_csv(args.input)
    report = loocv(data, trainer, jobs=jobs, normalize=args.normalize)
    save_report(report, args.report)
    wall = time.perf_counter() - started
    rows = [
        ("examples", str(report.n_examples)),
        ("accepted", str(report.n_accepted)),
        ("abstentions", str(report.n_abstained)),
        ("misclassified (accepted)", str(report.n_misclassified)),
        ("accuracy (accepted)", _fmt(report.accuracy_on_accepted)),
        ("overall accuracy (rejects = errors)", _fmt(report.overall_accuracy_counting_rejects_as_errors)),
        ("AUC-ROC (accepted)", _fmt(report.auc_roc)),
        ("abstention fraction", _fmt(report.abstention_fraction)),
    ]
    width = max(len(name) for name, _ in rows)
    print(f"leave-one-out evaluation of {args.algo} on {len(data)} examples ({wall:.2f}s):")
    for name, value in rows:
        print(f"  {name:<{width}}  {value}")
    print(f"report -> {args.report}")
    return 0


def cmd_sweep(args) -> int:
    c_grid = _parse_c_grid(args.c_grid)
    jobs = _validated_jobs(args)
    base = argparse.Namespace(**vars(args))
    base.c = c_grid[0]  # placeholder; sweep_c replaces c per grid point
    hyper = _validated_hyper(base)
    started = time.perf_counter()
    data = load_csv(args.input)
    points = sweep_c(data, hyper, c_grid, jobs=jobs, normalize=args.normalize)
    save_sweep_table(points, args.output)
    wall = time.perf_counter() - started
    print(SWEEP_HEADER)
    for p in points:
        auc = "nan" if p.auc_roc is None else f"{p.auc_roc:.4f}"
        acc = "nan" if p.accuracy_on_accepted is None else f"{p.accuracy_on_accepted:.4f}"
        print(f"{p.c},{auc},{p.abstention_fraction:.4f},{acc},{p.n_misclassified},{p.n_abstained}")
    print(f"swept {len(points)} abstention costs over {len(data)} examples in {wall:.2f}s -> {args.output}")
    return 0


def cmd_synth(args) -> int:
    seed = DEFAULT_SEED if args.seed is None else args.seed
    default_dim, default_sep = _KIND_DEFAULTS[args.kind]
    dim = default_dim if args.dim is None else args.dim
    separation = default_sep if args.separation is None else args.separation
    _check(args.n >= 1, f"--n must be >= 1, got {args.n}")
    _check(dim >= 1, f"--dim must be >= 1, got {dim}")
    _check(separation >= 0, f"--separation must be >= 0, got {separation}")
    _check(seed >= 0, f"--seed must be non-negative, got {seed}")
    try:
        spec = SynthSpec(kind=args.kind, n_per_class=args.n, dim=dim, separation=separation, seed=seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    data = generate_synthetic(spec)
    save_csv(data, args.output)
    print(f"wrote {len(data)} examples ({args.kind}, dim {dim}, seed {seed}) -> {args.output}")
    return 0


_COMMANDS = {
    "train": cmd_train,
    "predict": cmd_predict,
    "evaluate": cmd_evaluate,
    "sweep": cmd_sweep,
    "synth": cmd_synth,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse already printed a usage message; normalize the exit code
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
