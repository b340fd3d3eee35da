#!/usr/bin/env python3
"""Leave-one-out comparison of the abstaining classifier against SVM and 1-NN
baselines on the same synthetic dataset.

The abstaining model is scored two ways: overall accuracy counting every
abstention as an error (the pessimistic reading) and accuracy on the examples
it chose to answer.

Usage: python scripts/compare_classifiers.py [--kind overlap-blobs] [--c 0.3]
"""

import argparse

from abstention import (
    Hyperparameters,
    LwaTrainer,
    NnTrainer,
    SvmTrainer,
    SynthSpec,
    generate_synthetic,
    loocv,
)


def fmt(value) -> str:
    return "-" if value is None else f"{value:.3f}"


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--kind", default="overlap-blobs",
                        choices=["two-blobs", "overlap-blobs", "patch-texture"])
    parser.add_argument("--n", type=int, default=100, help="examples per class")
    parser.add_argument("--dim", type=int, default=2)
    parser.add_argument("--separation", type=float, default=1.0)
    parser.add_argument("--seed", type=int, default=21)
    parser.add_argument("--c", type=float, default=0.3, help="abstention cost")
    parser.add_argument("--lambda", dest="lambda_w", type=float, default=1e-3)
    parser.add_argument("--lambda-prime", dest="lambda_u", type=float, default=1e-3)
    parser.add_argument("--iters", type=int, default=2000)
    parser.add_argument("--jobs", type=int, default=4)
    args = parser.parse_args()

    data = generate_synthetic(
        SynthSpec(args.kind, args.n, args.dim, args.separation, seed=args.seed)
    )
    print(f"{args.kind}: {len(data)} examples, dim {data.dim}, leave-one-out")

    hyper = Hyperparameters(args.lambda_w, args.lambda_u, args.c, args.iters)
    runs = [
        (f"abstaining (c={args.c})", loocv(data, LwaTrainer(hyper), jobs=args.jobs)),
        ("svm", loocv(data, SvmTrainer(args.lambda_w, args.iters), jobs=args.jobs)),
        ("1-nn", loocv(data, NnTrainer(), jobs=args.jobs)),
    ]

    print(f"{'model':>20} {'overall':>8} {'acc|accepted':>13} {'abstain':>8} {'auc':>7}")
    for name, report in runs:
        print(
            f"{name:>20}"
            f" {report.overall_accuracy_counting_rejects_as_errors:>8.3f}"
            f" {fmt(report.accuracy_on_accepted):>13}"
            f" {report.abstention_fraction:>8.3f}"
            f" {fmt(report.auc_roc):>7}"
        )


if __name__ == "__main__":
    main()
