#!/usr/bin/env python3
"""Sweep the abstention cost on an overlapping-blobs problem and print the
trade-off table: low c buys accuracy with abstentions, high c answers
everything.

Usage: python scripts/run_cost_sweep.py [--n 100] [--separation 1.0] [--jobs 4]
"""

import argparse

from abstention import (
    Hyperparameters,
    SynthSpec,
    generate_synthetic,
    save_sweep_table,
    sweep_c,
)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=100, help="examples per class")
    parser.add_argument("--separation", type=float, default=1.0)
    parser.add_argument("--seed", type=int, default=21)
    parser.add_argument("--iters", type=int, default=2000)
    parser.add_argument("--jobs", type=int, default=4)
    parser.add_argument("--output", default=None, help="optional CSV path for the table")
    args = parser.parse_args()

    data = generate_synthetic(
        SynthSpec("overlap-blobs", args.n, 2, args.separation, seed=args.seed)
    )
    base = Hyperparameters(lambda_w=1e-3, lambda_u=1e-3, c=0.05, iterations=args.iters)
    grid = [round(0.05 * k, 2) for k in range(1, 10)]

    print(f"leave-one-out sweep on {len(data)} examples, separation {args.separation}")
    points = sweep_c(data, base, grid, jobs=args.jobs)

    print(f"{'c':>6} {'abstain':>8} {'acc|accepted':>13} {'auc':>7} {'errors':>7}")
    for p in points:
        acc = "-" if p.accuracy_on_accepted is None else f"{p.accuracy_on_accepted:.3f}"
        auc = "-" if p.auc_roc is None else f"{p.auc_roc:.3f}"
        print(f"{p.c:>6.2f} {p.abstention_fraction:>8.3f} {acc:>13} {auc:>7} {p.n_misclassified:>7}")

    if args.output:
        save_sweep_table(points, args.output)
        print(f"table written to {args.output}")


if __name__ == "__main__":
    main()
