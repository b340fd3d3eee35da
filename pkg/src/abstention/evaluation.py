"""Evaluation harness: leave-one-out cross-validation, ranking metrics,
an abstention-cost sweep, and a small stratified hyperparameter search.

Fold i of any cross-validation run trains with seed = base_seed + i, so a
run is reproducible and folds can be computed in parallel (joblib) with the
exact same result as the serial loop.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Protocol, Sequence

import numpy as np
from joblib import Parallel, delayed
from scipy.stats import rankdata

from .core import (
    ABNORMAL,
    Dataset,
    EvalReport,
    Hyperparameters,
    LwaModel,
    NORMAL,
    PredictionOutcome,
    SvmModel,
    predict,
    score_h,
)
from .solvers import NnModel, nn_margin, predict_nn, train_lwa, train_nn, train_svm


class Trainer(Protocol):
    base_seed: int

    def fit(self, data: Dataset, seed: int): ...


@dataclass(frozen=True)
class LwaTrainer:
    """Fits the abstaining linear model; the fold seed replaces hyper.seed."""

    hyper: Hyperparameters

    @property
    def base_seed(self) -> int:
        return self.hyper.seed

    def fit(self, data: Dataset, seed: int) -> LwaModel:
        model, _ = train_lwa(data, replace(self.hyper, seed=seed), trace_stride=0)
        return model


@dataclass(frozen=True)
class SvmTrainer:
    lambda_w: float
    iterations: int
    seed: int = 0

    @property
    def base_seed(self) -> int:
        return self.seed

    def fit(self, data: Dataset, seed: int) -> SvmModel:
        return train_svm(data, self.lambda_w, self.iterations, seed)


@dataclass(frozen=True)
class NnTrainer:
    """Deterministic baseline; the seed argument is accepted and ignored."""

    @property
    def base_seed(self) -> int:
        return 0

    def fit(self, data: Dataset, seed: int) -> NnModel:
        return train_nn(data)


def prediction_outcome(model, x) -> PredictionOutcome:
    """Uniform prediction record for any trained model kind.

    Baselines never abstain: the SVM scores with its margin, 1-NN with a
    normalized distance margin, and both carry r_score = 0.0.
    """
    if isinstance(model, LwaModel):
        return predict(model, x)
    if isinstance(model, SvmModel):
        h = score_h(model, x)
        return PredictionOutcome.accept(ABNORMAL if h >= 0.0 else NORMAL, h, 0.0)
    if isinstance(model, NnModel):
        return PredictionOutcome.accept(predict_nn(model, x), nn_margin(model, x), 0.0)
    raise TypeError(f"unsupported model type {type(model).__name__}")


def auc_roc(scored: Sequence[tuple[int, float]]) -> float | None:
    """Area under the ROC curve from (label, score) pairs.

    Computed from the Mann-Whitney statistic with average ranks on tied
    scores, which equals the trapezoidal area under the threshold-sweep
    curve.  Returns None when only one class is present, including the
    empty input.
    """
    if len(scored) == 0:
        return None
    labels = np.asarray([pair[0] for pair in scored])
    scores = np.asarray([pair[1] for pair in scored], dtype=float)
    pos = labels == ABNORMAL
    n_pos = int(pos.sum())
    n_neg = labels.size - n_pos
    if n_pos == 0 or n_neg == 0:
        return None
    ranks = rankdata(scores)
    return float((ranks[pos].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


def report_metrics(records: Sequence[tuple[int, PredictionOutcome]]) -> EvalReport:
    """Aggregate per-example outcomes into an EvalReport.

    Counting rules: an example is misclassified only if it was accepted with
    the wrong label; rejected examples count against overall accuracy but
    not against accuracy_on_accepted.  AUC uses h_score on accepted examples.
    """
    if len(records) == 0:
        raise ValueError("cannot compute metrics over zero records")
    n = len(records)
    accepted = [(y, out) for y, out in records if not out.is_rejected]
    n_abstained = n - len(accepted)
    n_correct = sum(1 for y, out in accepted if out.label == y)
    n_misclassified = len(accepted) - n_correct
    accuracy_on_accepted = n_correct / len(accepted) if accepted else None
    return EvalReport(
        per_example=tuple((int(y), out) for y, out in records),
        accuracy_on_accepted=accuracy_on_accepted,
        overall_accuracy_counting_rejects_as_errors=n_correct / n,
        auc_roc=auc_roc([(y, out.h_score) for y, out in accepted]),
        n_misclassified=n_misclassified,
        n_abstained=n_abstained,
        abstention_fraction=n_abstained / n,
    )


def _loocv_fold(data: Dataset, trainer, seed: int, i: int, normalize: bool) -> tuple[int, PredictionOutcome]:
    from .data import apply_normalizer, fit_normalizer

    train = data.without(i)
    x = data.X[i]
    if normalize:
        params = fit_normalizer(train)
        train = apply_normalizer(params, train)
        x = params.transform(x)
    model = trainer.fit(train, seed)
    return int(data.y[i]), prediction_outcome(model, x)


def loocv(
    data: Dataset,
    trainer: Trainer,
    base_seed: int | None = None,
    jobs: int = 1,
    normalize: bool = False,
) -> EvalReport:
    """Leave-one-out cross-validation; returns metrics over all n folds.

    With ``normalize`` the feature scaling is refit on each fold's training
    portion, so the held-out example never influences its own scaling.
    ``jobs`` only distributes folds; results are identical at any setting.
    """
    if len(data) < 2:
        raise ValueError(f"leave-one-out needs at least 2 examples, got {len(data)}")
    if base_seed is None:
        base_seed = trainer.base_seed
    folds = Parallel(n_jobs=jobs)(
        delayed(_loocv_fold)(data, trainer, base_seed + i, i, normalize) for i in range(len(data))
    )
    return report_metrics(list(folds))


@dataclass(frozen=True)
class SweepPoint:
    """One row of the abstention-cost sweep, all metrics from a LOOCV run."""

    c: float
    auc_roc: float | None
    abstention_fraction: float
    accuracy_on_accepted: float | None
    n_misclassified: int
    n_abstained: int


def sweep_c(
    data: Dataset,
    hyper_base: Hyperparameters,
    c_grid: Sequence[float],
    jobs: int = 1,
    normalize: bool = False,
) -> list[SweepPoint]:
    """LOOCV at every abstention cost in ``c_grid``, other knobs held fixed.

    Returns one SweepPoint per grid value, in grid order.
    """
    if len(c_grid) == 0:
        raise ValueError("c_grid must not be empty")
    points = []
    for c in c_grid:
        hyper = replace(hyper_base, c=float(c))  # validates c via __post_init__
        report = loocv(data, LwaTrainer(hyper), jobs=jobs, normalize=normalize)
        points.append(
            SweepPoint(
                c=float(c),
                auc_roc=report.auc_roc,
                abstention_fraction=report.abstention_fraction,
                accuracy_on_accepted=report.accuracy_on_accepted,
                n_misclassified=report.n_misclassified,
                n_abstained=report.n_abstained,
            )
        )
    return points


def _stratified_folds(y: np.ndarray, n_folds: int, seed: int) -> np.ndarray:
    """Fold assignment per example: labels shuffled within class, dealt
    round-robin, so every fold gets a near-even share of each class."""
    rng = np.random.default_rng(seed)
    assignment = np.empty(y.size, dtype=int)
    for label in (NORMAL, ABNORMAL):
        idx = np.flatnonzero(y == label)
        idx = idx[rng.permutation(idx.size)]
        assignment[idx] = np.arange(idx.size) % n_folds
    return assignment


@dataclass(frozen=True)
class CandidateScore:
    hyper: Hyperparameters
    accuracy_on_accepted: float | None
    abstention_fraction: float


@dataclass(frozen=True)
class HyperSearchResult:
    """Chosen hyperparameters plus the full grid table.

    ``cap_satisfied`` is False when no combination kept abstention under the
    cap; the returned combination is then the one abstaining least.
    """

    hyper: Hyperparameters
    cap_satisfied: bool
    table: tuple[CandidateScore, ...]


def select_hyperparameters(
    data: Dataset,
    lambda_w_grid: Sequence[float],
    lambda_u_grid: Sequence[float],
    c_grid: Sequence[float],
    iterations: int,
    seed: int = 0,
    abstention_cap: float = 0.25,
    n_folds: int = 5,
    jobs: int = 1,
) -> HyperSearchResult:
    """Pick (lambda_w, lambda_u, c) by stratified k-fold cross-validation.

    Maximizes accuracy_on_accepted subject to abstention_fraction <= cap,
    breaking accuracy ties toward the larger c (cheaper to reject, so prefer
    the model that commits more).  Records are pooled across folds before
    computing metrics.
    """
    if not (len(lambda_w_grid) and len(lambda_u_grid) and len(c_grid)):
        raise ValueError("hyperparameter grids must not be empty")
    counts = data.label_counts()
    if min(counts.values()) < 2:
        raise ValueError(f"stratified folds need at least 2 examples per class, got counts {counts}")
    n_folds = min(n_folds, min(counts.values()))
    assignment = _stratified_folds(data.y, n_folds, seed)

    combos = [
        Hyperparameters(lambda_w=lw, lambda_u=lu, c=c, iterations=iterations, seed=seed)
        for lw in lambda_w_grid
        for lu in lambda_u_grid
        for c in c_grid
    ]

    def evaluate_combo(hyper: Hyperparameters) -> CandidateScore:
        records: list[tuple[int, PredictionOutcome]] = []
        for fold in range(n_folds):
            held = np.flatnonzero(assignment == fold)
            train = data.subset(np.flatnonzero(assignment != fold))
            model, _ = train_lwa(train, replace(hyper, seed=seed + fold), trace_stride=0)
            for i in held:
                records.append((int(data.y[i]), predict(model, data.X[i])))
        report = report_metrics(records)
        return CandidateScore(hyper, report.accuracy_on_accepted, report.abstention_fraction)

    table = Parallel(n_jobs=jobs)(delayed(evaluate_combo)(hyper) for hyper in combos)

    def accuracy_key(cand: CandidateScore) -> tuple[float, float]:
        acc = -np.inf if cand.accuracy_on_accepted is None else cand.accuracy_on_accepted
        return (acc, cand.hyper.c)

    feasible = [cand for cand in table if cand.abstention_fraction <= abstention_cap]
    if feasible:
        best = max(feasible, key=accuracy_key)
        return HyperSearchResult(best.hyper, True, tuple(table))
    fallback = min(table, key=lambda cand: (cand.abstention_fraction, -accuracy_key(cand)[0], -cand.hyper.c))
    return HyperSearchResult(fallback.hyper, False, tuple(table))
