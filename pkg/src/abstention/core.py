"""Core types and scoring for selective linear classification.

A selective model carries a discriminant score h(x) = w.x + b whose sign
picks the class label, and an acceptance score r(x) = u.x + b' whose sign
decides whether a label is emitted at all: r(x) < 0 means the classifier
abstains and hands the example to a human instead of guessing.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Union

import numpy as np

NORMAL = -1
ABNORMAL = 1
LABELS = (NORMAL, ABNORMAL)


def _as_vector(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError(f"{name} must be a non-empty 1-d array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    arr.setflags(write=False)
    return arr


def _as_scalar(value, name: str) -> float:
    value = float(value)
    if not np.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value}")
    return value


@dataclass(frozen=True)
class Hyperparameters:
    """Training knobs for the abstaining linear classifier.

    ``c`` is the per-example abstention cost.  It must stay strictly inside
    (0, 0.5): at 0 rejecting everything is free, at 0.5 and beyond the
    surrogate slope 1/(1 - 2c) blows up or flips sign.
    """

    lambda_w: float
    lambda_u: float
    c: float
    iterations: int
    seed: int = 0

    def __post_init__(self):
        if not (np.isfinite(self.lambda_w) and self.lambda_w > 0):
            raise ValueError(f"lambda_w must be positive and finite, got {self.lambda_w}")
        if not (np.isfinite(self.lambda_u) and self.lambda_u > 0):
            raise ValueError(f"lambda_u must be positive and finite, got {self.lambda_u}")
        if not 0.0 < self.c < 0.5:
            raise ValueError(f"abstention cost c must lie strictly in (0, 0.5), got {self.c}")
        if int(self.iterations) < 1:
            raise ValueError(f"iterations must be >= 1, got {self.iterations}")
        if int(self.seed) < 0:
            raise ValueError(f"seed must be non-negative, got {self.seed}")

    @property
    def beta(self) -> float:
        # Derived on demand so c stays the single source of truth.
        return 1.0 / (1.0 - 2.0 * self.c)


@dataclass(frozen=True, eq=False)
class Dataset:
    """Immutable feature matrix ``X`` of shape (n, dim) with labels in {-1, +1}."""

    X: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        X = np.array(self.X, dtype=float)
        y = np.array(self.y, dtype=int)
        if X.ndim != 2 or X.shape[0] == 0 or X.shape[1] == 0:
            raise ValueError(f"X must be a non-empty 2-d array, got shape {X.shape}")
        if y.shape != (X.shape[0],):
            raise ValueError(f"y must have shape ({X.shape[0]},), got {tuple(y.shape)}")
        if not np.all(np.isfinite(X)):
            raise ValueError("X contains non-finite entries")
        bad = ~np.isin(y, LABELS)
        if bad.any():
            raise ValueError(f"labels must be -1 or +1, got {y[bad][0]} at row {int(np.flatnonzero(bad)[0])}")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    def __len__(self) -> int:
        return self.X.shape[0]

    def __iter__(self) -> Iterator[tuple[np.ndarray, int]]:
        for i in range(len(self)):
            yield self.X[i], int(self.y[i])

    @property
    def dim(self) -> int:
        return self.X.shape[1]

    def example(self, i: int) -> tuple[np.ndarray, int]:
        return self.X[i], int(self.y[i])

    def without(self, i: int) -> "Dataset":
        """Copy of the dataset with example i removed (leave-one-out folds)."""
        return Dataset(np.delete(self.X, i, axis=0), np.delete(self.y, i))

    def subset(self, indices) -> "Dataset":
        indices = np.asarray(indices, dtype=int)
        return Dataset(self.X[indices], self.y[indices])

    def label_counts(self) -> dict[int, int]:
        return {label: int(np.count_nonzero(self.y == label)) for label in LABELS}

    def has_both_labels(self) -> bool:
        counts = self.label_counts()
        return counts[NORMAL] > 0 and counts[ABNORMAL] > 0


def require_both_labels(data: Dataset) -> None:
    """Training a discriminant needs at least one example per class."""
    if not data.has_both_labels():
        raise ValueError(f"training data must contain both labels, got counts {data.label_counts()}")


@dataclass(frozen=True, eq=False)
class LwaModel:
    """Abstaining linear model: weights for the discriminant and for acceptance.

    Biases are trained but deliberately excluded from any norm penalty, so
    they live outside ``w``/``u``.
    """

    w: np.ndarray
    u: np.ndarray
    b: float
    b_prime: float
    hyper: Hyperparameters

    def __post_init__(self):
        object.__setattr__(self, "w", _as_vector(self.w, "w"))
        object.__setattr__(self, "u", _as_vector(self.u, "u"))
        object.__setattr__(self, "b", _as_scalar(self.b, "b"))
        object.__setattr__(self, "b_prime", _as_scalar(self.b_prime, "b_prime"))
        if self.w.shape != self.u.shape:
            raise ValueError(f"w and u must have equal length, got {self.w.size} and {self.u.size}")

    @property
    def dim(self) -> int:
        return self.w.size


@dataclass(frozen=True, eq=False)
class SvmModel:
    """Plain linear SVM baseline; it never abstains."""

    w: np.ndarray
    b: float
    lambda_w: float
    iterations: int
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "w", _as_vector(self.w, "w"))
        object.__setattr__(self, "b", _as_scalar(self.b, "b"))
        if not (np.isfinite(self.lambda_w) and self.lambda_w > 0):
            raise ValueError(f"lambda_w must be positive and finite, got {self.lambda_w}")

    @property
    def dim(self) -> int:
        return self.w.size


LinearModel = Union[LwaModel, SvmModel]


@dataclass(frozen=True)
class PredictionOutcome:
    """What the classifier did with one example.

    ``label`` is None when the example was rejected.  Both scores are always
    recorded; baselines that cannot abstain carry r_score = 0.0 so downstream
    tables stay rectangular.
    """

    label: int | None
    h_score: float
    r_score: float

    def __post_init__(self):
        if self.label is not None and self.label not in LABELS:
            raise ValueError(f"label must be -1, +1 or None, got {self.label}")

    @classmethod
    def accept(cls, label: int, h_score: float, r_score: float) -> "PredictionOutcome":
        return cls(label=label, h_score=float(h_score), r_score=float(r_score))

    @classmethod
    def reject(cls, h_score: float, r_score: float) -> "PredictionOutcome":
        return cls(label=None, h_score=float(h_score), r_score=float(r_score))

    @property
    def is_rejected(self) -> bool:
        return self.label is None


@dataclass(frozen=True, eq=False)
class EvalReport:
    """Aggregate metrics plus the per-example record they were computed from.

    ``accuracy_on_accepted`` and ``auc_roc`` are None when undefined (nothing
    accepted, or the accepted set contains a single class).
    """

    per_example: tuple[tuple[int, PredictionOutcome], ...]
    accuracy_on_accepted: float | None
    overall_accuracy_counting_rejects_as_errors: float
    auc_roc: float | None
    n_misclassified: int
    n_abstained: int
    abstention_fraction: float

    @property
    def n_examples(self) -> int:
        return len(self.per_example)

    @property
    def n_accepted(self) -> int:
        return self.n_examples - self.n_abstained


def _check_dim(model: LinearModel, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (model.dim,):
        raise ValueError(f"feature vector has shape {tuple(x.shape)}, model expects ({model.dim},)")
    return x


def score_h(model: LinearModel, x) -> float:
    """Discriminant score w.x + b."""
    x = _check_dim(model, x)
    return float(model.w @ x + model.b)


def score_r(model: LwaModel, x) -> float:
    """Acceptance score u.x + b'; negative means abstain."""
    x = _check_dim(model, x)
    return float(model.u @ x + model.b_prime)


def predict(model: LwaModel, x) -> PredictionOutcome:
    """Score one example and decide: reject when r < 0, otherwise label by sign of h.

    Ties go toward committing: r = 0 still accepts, and h = 0 maps to +1.
    """
    x = _check_dim(model, x)
    h = float(model.w @ x + model.b)
    r = float(model.u @ x + model.b_prime)
    if r < 0.0:
        return PredictionOutcome.reject(h, r)
    label = ABNORMAL if h >= 0.0 else NORMAL
    return PredictionOutcome.accept(label, h, r)
