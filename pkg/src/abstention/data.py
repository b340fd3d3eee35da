"""Data plumbing: CSV datasets, min-max feature scaling, synthetic
generators for exercising the classifiers, and model (de)serialization.

File formats are deliberately dumb: comma-separated values with '.' decimals
for tables, JSON for models and reports.  Floats are written with repr so a
write/read round trip is exact.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import gaussian_filter

from .core import (
    ABNORMAL,
    Dataset,
    EvalReport,
    Hyperparameters,
    LwaModel,
    NORMAL,
    SvmModel,
)

MODEL_FORMAT_VERSION = 1
SWEEP_HEADER = "c,auc_roc,abstention_fraction,accuracy_on_accepted,n_misclassified,n_abstained"


class DataFormatError(ValueError):
    """A file exists but its contents do not match the expected format."""


class UnsupportedVersionError(DataFormatError):
    """The model file declares a format_version this build cannot read."""


def _parse_float(cell: str, row: int, col: int) -> float:
    try:
        value = float(cell)
    except ValueError:
        raise DataFormatError(f"row {row}, column {col}: cannot parse {cell!r} as a number") from None
    if not math.isfinite(value):
        raise DataFormatError(f"row {row}, column {col}: non-finite value {cell!r}")
    return value


def _read_rows(path) -> list[tuple[int, list[str]]]:
    # utf-8-sig so a byte-order mark cannot masquerade as a header cell
    with open(path, encoding="utf-8-sig", newline="") as fh:
        rows = [(lineno, [cell.strip() for cell in row]) for lineno, row in enumerate(csv.reader(fh), start=1)]
    rows = [(lineno, row) for lineno, row in rows if row and any(row)]
    if rows:
        first = rows[0][1][0]
        try:
            float(first)
        except ValueError:
            rows = rows[1:]  # single header line, detected by a non-numeric first cell
    if not rows:
        raise DataFormatError(f"{path}: no data rows")
    return rows


def load_csv(path) -> Dataset:
    """Read a labeled dataset: one example per line, label first, features after.

    Labels must be -1 or +1.  An optional header line is skipped; every data
    row must have the same number of columns.
    """
    rows = _read_rows(path)
    width = len(rows[0][1])
    if width < 2:
        raise DataFormatError(f"row {rows[0][0]}: need a label plus at least one feature, got {width} column(s)")
    labels = []
    features = []
    for lineno, row in rows:
        if len(row) != width:
            raise DataFormatError(f"row {lineno}: expected {width} columns, got {len(row)}")
        raw_label = _parse_float(row[0], lineno, 1)
        if raw_label not in (float(NORMAL), float(ABNORMAL)):
            raise DataFormatError(f"row {lineno}: label must be -1 or +1, got {row[0]!r}")
        labels.append(int(raw_label))
        features.append([_parse_float(cell, lineno, col) for col, cell in enumerate(row[1:], start=2)])
    return Dataset(np.array(features), np.array(labels))


def load_feature_csv(path) -> np.ndarray:
    """Read an unlabeled feature matrix: every column is a feature."""
    rows = _read_rows(path)
    width = len(rows[0][1])
    features = []
    for lineno, row in rows:
        if len(row) != width:
            raise DataFormatError(f"row {lineno}: expected {width} columns, got {len(row)}")
        features.append([_parse_float(cell, lineno, col) for col, cell in enumerate(row, start=1)])
    matrix = np.array(features)
    matrix.setflags(write=False)
    return matrix


def save_csv(data: Dataset, path) -> None:
    """Write a Dataset in the load_csv format, exactly round-trippable."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for x, label in data:
            fh.write(",".join([str(label)] + [repr(float(v)) for v in x]) + "\n")


@dataclass(frozen=True, eq=False)
class NormalizationParams:
    """Per-feature min-max scaling fitted on training data only."""

    minimum: np.ndarray
    maximum: np.ndarray

    def __post_init__(self):
        minimum = np.array(self.minimum, dtype=float)
        maximum = np.array(self.maximum, dtype=float)
        if minimum.ndim != 1 or minimum.shape != maximum.shape:
            raise ValueError("minimum and maximum must be 1-d arrays of equal length")
        if not (np.all(np.isfinite(minimum)) and np.all(np.isfinite(maximum))):
            raise ValueError("normalization bounds must be finite")
        if np.any(maximum < minimum):
            raise ValueError("maximum must be >= minimum per feature")
        minimum.setflags(write=False)
        maximum.setflags(write=False)
        object.__setattr__(self, "minimum", minimum)
        object.__setattr__(self, "maximum", maximum)

    @property
    def dim(self) -> int:
        return self.minimum.size

    def transform(self, values: np.ndarray) -> np.ndarray:
        """Map values to (v - min) / (max - min) per feature.

        Constant features map to 0.  Values outside the fitted range are not
        clipped; a test-time value beyond the training extremes lands outside
        [0, 1] on purpose.
        """
        values = np.asarray(values, dtype=float)
        if values.shape[-1] != self.dim:
            raise ValueError(f"values have {values.shape[-1]} features, normalizer expects {self.dim}")
        span = self.maximum - self.minimum
        scaled = (values - self.minimum) / np.where(span > 0.0, span, 1.0)
        return np.where(span > 0.0, scaled, 0.0)


def fit_normalizer(data: Dataset) -> NormalizationParams:
    return NormalizationParams(minimum=data.X.min(axis=0), maximum=data.X.max(axis=0))


def apply_normalizer(params: NormalizationParams, data: Dataset) -> Dataset:
    return Dataset(params.transform(data.X), data.y)


SYNTH_KINDS = ("two-blobs", "overlap-blobs", "patch-texture")


@dataclass(frozen=True)
class SynthSpec:
    """Recipe for a synthetic dataset.

    two-blobs / overlap-blobs: unit-variance isotropic Gaussians centered at
    -separation/2 and +separation/2 along the first axis; the two kinds exist
    so experiment configs can say what they mean (overlap-blobs is meant to
    be called with a small separation, around 1).

    patch-texture: smoothed Gaussian noise rasters with class-dependent
    amplitude (std 1 for the -1 class, 2 for +1), flattened to dim features
    and min-max scaled over the whole dataset.  A qualitative stand-in for
    texture patches; separation is ignored.
    """

    kind: str
    n_per_class: int
    dim: int
    separation: float
    seed: int = 0

    def __post_init__(self):
        if self.kind not in SYNTH_KINDS:
            raise ValueError(f"kind must be one of {SYNTH_KINDS}, got {self.kind!r}")
        if self.n_per_class < 1:
            raise ValueError(f"n_per_class must be >= 1, got {self.n_per_class}")
        if self.dim < 1:
            raise ValueError(f"dim must be >= 1, got {self.dim}")
        if not (math.isfinite(self.separation) and self.separation >= 0):
            raise ValueError(f"separation must be >= 0, got {self.separation}")
        if self.seed < 0:
            raise ValueError(f"seed must be non-negative, got {self.seed}")
        if self.kind == "patch-texture" and math.isqrt(self.dim) ** 2 != self.dim:
            raise ValueError(f"patch-texture dim must be a perfect square, got {self.dim}")


def generate_synthetic(spec: SynthSpec) -> Dataset:
    """Deterministic synthetic dataset per ``spec``; -1 block first, then +1."""
    rng = np.random.default_rng(spec.seed)
    n = spec.n_per_class
    y = np.array([NORMAL] * n + [ABNORMAL] * n)
    if spec.kind in ("two-blobs", "overlap-blobs"):
        X = rng.standard_normal((2 * n, spec.dim))
        X[:n, 0] -= spec.separation / 2.0
        X[n:, 0] += spec.separation / 2.0
        return Dataset(X, y)
    # patch-texture
    side = math.isqrt(spec.dim)
    amplitude = {NORMAL: 1.0, ABNORMAL: 2.0}
    fields = []
    for label in (NORMAL, ABNORMAL):
        for _ in range(n):
            field = gaussian_filter(rng.standard_normal((side, side)), sigma=2.0, mode="reflect")
            fields.append(amplitude[label] * field.ravel())
    X = np.array(fields)
    low, high = X.min(), X.max()
    if high > low:
        X = (X - low) / (high - low)
    return Dataset(X, y)


@dataclass(frozen=True, eq=False)
class ModelFile:
    """A deserialized model plus the feature scaling it was trained with, if any."""

    model: LwaModel | SvmModel
    normalization: NormalizationParams | None


def _take(doc: dict, name: str):
    if name not in doc:
        raise DataFormatError(f"model file missing field {name!r}")
    return doc[name]


def _float_field(doc: dict, name: str) -> float:
    value = _take(doc, name)
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise DataFormatError(f"field {name!r} must be a number, got {value!r}")
    return float(value)


def _int_field(doc: dict, name: str) -> int:
    value = _take(doc, name)
    if not isinstance(value, int) or isinstance(value, bool):
        raise DataFormatError(f"field {name!r} must be an integer, got {value!r}")
    return value


def _array_field(doc: dict, name: str) -> np.ndarray:
    value = _take(doc, name)
    if not isinstance(value, list) or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value):
        raise DataFormatError(f"field {name!r} must be a list of numbers")
    return np.array(value, dtype=float)


def save_model(model: LwaModel | SvmModel, path, normalization: NormalizationParams | None = None) -> None:
    """Write a model as JSON.  Floats keep full precision, so loading gives
    back bit-identical scores.  ``normalization`` rides along when the model
    was trained on scaled features, so prediction can reapply the scaling."""
    if isinstance(model, LwaModel):
        doc = {
            "format_version": MODEL_FORMAT_VERSION,
            "kind": "lwa",
            "dim": model.dim,
            "hyperparameters": {
                "lambda_w": model.hyper.lambda_w,
                "lambda_u": model.hyper.lambda_u,
                "c": model.hyper.c,
                "iterations": model.hyper.iterations,
                "seed": model.hyper.seed,
            },
            "w": [float(v) for v in model.w],
            "u": [float(v) for v in model.u],
            "b": model.b,
            "b_prime": model.b_prime,
        }
    elif isinstance(model, SvmModel):
        doc = {
            "format_version": MODEL_FORMAT_VERSION,
            "kind": "svm",
            "dim": model.dim,
            "hyperparameters": {
                "lambda_w": model.lambda_w,
                "iterations": model.iterations,
                "seed": model.seed,
            },
            "w": [float(v) for v in model.w],
            "b": model.b,
        }
    else:
        raise TypeError(f"unsupported model type {type(model).__name__}")
    if normalization is not None:
        doc["normalization"] = {
            "minimum": [float(v) for v in normalization.minimum],
            "maximum": [float(v) for v in normalization.maximum],
        }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load_model(path) -> ModelFile:
    """Read a model file written by save_model; see ModelFile."""
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DataFormatError(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(doc, dict):
        raise DataFormatError(f"{path}: expected a JSON object at top level")
    version = _take(doc, "format_version")
    if version != MODEL_FORMAT_VERSION:
        raise UnsupportedVersionError(
            f"unsupported format_version {version!r}; this build reads version {MODEL_FORMAT_VERSION}"
        )
    kind = _take(doc, "kind")
    hyper_doc = _take(doc, "hyperparameters")
    if not isinstance(hyper_doc, dict):
        raise DataFormatError("field 'hyperparameters' must be an object")
    try:
        if kind == "lwa":
            hyper = Hyperparameters(
                lambda_w=_float_field(hyper_doc, "lambda_w"),
                lambda_u=_float_field(hyper_doc, "lambda_u"),
                c=_float_field(hyper_doc, "c"),
                iterations=_int_field(hyper_doc, "iterations"),
                seed=_int_field(hyper_doc, "seed"),
            )
            model: LwaModel | SvmModel = LwaModel(
                w=_array_field(doc, "w"),
                u=_array_field(doc, "u"),
                b=_float_field(doc, "b"),
                b_prime=_float_field(doc, "b_prime"),
                hyper=hyper,
            )
        elif kind == "svm":
            model = SvmModel(
                w=_array_field(doc, "w"),
                b=_float_field(doc, "b"),
                lambda_w=_float_field(hyper_doc, "lambda_w"),
                iterations=_int_field(hyper_doc, "iterations"),
                seed=_int_field(hyper_doc, "seed"),
            )
        else:
            raise DataFormatError(f"field 'kind' must be 'lwa' or 'svm', got {kind!r}")
    except DataFormatError:
        raise
    except ValueError as exc:
        raise DataFormatError(f"invalid model data: {exc}") from None
    if model.dim != _int_field(doc, "dim"):
        raise DataFormatError(f"field 'dim' is {doc['dim']} but weights have length {model.dim}")
    normalization = None
    if "normalization" in doc:
        norm_doc = doc["normalization"]
        if not isinstance(norm_doc, dict):
            raise DataFormatError("field 'normalization' must be an object")
        try:
            normalization = NormalizationParams(
                minimum=_array_field(norm_doc, "minimum"),
                maximum=_array_field(norm_doc, "maximum"),
            )
        except ValueError as exc:
            raise DataFormatError(f"invalid normalization data: {exc}") from None
        if normalization.dim != model.dim:
            raise DataFormatError("normalization length does not match model dim")
    return ModelFile(model=model, normalization=normalization)


def _json_metric(value: float | None):
    return None if value is None else float(value)


def save_report(report: EvalReport, path) -> None:
    """Write an EvalReport as JSON: headline metrics plus every per-example record."""
    doc = {
        "n_examples": report.n_examples,
        "n_accepted": report.n_accepted,
        "n_abstained": report.n_abstained,
        "n_misclassified": report.n_misclassified,
        "abstention_fraction": report.abstention_fraction,
        "accuracy_on_accepted": _json_metric(report.accuracy_on_accepted),
        "overall_accuracy_counting_rejects_as_errors": report.overall_accuracy_counting_rejects_as_errors,
        "auc_roc": _json_metric(report.auc_roc),
        "per_example": [
            {
                "y": y,
                "label": outcome.label,
                "h_score": outcome.h_score,
                "r_score": outcome.r_score,
            }
            for y, outcome in report.per_example
        ],
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def _table_cell(value) -> str:
    if value is None:
        return "nan"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def save_sweep_table(points, path) -> None:
    """Write sweep results as a flat plot-ready CSV with a fixed header."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(SWEEP_HEADER + "\n")
        for p in points:
            cells = [p.c, p.auc_roc, p.abstention_fraction, p.accuracy_on_accepted, p.n_misclassified, p.n_abstained]
            fh.write(",".join(_table_cell(cell) for cell in cells) + "\n")
