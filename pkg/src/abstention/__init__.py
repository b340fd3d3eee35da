"""Selective linear classification toolkit.

Trains a linear classifier that may abstain from predicting, by stochastic
subgradient descent on a convex surrogate of the abstention loss.  Ships
with SVM and 1-nearest-neighbor baselines, a leave-one-out evaluation
harness, an abstention-cost sweep, and a batch CLI.
"""

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
    require_both_labels,
    score_h,
    score_r,
)
from .data import (
    DataFormatError,
    ModelFile,
    NormalizationParams,
    SynthSpec,
    UnsupportedVersionError,
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
from .evaluation import (
    HyperSearchResult,
    LwaTrainer,
    NnTrainer,
    SvmTrainer,
    SweepPoint,
    auc_roc,
    loocv,
    prediction_outcome,
    report_metrics,
    select_hyperparameters,
    sweep_c,
)
from .losses import (
    Branch,
    SubgradientPair,
    hinge_loss,
    lwa_subgradient,
    objective_value,
    surrogate_loss,
    true_abstention_loss,
)
from .solvers import (
    NnModel,
    TrainingTrace,
    nn_margin,
    oracle_minimize_lwa,
    predict_nn,
    train_lwa,
    train_nn,
    train_svm,
)

__all__ = [
    "ABNORMAL",
    "Branch",
    "DataFormatError",
    "Dataset",
    "EvalReport",
    "HyperSearchResult",
    "Hyperparameters",
    "LwaModel",
    "LwaTrainer",
    "ModelFile",
    "NORMAL",
    "NnModel",
    "NnTrainer",
    "NormalizationParams",
    "PredictionOutcome",
    "SubgradientPair",
    "SvmModel",
    "SvmTrainer",
    "SweepPoint",
    "SynthSpec",
    "TrainingTrace",
    "UnsupportedVersionError",
    "apply_normalizer",
    "auc_roc",
    "fit_normalizer",
    "generate_synthetic",
    "hinge_loss",
    "load_csv",
    "load_feature_csv",
    "load_model",
    "loocv",
    "lwa_subgradient",
    "nn_margin",
    "objective_value",
    "oracle_minimize_lwa",
    "predict",
    "predict_nn",
    "prediction_outcome",
    "report_metrics",
    "require_both_labels",
    "save_csv",
    "save_model",
    "save_report",
    "save_sweep_table",
    "score_h",
    "score_r",
    "select_hyperparameters",
    "surrogate_loss",
    "sweep_c",
    "train_lwa",
    "train_nn",
    "train_svm",
    "true_abstention_loss",
]
