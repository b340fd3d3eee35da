"""Abstention-aware losses, their subgradients, and the training objective.

The target loss charges nothing for a correct accepted prediction, 1 for an
accepted mistake, and c in (0, 0.5) for an abstention.  It is non-convex, so
training minimizes a convex upper bound instead:

    max(0, 1 + (r - y*h) / 2, c * (1 - beta * r)),   beta = 1 / (1 - 2c)

which is a pointwise max of affine functions of (h, r) and therefore convex.
The middle term punishes committing with a thin margin, the last one makes
abstention cost real money that grows the deeper r dives below 1 - 2c.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .core import Dataset, LwaModel


def _check_c(c: float) -> float:
    c = float(c)
    if not 0.0 < c < 0.5:
        raise ValueError(f"abstention cost c must lie strictly in (0, 0.5), got {c}")
    return c


def true_abstention_loss(y: int, h: float, r: float, c: float) -> float:
    """Operating loss of one decision: 0 correct, 1 accepted mistake, c abstention.

    The abstention charge applies at r <= 0; r exactly 0 is the boundary case
    where prediction still commits but the loss bills the cautious side.
    """
    c = _check_c(c)
    loss = 0.0
    if y * h <= 0.0 and r > 0.0:
        loss += 1.0
    if r <= 0.0:
        loss += c
    return loss


def surrogate_loss(y: int, h: float, r: float, c: float) -> float:
    """Convex upper bound on true_abstention_loss, used for training."""
    c = _check_c(c)
    beta = 1.0 / (1.0 - 2.0 * c)
    return max(0.0, 1.0 + 0.5 * (r - y * h), c * (1.0 - beta * r))


def hinge_loss(y: int, h: float) -> float:
    """Standard SVM hinge max(0, 1 - y*h)."""
    return max(0.0, 1.0 - y * h)


class Branch(enum.Enum):
    """Which affine piece of the surrogate is active at the current point."""

    MARGIN_VIOLATION = "margin_violation"
    REJECTION_ACTIVE = "rejection_active"
    NEITHER = "neither"


@dataclass(frozen=True, eq=False)
class SubgradientPair:
    """Subgradient of one example's regularized surrogate, split per parameter."""

    grad_w: np.ndarray
    grad_u: np.ndarray
    grad_b: float
    grad_b_prime: float
    branch: Branch


def lwa_subgradient(x: np.ndarray, y: int, model: LwaModel) -> SubgradientPair:
    """Subgradient at ``model`` of lambda_w/2 |w|^2 + lambda_u/2 |u|^2 + surrogate(x, y).

    Branch selection is by strict inequality; on ties the zero piece is a
    valid subgradient, so only the norm penalties contribute.  Biases are
    unregularized: their entries carry no lambda term.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (model.dim,):
        raise ValueError(f"feature vector has shape {tuple(x.shape)}, model expects ({model.dim},)")
    hyper = model.hyper
    beta = hyper.beta
    h = float(model.w @ x + model.b)
    r = float(model.u @ x + model.b_prime)
    t_margin = 1.0 + 0.5 * (r - y * h)
    t_reject = hyper.c * (1.0 - beta * r)

    grad_w = hyper.lambda_w * model.w
    grad_u = hyper.lambda_u * model.u
    if t_margin > max(0.0, t_reject):
        return SubgradientPair(
            grad_w=grad_w - 0.5 * y * x,
            grad_u=grad_u + 0.5 * x,
            grad_b=-0.5 * y,
            grad_b_prime=0.5,
            branch=Branch.MARGIN_VIOLATION,
        )
    if t_reject > max(0.0, t_margin):
        return SubgradientPair(
            grad_w=grad_w,
            grad_u=grad_u - hyper.c * beta * x,
            grad_b=0.0,
            grad_b_prime=-hyper.c * beta,
            branch=Branch.REJECTION_ACTIVE,
        )
    return SubgradientPair(
        grad_w=grad_w,
        grad_u=grad_u,
        grad_b=0.0,
        grad_b_prime=0.0,
        branch=Branch.NEITHER,
    )


def surrogate_loss_total(X: np.ndarray, y: np.ndarray, w, u, b: float, b_prime: float, c: float) -> float:
    # Vectorized sum of surrogate losses; shared by objective_value and the
    # training trace so both report the same number.
    beta = 1.0 / (1.0 - 2.0 * c)
    h = X @ w + b
    r = X @ u + b_prime
    t_margin = 1.0 + 0.5 * (r - y * h)
    t_reject = c * (1.0 - beta * r)
    losses = np.maximum(0.0, np.maximum(t_margin, t_reject))
    return float(losses.sum())


def objective_value(data: Dataset, model: LwaModel) -> float:
    """Regularized training objective the solver descends.

    lambda_w/2 |w|^2 + lambda_u/2 |u|^2 + sum of per-example surrogate losses.
    Biases are excluded from the norms.
    """
    if data.dim != model.dim:
        raise ValueError(f"dataset dim {data.dim} does not match model dim {model.dim}")
    hyper = model.hyper
    reg = 0.5 * hyper.lambda_w * float(model.w @ model.w) + 0.5 * hyper.lambda_u * float(model.u @ model.u)
    return reg + surrogate_loss_total(data.X, data.y, model.w, model.u, model.b, model.b_prime, hyper.c)
