"""Training routines: stochastic subgradient descent for the abstaining
linear model, Pegasos for the SVM baseline, and a memorizing 1-nearest
neighbor.  A brute-force grid oracle for low dimensions sits at the bottom;
it exists purely to check the stochastic solver against an independent
minimizer.

Randomness policy: every stochastic routine takes an explicit integer seed
and draws from numpy's PCG64 generator, so runs are reproducible bit for bit
on any platform.  The T example indices are drawn as one block up front.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ABNORMAL, Dataset, Hyperparameters, LwaModel, SvmModel, require_both_labels
from .losses import surrogate_loss_total


@dataclass(frozen=True, eq=False)
class TrainingTrace:
    """Objective samples (iteration, value) recorded while training."""

    objective_samples: tuple[tuple[int, float], ...]
    final_model: LwaModel


def _full_objective(data: Dataset, w, u, b, b_prime, hyper: Hyperparameters) -> float:
    reg = 0.5 * hyper.lambda_w * float(w @ w) + 0.5 * hyper.lambda_u * float(u @ u)
    return reg + surrogate_loss_total(data.X, data.y, w, u, b, b_prime, hyper.c)


def train_lwa(
    data: Dataset,
    hyper: Hyperparameters,
    trace_stride: int | None = None,
) -> tuple[LwaModel, TrainingTrace]:
    """Minimize the abstention surrogate objective by stochastic subgradient descent.

    Starts from all zeros.  At iteration t (from 1) one example is drawn
    uniformly, the active surrogate piece picked by strict comparison, and a
    step of size 1/(lambda*t) taken; the norm penalties turn that into the
    usual (1 - 1/t) shrink on the weights.  Biases take the same step but are
    never shrunk because they are not penalized.  Returns the iterate after
    iteration T, no averaging, no projection.

    ``trace_stride`` controls objective sampling: None means iterations/100,
    0 disables sampling (cheaper inside cross-validation loops).
    """
    require_both_labels(data)
    n, d = data.X.shape
    T = int(hyper.iterations)
    if trace_stride is None:
        trace_stride = max(1, T // 100)
    elif trace_stride < 0:
        raise ValueError(f"trace_stride must be >= 0, got {trace_stride}")

    lambda_w = hyper.lambda_w
    lambda_u = hyper.lambda_u
    c = hyper.c
    beta = hyper.beta
    c_beta = c * beta

    w = np.zeros(d)
    u = np.zeros(d)
    b = 0.0
    b_prime = 0.0

    rng = np.random.default_rng(hyper.seed)
    order = rng.integers(0, n, size=T)

    X = data.X
    y = data.y
    samples: list[tuple[int, float]] = []
    if trace_stride:
        samples.append((0, _full_objective(data, w, u, b, b_prime, hyper)))

    for t in range(1, T + 1):
        i = order[t - 1]
        x = X[i]
        yi = y[i]
        h = w @ x + b
        r = u @ x + b_prime
        t_margin = 1.0 + 0.5 * (r - yi * h)
        t_reject = c * (1.0 - beta * r)
        shrink = 1.0 - 1.0 / t
        if t_margin > max(0.0, t_reject):
            w *= shrink
            w += (yi / (2.0 * lambda_w * t)) * x
            u *= shrink
            u -= (1.0 / (2.0 * lambda_u * t)) * x
            b += yi / (2.0 * lambda_w * t)
            b_prime -= 1.0 / (2.0 * lambda_u * t)
        elif t_reject > max(0.0, t_margin):
            w *= shrink
            u *= shrink
            u += (c_beta / (lambda_u * t)) * x
            b_prime += c_beta / (lambda_u * t)
        else:
            w *= shrink
            u *= shrink
        if trace_stride and t % trace_stride == 0:
            samples.append((t, _full_objective(data, w, u, b, b_prime, hyper)))

    if trace_stride and samples[-1][0] != T:
        samples.append((T, _full_objective(data, w, u, b, b_prime, hyper)))

    model = LwaModel(w=w, u=u, b=b, b_prime=b_prime, hyper=hyper)
    return model, TrainingTrace(objective_samples=tuple(samples), final_model=model)


def train_svm(data: Dataset, lambda_w: float, iterations: int, seed: int = 0) -> SvmModel:
    """Pegasos-style primal SVM on the hinge loss, one example per iteration.

    Same shrink-then-step scheme as train_lwa but with the single margin
    condition y*h < 1.  The bias is trained unregularized.
    """
    require_both_labels(data)
    if not (np.isfinite(lambda_w) and lambda_w > 0):
        raise ValueError(f"lambda_w must be positive and finite, got {lambda_w}")
    T = int(iterations)
    if T < 1:
        raise ValueError(f"iterations must be >= 1, got {iterations}")

    n, d = data.X.shape
    w = np.zeros(d)
    b = 0.0
    rng = np.random.default_rng(seed)
    order = rng.integers(0, n, size=T)
    X = data.X
    y = data.y

    for t in range(1, T + 1):
        i = order[t - 1]
        x = X[i]
        yi = y[i]
        shrink = 1.0 - 1.0 / t
        if yi * (w @ x + b) < 1.0:
            w *= shrink
            w += (yi / (lambda_w * t)) * x
            # 1/t, not 1/(lambda*t): b is never shrunk, so a lambda-scaled
            # first step would persist as an O(1/lambda) offset forever.
            b += yi / t
        else:
            w *= shrink

    return SvmModel(w=w, b=b, lambda_w=lambda_w, iterations=T, seed=seed)


@dataclass(frozen=True, eq=False)
class NnModel:
    """1-nearest-neighbor 'model': the stored training set."""

    data: Dataset


def train_nn(data: Dataset) -> NnModel:
    return NnModel(data=data)


def _squared_distances(model: NnModel, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (model.data.dim,):
        raise ValueError(f"feature vector has shape {tuple(x.shape)}, model expects ({model.data.dim},)")
    diff = model.data.X - x
    return np.einsum("ij,ij->i", diff, diff)


def predict_nn(model: NnModel, x) -> int:
    """Label of the closest stored example (Euclidean); distance ties go to
    the lowest stored index."""
    d2 = _squared_distances(model, x)
    return int(model.data.y[int(np.argmin(d2))])


def nn_margin(model: NnModel, x) -> float:
    """Continuous confidence for ranking: (d- - d+) / (d- + d+) where d+ and
    d- are distances to the nearest stored +1 and -1 example.

    Bounded in [-1, 1]; positive leans +1.  With only one class stored the
    margin saturates at +-1, and a query coinciding with both classes gives 0.
    """
    d2 = _squared_distances(model, x)
    y = model.data.y
    pos = d2[y == ABNORMAL]
    neg = d2[y != ABNORMAL]
    d_pos = float(np.sqrt(pos.min())) if pos.size else None
    d_neg = float(np.sqrt(neg.min())) if neg.size else None
    if d_pos is None:
        return -1.0
    if d_neg is None:
        return 1.0
    total = d_neg + d_pos
    if total == 0.0:
        return 0.0
    return (d_neg - d_pos) / total


def _axis(lo: float, hi: float, step: float) -> np.ndarray:
    count = int(round((hi - lo) / step)) + 1
    return lo + step * np.arange(count)


def _combo_matrix(axes: list[np.ndarray]) -> np.ndarray:
    grids = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def _scan_grid(data: Dataset, hyper: Hyperparameters, w_combos: np.ndarray, u_combos: np.ndarray) -> tuple[int, int]:
    """Joint argmin of the objective over every (w, b) x (u, b') grid pair.

    The scan runs in float32 to halve memory traffic; the caller re-scores
    the winner in float64.  Last column of each combo matrix is the bias.
    """
    X, y = data.X, data.y
    c, beta = hyper.c, hyper.beta

    # y*h per (w, b) combo and r per (u, b') combo, rows = combos.
    margins = (X @ w_combos[:, :-1].T + w_combos[:, -1]) * y[:, None]
    r_vals = X @ u_combos[:, :-1].T + u_combos[:, -1]
    half_margin = np.ascontiguousarray(-0.5 * margins.T, dtype=np.float32)
    r_base = np.ascontiguousarray(1.0 + 0.5 * r_vals.T, dtype=np.float32)
    # max(0, t3) folded in up front: max(0, t2, t3) == max(t2, max(0, t3)).
    reject_floor = np.maximum(c * (1.0 - beta * r_vals.T), 0.0).astype(np.float32)

    reg_w = (0.5 * hyper.lambda_w * (w_combos[:, :-1] ** 2).sum(axis=1)).astype(np.float32)
    reg_u = (0.5 * hyper.lambda_u * (u_combos[:, :-1] ** 2).sum(axis=1)).astype(np.float32)

    n_w = half_margin.shape[0]
    n_u = r_base.shape[0]
    chunk = max(1, min(n_w, 2**24 // max(1, n_u * X.shape[0])))
    buf = np.empty((chunk, n_u, X.shape[0]), dtype=np.float32)

    best_value = np.float32(np.inf)
    best_w = best_u = 0
    for start in range(0, n_w, chunk):
        stop = min(start + chunk, n_w)
        view = buf[: stop - start]
        np.add(half_margin[start:stop, None, :], r_base[None, :, :], out=view)
        np.maximum(view, reject_floor[None, :, :], out=view)
        totals = view.sum(axis=2)
        totals += reg_w[start:stop, None]
        totals += reg_u[None, :]
        flat = int(np.argmin(totals))
        value = totals.ravel()[flat]
        if value < best_value:
            best_value = value
            best_w = start + flat // n_u
            best_u = flat % n_u
    return best_w, best_u


def oracle_minimize_lwa(
    data: Dataset,
    hyper: Hyperparameters,
    grid_bounds: tuple[float, float] = (-3.0, 3.0),
    grid_step: float = 0.25,
) -> LwaModel:
    """Exhaustive grid minimizer of the surrogate objective for dim <= 2.

    Scans every combination of weight and bias coordinates over
    ``grid_bounds`` at ``grid_step``, then refines once with a 10x finer
    local grid around the coarse argmin (clipped to the same bounds).
    Intended as an independent check on train_lwa at desk scale, not as a
    practical trainer.
    """
    if data.dim > 2:
        raise ValueError(f"grid oracle supports dim <= 2 only, got dim {data.dim}")
    lo, hi = float(grid_bounds[0]), float(grid_bounds[1])
    if not lo < hi:
        raise ValueError(f"grid_bounds must satisfy lo < hi, got {grid_bounds}")
    if not 0 < grid_step <= (hi - lo):
        raise ValueError(f"grid_step must lie in (0, hi - lo], got {grid_step}")

    d = data.dim
    coarse = _axis(lo, hi, grid_step)
    w_combos = _combo_matrix([coarse] * (d + 1))
    u_combos = _combo_matrix([coarse] * (d + 1))
    iw, iu = _scan_grid(data, hyper, w_combos, u_combos)
    center = np.concatenate([w_combos[iw], u_combos[iu]])

    fine_step = grid_step / 10.0
    fine_axes = [
        np.unique(np.clip(cv + fine_step * np.arange(-10, 11), lo, hi))
        for cv in center
    ]
    w_fine = _combo_matrix(fine_axes[: d + 1])
    u_fine = _combo_matrix(fine_axes[d + 1 :])
    iw, iu = _scan_grid(data, hyper, w_fine, u_fine)

    return LwaModel(
        w=w_fine[iw, :-1],
        u=u_fine[iu, :-1],
        b=float(w_fine[iw, -1]),
        b_prime=float(u_fine[iu, -1]),
        hyper=hyper,
    )
