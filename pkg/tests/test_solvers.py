"""Training loops: the abstaining subgradient solver, the SVM, and 1-NN."""

import numpy as np
import pytest

from abstention import (
    Dataset,
    Hyperparameters,
    NnModel,
    SynthSpec,
    generate_synthetic,
    nn_margin,
    objective_value,
    oracle_minimize_lwa,
    predict,
    predict_nn,
    train_lwa,
    train_nn,
    train_svm,
)


def two_point_data():
    return Dataset(X=np.array([[1.0, -2.0], [0.5, 3.0]]), y=np.array([1, -1]))


# ---------------------------------------------------------------- train_lwa

def test_train_lwa_single_iteration_hand_simulated():
    """One step from zero weights is fully determined by the drawn example.

    Power-of-two lambdas make every arithmetic step exact, so the comparison
    is bitwise, not approximate.  The drawn index comes from the documented
    generator (PCG64 via numpy default_rng).
    """
    data = two_point_data()
    seed = 3
    hyper = Hyperparameters(lambda_w=0.5, lambda_u=0.25, c=0.25, iterations=1, seed=seed)
    idx = int(np.random.default_rng(seed).integers(0, len(data), size=1)[0])
    x, y = data.example(idx)

    model, trace = train_lwa(data, hyper)

    # zero model always sits in the margin-violation branch
    np.testing.assert_array_equal(model.w, (y * x) / (2 * 0.5))
    np.testing.assert_array_equal(model.u, -x / (2 * 0.25))
    assert model.b == y / (2 * 0.5)
    assert model.b_prime == -1 / (2 * 0.25)
    assert trace.final_model is model


def test_train_lwa_deterministic_per_seed():
    data = generate_synthetic(SynthSpec(kind="overlap-blobs", n_per_class=10, dim=2,
                                        separation=1.0, seed=4))
    hyper = Hyperparameters(lambda_w=0.01, lambda_u=0.01, c=0.3, iterations=500, seed=11)
    a, _ = train_lwa(data, hyper)
    b, _ = train_lwa(data, hyper)
    np.testing.assert_array_equal(a.w, b.w)
    np.testing.assert_array_equal(a.u, b.u)
    assert a.b == b.b and a.b_prime == b.b_prime


def test_train_lwa_seed_changes_output():
    data = generate_synthetic(SynthSpec(kind="overlap-blobs", n_per_class=10, dim=2,
                                        separation=1.0, seed=4))
    base = dict(lambda_w=0.01, lambda_u=0.01, c=0.3, iterations=500)
    a, _ = train_lwa(data, Hyperparameters(seed=0, **base))
    b, _ = train_lwa(data, Hyperparameters(seed=1, **base))
    assert not np.array_equal(a.w, b.w)


def test_train_lwa_separable_fits_training_set():
    # easy blobs, expensive abstention: every training point gets a correct,
    # accepted prediction
    data = generate_synthetic(SynthSpec(kind="two-blobs", n_per_class=20, dim=2,
                                        separation=8.0, seed=5))
    hyper = Hyperparameters(lambda_w=1e-3, lambda_u=1e-3, c=0.45, iterations=100_000, seed=0)
    model, _ = train_lwa(data, hyper)
    outcomes = [predict(model, x) for x, _ in data]
    assert sum(o.is_rejected for o in outcomes) == 0
    assert all(o.label == y for o, (_, y) in zip(outcomes, data))


def test_train_lwa_near_half_c_never_abstains_on_separable_data():
    data = generate_synthetic(SynthSpec(kind="two-blobs", n_per_class=20, dim=2,
                                        separation=8.0, seed=5))
    hyper = Hyperparameters(lambda_w=1e-3, lambda_u=1e-3, c=0.49, iterations=100_000, seed=0)
    model, _ = train_lwa(data, hyper)
    assert sum(predict(model, x).is_rejected for x, _ in data) == 0


def test_train_lwa_cheap_abstention_rejects_overlap():
    data = generate_synthetic(SynthSpec(kind="overlap-blobs", n_per_class=50, dim=2,
                                        separation=1.0, seed=7))
    hyper = Hyperparameters(lambda_w=1e-3, lambda_u=1e-3, c=0.05, iterations=5000, seed=0)
    model, _ = train_lwa(data, hyper)
    rejected = sum(predict(model, x).is_rejected for x, _ in data)
    assert rejected / len(data) >= 0.9


def test_train_lwa_rejects_single_class_data():
    data = Dataset(X=np.zeros((3, 2)), y=np.array([1, 1, 1]))
    hyper = Hyperparameters(lambda_w=0.1, lambda_u=0.1, c=0.25, iterations=10, seed=0)
    with pytest.raises(ValueError):
        train_lwa(data, hyper)


def test_train_lwa_rejects_negative_stride():
    hyper = Hyperparameters(lambda_w=0.1, lambda_u=0.1, c=0.25, iterations=10, seed=0)
    with pytest.raises(ValueError):
        train_lwa(two_point_data(), hyper, trace_stride=-5)


# ---------------------------------------------------------------- trace

def test_trace_stride_controls_sampling():
    hyper = Hyperparameters(lambda_w=0.1, lambda_u=0.1, c=0.25, iterations=100, seed=0)
    _, trace = train_lwa(two_point_data(), hyper, trace_stride=10)
    iterations = [t for t, _ in trace.objective_samples]
    assert iterations == [0, 10, 20, 30, 40, 50, 60, 70, 80, 90, 100]
    values = [j for _, j in trace.objective_samples]
    assert all(np.isfinite(v) for v in values)


def test_trace_disabled_with_zero_stride():
    hyper = Hyperparameters(lambda_w=0.1, lambda_u=0.1, c=0.25, iterations=50, seed=0)
    _, trace = train_lwa(two_point_data(), hyper, trace_stride=0)
    assert trace.objective_samples == ()


def test_trace_always_ends_at_final_iteration():
    hyper = Hyperparameters(lambda_w=0.1, lambda_u=0.1, c=0.25, iterations=105, seed=0)
    _, trace = train_lwa(two_point_data(), hyper, trace_stride=10)
    assert trace.objective_samples[-1][0] == 105
    iterations = [t for t, _ in trace.objective_samples]
    assert iterations == sorted(set(iterations))


def test_objective_trends_down_between_windows():
    """Smoothed over 1000-iteration windows, the objective does not rise."""
    data = generate_synthetic(SynthSpec(kind="overlap-blobs", n_per_class=50, dim=2,
                                        separation=1.0, seed=7))
    T = 20_000
    hyper = Hyperparameters(lambda_w=0.01, lambda_u=0.01, c=0.25, iterations=T, seed=0)
    _, trace = train_lwa(data, hyper, trace_stride=200)
    first = np.mean([j for t, j in trace.objective_samples if 1 <= t <= 1000])
    last = np.mean([j for t, j in trace.objective_samples if T - 999 <= t <= T])
    assert last <= first


# ---------------------------------------------------------------- train_svm

def test_train_svm_single_iteration_hand_simulated():
    data = two_point_data()
    seed = 3
    idx = int(np.random.default_rng(seed).integers(0, len(data), size=1)[0])
    x, y = data.example(idx)
    model = train_svm(data, lambda_w=0.5, iterations=1, seed=seed)
    # zero weights violate the margin, so w_2 = (1/lambda) y x
    np.testing.assert_array_equal(model.w, (y * x) / 0.5)
    assert model.b == float(y)


def test_train_svm_separable_training_accuracy():
    data = generate_synthetic(SynthSpec(kind="two-blobs", n_per_class=20, dim=2,
                                        separation=8.0, seed=5))
    model = train_svm(data, lambda_w=1e-3, iterations=100_000, seed=0)
    h = data.X @ model.w + model.b
    assert int((np.sign(h) != data.y).sum()) == 0


def test_train_svm_deterministic_per_seed():
    data = two_point_data()
    a = train_svm(data, lambda_w=0.1, iterations=300, seed=9)
    b = train_svm(data, lambda_w=0.1, iterations=300, seed=9)
    np.testing.assert_array_equal(a.w, b.w)
    assert a.b == b.b


@pytest.mark.parametrize("kwargs", [
    dict(lambda_w=0.0, iterations=10),
    dict(lambda_w=-1.0, iterations=10),
    dict(lambda_w=0.1, iterations=0),
])
def test_train_svm_rejects_bad_arguments(kwargs):
    with pytest.raises(ValueError):
        train_svm(two_point_data(), **kwargs)


def test_train_svm_rejects_single_class():
    data = Dataset(X=np.ones((2, 2)), y=np.array([-1, -1]))
    with pytest.raises(ValueError):
        train_svm(data, lambda_w=0.1, iterations=10)


# ---------------------------------------------------------------- 1-NN

def test_train_nn_stores_dataset_verbatim():
    data = two_point_data()
    model = train_nn(data)
    assert isinstance(model, NnModel)
    assert model.data is data


def test_predict_nn_self_match():
    data = two_point_data()
    model = train_nn(data)
    for x, y in data:
        assert predict_nn(model, x) == y


def test_predict_nn_single_example_always_wins():
    model = train_nn(Dataset(X=np.array([[5.0, 5.0]]), y=np.array([-1])))
    for x in ([0.0, 0.0], [100.0, -3.0], [5.0, 5.0]):
        assert predict_nn(model, x) == -1


def test_predict_nn_hand_distances():
    model = train_nn(Dataset(X=np.array([[0.0, 0.0], [10.0, 10.0]]), y=np.array([-1, 1])))
    assert predict_nn(model, [1.0, 1.0]) == -1


def test_predict_nn_tie_takes_earlier_index():
    X = np.array([[0.0], [2.0]])
    tied = train_nn(Dataset(X=X, y=np.array([-1, 1])))
    assert predict_nn(tied, [1.0]) == -1
    swapped = train_nn(Dataset(X=X[::-1].copy(), y=np.array([1, -1])))
    assert predict_nn(swapped, [1.0]) == 1


def test_predict_nn_permutation_invariant_without_ties():
    rng = np.random.default_rng(6)
    X = rng.normal(size=(30, 3))
    y = np.where(rng.uniform(size=30) < 0.5, -1, 1)
    y[0], y[1] = -1, 1
    data = Dataset(X=X, y=y)
    perm = rng.permutation(30)
    shuffled = data.subset(perm)
    queries = rng.normal(size=(20, 3))
    for q in queries:
        assert predict_nn(train_nn(data), q) == predict_nn(train_nn(shuffled), q)


def test_predict_nn_dimension_mismatch():
    model = train_nn(two_point_data())
    with pytest.raises(ValueError):
        predict_nn(model, [1.0, 2.0, 3.0])


def test_nn_margin_sign_tracks_label_and_is_bounded():
    data = Dataset(X=np.array([[0.0], [10.0]]), y=np.array([-1, 1]))
    model = train_nn(data)
    near_neg = nn_margin(model, [1.0])
    near_pos = nn_margin(model, [9.0])
    assert -1.0 <= near_neg < 0.0 < near_pos <= 1.0
    assert near_neg == -near_pos


# ---------------------------------------------------------------- oracle

def test_oracle_singleton_beats_zero_model():
    data = Dataset(X=np.array([[0.5]]), y=np.array([1]))
    hyper = Hyperparameters(lambda_w=1.0, lambda_u=1.0, c=0.25, iterations=1, seed=0)
    oracle = oracle_minimize_lwa(data, hyper)
    # the zero model is on the grid and scores 1.0, so the argmin cannot lose
    assert objective_value(data, oracle) <= 1.0


def test_oracle_symmetric_pair_aligns_with_x():
    x = np.array([1.0, 0.5])
    data = Dataset(X=np.vstack([x, -x]), y=np.array([1, -1]))
    hyper = Hyperparameters(lambda_w=1.0, lambda_u=1.0, c=0.25, iterations=1, seed=0)
    oracle = oracle_minimize_lwa(data, hyper)
    assert float(oracle.w @ x) > 0.0
    assert abs(oracle.b) <= 0.25


def test_oracle_rejects_high_dimensional_data():
    data = Dataset(X=np.zeros((2, 3)), y=np.array([1, -1]))
    hyper = Hyperparameters(lambda_w=1.0, lambda_u=1.0, c=0.25, iterations=1, seed=0)
    with pytest.raises(ValueError):
        oracle_minimize_lwa(data, hyper)
