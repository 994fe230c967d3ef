"""Estimator-level training-loop tests (determinism, config handling, history)."""

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from gaitindex import network
from gaitindex.autoencoder import SparseAutoencoder, TrainConfig, kl_sparsity
from gaitindex.errors import TrainingDivergedError

from conftest import SMALL_HIDDEN, make_postures


def axis_data(n_frames=200, seed=21):
    return make_postures(n_frames=n_frames, seed=seed)[:, 1, :]  # y axis vectors


def small_model(**overrides):
    params = dict(
        hidden_dims=SMALL_HIDDEN, epochs=8, batch_size=32,
        learning_rate=1e-2, seed=4,
    )
    params.update(overrides)
    return SparseAutoencoder(**params)


# ----------------------------------------------------------------------
# config


def test_train_config_defaults():
    cfg = TrainConfig()
    assert cfg.rho == 0.05
    assert cfg.sparsity_weight == 0.1
    assert cfg.l2_weight == 1e-4
    assert cfg.learning_rate == 1e-3
    assert cfg.batch_size == 64
    assert cfg.epochs == 200
    assert cfg.momentum == 0.0
    assert cfg.to_dict()["rho"] == 0.05


@pytest.mark.parametrize(
    "bad",
    [
        {"rho": 0.0},
        {"rho": 1.0},
        {"sparsity_weight": -0.1},
        {"l2_weight": -1e-4},
        {"learning_rate": 0.0},
        {"batch_size": 0},
        {"epochs": -1},
        {"momentum": 1.0},
        {"momentum": -0.2},
        {"seed": -1},
    ],
)
def test_train_config_validation(bad):
    with pytest.raises(ValueError):
        TrainConfig(**bad)


def test_estimator_params_round_trip():
    model = small_model()
    params = model.get_params()
    assert params["learning_rate"] == 1e-2
    assert clone(model).get_params() == params
    model.set_params(epochs=1)
    assert model.epochs == 1


# ----------------------------------------------------------------------
# fitting


def test_fit_is_deterministic():
    X = axis_data()
    a = small_model().fit(X)
    b = small_model().fit(X)
    for Wa, Wb in zip(a.weights_, b.weights_):
        np.testing.assert_array_equal(Wa, Wb)
    for ba, bb in zip(a.biases_, b.biases_):
        np.testing.assert_array_equal(ba, bb)
    assert a.train_mse_ == b.train_mse_
    assert [s.total_loss for s in a.history_] == [s.total_loss for s in b.history_]


def test_different_seeds_give_different_models():
    X = axis_data()
    a = small_model(seed=1).fit(X)
    b = small_model(seed=2).fit(X)
    assert not np.array_equal(a.weights_[0], b.weights_[0])


def test_zero_epochs_leaves_the_initialization_untouched():
    X = axis_data()
    model = small_model(epochs=0).fit(X)
    dims = [17, *SMALL_HIDDEN, 17]
    w0, b0 = network.init_parameters(dims, np.random.default_rng(model.seed))
    for W, Winit in zip(model.weights_, w0):
        np.testing.assert_array_equal(W, Winit)
    for b, binit in zip(model.biases_, b0):
        np.testing.assert_array_equal(b, binit)
    assert model.history_ == []
    # train_mse_ reports the error of the untrained network
    np.testing.assert_allclose(
        model.train_mse_, float(np.mean(model.reconstruction_errors(X))), rtol=1e-15
    )


def test_loss_decreases_over_training():
    X = axis_data()
    model = small_model(epochs=20).fit(X)
    first = np.mean([s.total_loss for s in model.history_ if s.epoch == 0])
    last_epoch = model.history_[-1].epoch
    last = np.mean([s.total_loss for s in model.history_ if s.epoch == last_epoch])
    assert last < first


def test_history_breakdown_is_consistent():
    X = axis_data()
    model = small_model(epochs=3).fit(X)
    assert len(model.history_) == 3 * int(np.ceil(X.shape[0] / model.batch_size))
    for s in model.history_:
        total = s.recon_loss + model.sparsity_weight * s.kl_penalty + model.l2_weight * s.l2_term
        np.testing.assert_allclose(s.total_loss, total, rtol=1e-12)
        assert s.recon_loss >= 0.0 and s.kl_penalty >= 0.0 and s.l2_term >= 0.0


def test_evaluate_loss_matches_the_term_functions():
    X = axis_data(n_frames=64)
    model = small_model(epochs=2).fit(X)
    stats = model.evaluate_loss(X)
    recon, kl, l2 = network.loss_terms(
        model.weights_, model.biases_, model.activations_, X, model.rho
    )
    np.testing.assert_allclose(stats.recon_loss, recon, rtol=1e-15)
    np.testing.assert_allclose(stats.kl_penalty, kl, rtol=1e-15)
    np.testing.assert_allclose(stats.l2_term, l2, rtol=1e-15)


@pytest.mark.filterwarnings("ignore:overflow:RuntimeWarning")
def test_divergence_is_reported_with_the_last_good_epoch():
    X = axis_data(n_frames=64)
    # the decay update alone multiplies weights by -199 per step at this rate
    model = small_model(learning_rate=1e6, epochs=50)
    with pytest.raises(TrainingDivergedError) as exc:
        model.fit(X)
    assert "diverged" in str(exc.value)
    assert exc.value.last_good_epoch >= -1


def test_momentum_changes_the_trajectory():
    X = axis_data()
    plain = small_model(epochs=5).fit(X)
    heavy = small_model(epochs=5, momentum=0.9).fit(X)
    assert not np.array_equal(plain.weights_[0], heavy.weights_[0])


# ----------------------------------------------------------------------
# input validation


def test_fit_rejects_out_of_range_and_small_inputs():
    model = small_model()
    with pytest.raises(ValueError, match=r"\[0, 1\]"):
        model.fit(np.full((64, 17), 1.5))
    with pytest.raises(ValueError, match="batch_size"):
        model.fit(np.full((5, 17), 0.5))
    with pytest.raises(ValueError):
        model.fit(np.full((64, 17), np.nan))
    with pytest.raises(ValueError):
        model.fit(np.zeros((64, 17, 1)))


def test_not_fitted_errors():
    model = small_model()
    with pytest.raises(NotFittedError):
        model.reconstruct(np.full((2, 17), 0.5))
    with pytest.raises(NotFittedError):
        model.transform(np.full((2, 17), 0.5))


def test_inference_checks_the_component_count():
    X = axis_data(n_frames=64)
    model = small_model(epochs=1).fit(X)
    with pytest.raises(ValueError, match="17"):
        model.reconstruct(np.full((2, 16), 0.5))


# ----------------------------------------------------------------------
# inference surface


def test_reconstruction_shapes_and_range():
    X = axis_data()
    model = small_model().fit(X)
    out = model.reconstruct(X[:10])
    assert out.shape == (10, 17)
    assert out.min() > 0.0 and out.max() < 1.0  # sigmoid output layer
    np.testing.assert_array_equal(out, model.predict(X[:10]))
    errors = model.reconstruction_errors(X[:10])
    np.testing.assert_allclose(
        errors, np.mean((out - X[:10]) ** 2, axis=1), rtol=1e-15
    )


def test_transform_returns_the_latent_layer():
    X = axis_data()
    model = small_model().fit(X)
    latent = model.transform(X[:6])
    assert latent.shape == (6, model.latent_dim) == (6, 4)
    # the latent layer is a tanh layer
    assert latent.min() > -1.0 and latent.max() < 1.0


def test_default_topology_latent_width():
    assert SparseAutoencoder().latent_dim == 8


def test_from_parameters_round_trip():
    X = axis_data(n_frames=64)
    model = small_model(epochs=1).fit(X)
    rebuilt = SparseAutoencoder.from_parameters(
        [W.copy() for W in model.weights_],
        [b.copy() for b in model.biases_],
        train_mse=model.train_mse_,
        axis_tag="Y",
    )
    assert rebuilt.hidden_dims == SMALL_HIDDEN
    np.testing.assert_array_equal(
        rebuilt.reconstruct(X[:8]), model.reconstruct(X[:8])
    )
    with pytest.raises(ValueError):
        SparseAutoencoder.from_parameters(
            [np.zeros((8, 17))], [np.zeros(9)]  # bias width mismatch
        )


def test_module_level_kl_wrapper():
    assert kl_sparsity(0.05, np.full(4, 0.05)) == 0.0
