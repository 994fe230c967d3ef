"""Sparse auto-encoder estimator trained by mini-batch gradient descent.

One estimator owns one axis of the posture representation.  It reconstructs
its input through a narrow latent layer; the training objective combines the
reconstruction error with a KL sparsity penalty on the first hidden layer and
an L2 penalty on the weights.  After fitting, the mean reconstruction error
over the training set (`train_mse_`, penalties excluded) is kept because the
score fusion step weights each axis by it.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from . import network
from .errors import NumericError, TrainingDivergedError

logger = logging.getLogger(__name__)

DEFAULT_HIDDEN_DIMS = (128, 32, 8, 32, 128)


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters of one training run.

    `rho` is the sparsity target for the first hidden layer's batch-mean
    activations; it must lie strictly inside (0, 1) so both KL logarithms
    are defined.
    """

    rho: float = 0.05
    sparsity_weight: float = 0.1
    l2_weight: float = 1e-4
    learning_rate: float = 1e-3
    batch_size: int = 64
    epochs: int = 200
    momentum: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.rho < 1.0:
            raise ValueError("rho must lie strictly inside (0, 1)")
        if self.sparsity_weight < 0 or self.l2_weight < 0:
            raise ValueError("penalty weights must be nonnegative")
        if self.learning_rate <= 0:
            raise ValueError("learning rate must be positive")
        if self.batch_size < 1 or self.epochs < 0:
            raise ValueError("batch_size must be >= 1 and epochs >= 0")
        if not 0.0 <= self.momentum < 1.0:
            raise ValueError("momentum must lie in [0, 1)")
        if self.seed < 0:
            raise ValueError("seed must be a nonnegative integer")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class BatchStats:
    """Loss breakdown of one mini-batch step.

    total_loss is recon_loss + sparsity_weight * kl_penalty
    + l2_weight * l2_term, computed exactly that way.
    """

    epoch: int
    batch: int
    recon_loss: float
    kl_penalty: float
    l2_term: float
    total_loss: float


def kl_sparsity(rho: float, rho_hat: np.ndarray) -> float:
    """Summed KL divergence between `rho` and each unit's mean activation."""
    return network.kl_sparsity(rho, rho_hat)


class SparseAutoencoder(BaseEstimator):
    """Fully connected auto-encoder with a KL sparsity penalty.

    Parameters
    ----------
    hidden_dims : tuple of int
        Unit counts of the hidden layers; the input/output width is taken
        from the data at fit time.  The middle entry is the latent width.
        Activations are derived from the depth: sigmoid on the first hidden
        and output layers (the first so mean activations stay in (0, 1) for
        the sparsity penalty, the last so outputs match [0, 1] inputs),
        tanh on the rest.
    rho, sparsity_weight, l2_weight : float
        Sparsity target and the two penalty coefficients.
    learning_rate, batch_size, epochs, momentum : training loop settings.
        Plain mini-batch SGD; momentum > 0 enables classical momentum.
    seed : int
        Seeds initialization and batch shuffling; fitting is deterministic
        given (data, params, seed).
    axis_tag : str or None
        Label ("X"/"Y"/"Z") recorded in model files, no numeric effect.

    Attributes (after fit)
    ----------------------
    weights_, biases_ : per-layer parameter arrays (out_dim x in_dim rows).
    dims_, activations_ : realized layer chain and activation names.
    train_mse_ : reconstruction MSE over the training set, penalties excluded.
    history_ : list of BatchStats, one per mini-batch step.
    """

    def __init__(
        self,
        hidden_dims: tuple[int, ...] = DEFAULT_HIDDEN_DIMS,
        rho: float = 0.05,
        sparsity_weight: float = 0.1,
        l2_weight: float = 1e-4,
        learning_rate: float = 1e-3,
        batch_size: int = 64,
        epochs: int = 200,
        momentum: float = 0.0,
        seed: int = 0,
        axis_tag: str | None = None,
    ):
        self.hidden_dims = hidden_dims
        self.rho = rho
        self.sparsity_weight = sparsity_weight
        self.l2_weight = l2_weight
        self.learning_rate = learning_rate
        self.batch_size = batch_size
        self.epochs = epochs
        self.momentum = momentum
        self.seed = seed
        self.axis_tag = axis_tag

    # ------------------------------------------------------------------
    # construction helpers

    @classmethod
    def from_config(
        cls,
        config: TrainConfig,
        hidden_dims: tuple[int, ...] = DEFAULT_HIDDEN_DIMS,
        axis_tag: str | None = None,
    ) -> "SparseAutoencoder":
        return cls(hidden_dims=hidden_dims, axis_tag=axis_tag, **config.to_dict())

    @classmethod
    def from_parameters(
        cls,
        weights: list[np.ndarray],
        biases: list[np.ndarray],
        train_mse: float | None = None,
        **params,
    ) -> "SparseAutoencoder":
        """Build a ready-to-use estimator from explicit layer parameters.

        Used by model deserialization and by tests that need handcrafted
        weights.  `params` are forwarded to the constructor; hidden_dims is
        inferred from the weight shapes when not given.
        """
        weights = [np.asarray(W, dtype=float) for W in weights]
        biases = [np.asarray(b, dtype=float) for b in biases]
        dims = [weights[0].shape[1]] + [W.shape[0] for W in weights]
        params.setdefault("hidden_dims", tuple(dims[1:-1]))
        est = cls(**params)
        est._install(weights, biases, dims)
        est.train_mse_ = train_mse
        est.history_ = []
        return est

    @property
    def train_config(self) -> TrainConfig:
        return TrainConfig(
            rho=self.rho,
            sparsity_weight=self.sparsity_weight,
            l2_weight=self.l2_weight,
            learning_rate=self.learning_rate,
            batch_size=self.batch_size,
            epochs=self.epochs,
            momentum=self.momentum,
            seed=self.seed,
        )

    @property
    def latent_dim(self) -> int:
        return self.hidden_dims[len(self.hidden_dims) // 2]

    def _install(self, weights, biases, dims):
        for W, b, (d_in, d_out) in zip(weights, biases, zip(dims[:-1], dims[1:])):
            if W.shape != (d_out, d_in) or b.shape != (d_out,):
                raise ValueError("parameter shapes do not match the topology")
            if not (np.all(np.isfinite(W)) and np.all(np.isfinite(b))):
                raise ValueError("parameters must be finite")
        self.weights_ = weights
        self.biases_ = biases
        self.dims_ = list(dims)
        self.activations_ = network.activation_names(len(weights))
        self.n_features_in_ = dims[0]

    # ------------------------------------------------------------------
    # training

    def fit(self, X, y=None) -> "SparseAutoencoder":
        """Train on normal-gait axis vectors.

        X is (n_samples, n_components) with every value in [0, 1], and
        n_samples must reach batch_size.  Raises TrainingDivergedError if
        the loss leaves the finite range.
        """
        cfg = self.train_config  # validates hyperparameters
        X = self._check_X(X, for_fit=True)
        n, d = X.shape
        dims = [d, *self.hidden_dims, d]
        acts = network.activation_names(len(dims) - 1)

        rng = np.random.default_rng(cfg.seed)
        weights, biases = network.init_parameters(dims, rng)
        vel_w = [np.zeros_like(W) for W in weights]
        vel_b = [np.zeros_like(b) for b in biases]

        history: list[BatchStats] = []
        last_good_epoch = -1
        for epoch in range(cfg.epochs):
            order = rng.permutation(n)
            for batch_no, start in enumerate(range(0, n, cfg.batch_size)):
                xb = X[order[start : start + cfg.batch_size]]
                try:
                    layer_out = network.forward(weights, biases, acts, xb)
                except NumericError as exc:
                    raise TrainingDivergedError(
                        f"training diverged at epoch {epoch}: {exc}", last_good_epoch
                    ) from exc
                recon, kl, l2 = network.terms_from_outputs(weights, xb, layer_out, cfg.rho)
                total = recon + cfg.sparsity_weight * kl + cfg.l2_weight * l2
                if not np.isfinite(total):
                    raise TrainingDivergedError(
                        f"training diverged at epoch {epoch}: non-finite loss",
                        last_good_epoch,
                    )
                history.append(BatchStats(epoch, batch_no, recon, kl, l2, total))
                grad_w, grad_b = network.backward(
                    weights, biases, acts, xb, layer_out,
                    cfg.rho, cfg.sparsity_weight, cfg.l2_weight,
                )
                for i in range(len(weights)):
                    vel_w[i] = cfg.momentum * vel_w[i] - cfg.learning_rate * grad_w[i]
                    vel_b[i] = cfg.momentum * vel_b[i] - cfg.learning_rate * grad_b[i]
                    weights[i] += vel_w[i]
                    biases[i] += vel_b[i]
            last_good_epoch = epoch
            if (epoch + 1) % 50 == 0 or epoch == cfg.epochs - 1:
                recent = [s.total_loss for s in history if s.epoch == epoch]
                logger.debug(
                    "axis %s epoch %d mean total loss %.6g",
                    self.axis_tag, epoch, float(np.mean(recent)),
                )

        self._install(weights, biases, dims)
        self.history_ = history
        self.train_mse_ = float(np.mean(self.reconstruction_errors(X)))
        return self

    # ------------------------------------------------------------------
    # inference

    def forward_activations(self, X) -> list[np.ndarray]:
        """Per-layer activations for a batch; last entry is the reconstruction."""
        self._require_fitted()
        X = self._check_X(X)
        return network.forward(self.weights_, self.biases_, self.activations_, X)

    def reconstruct(self, X) -> np.ndarray:
        return self.forward_activations(X)[-1]

    def predict(self, X) -> np.ndarray:
        """Alias of reconstruct, for estimator-API consumers."""
        return self.reconstruct(X)

    def transform(self, X) -> np.ndarray:
        """Latent codes: the middle layer's activations."""
        latent_layer = len(self.hidden_dims) // 2
        return self.forward_activations(X)[latent_layer]

    def reconstruction_errors(self, X) -> np.ndarray:
        """Per-sample reconstruction MSE, averaged over components."""
        X = np.asarray(X, dtype=float)
        out = self.reconstruct(X)
        return np.mean((out - X) ** 2, axis=1)

    def evaluate_loss(self, X, epoch: int = 0, batch: int = 0) -> BatchStats:
        """Composite loss of one batch at the current parameters."""
        self._require_fitted()
        X = self._check_X(X)
        recon, kl, l2 = network.loss_terms(
            self.weights_, self.biases_, self.activations_, X, self.rho
        )
        total = recon + self.sparsity_weight * kl + self.l2_weight * l2
        return BatchStats(epoch, batch, recon, kl, l2, total)

    # ------------------------------------------------------------------

    def _require_fitted(self):
        if not hasattr(self, "weights_"):
            raise NotFittedError(
                "this SparseAutoencoder instance is not fitted yet"
            )

    def _check_X(self, X, for_fit: bool = False) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim != 2:
            raise ValueError(f"expected a 2D (n_samples, n_components) array, got shape {X.shape}")
        if X.shape[0] == 0:
            raise ValueError("empty batch")
        if not np.all(np.isfinite(X)):
            raise ValueError("input contains NaN or infinity")
        if X.min() < 0.0 or X.max() > 1.0:
            raise ValueError("input components must lie in [0, 1]")
        if for_fit:
            if X.shape[0] < self.batch_size:
                raise ValueError(
                    f"need at least batch_size={self.batch_size} samples, got {X.shape[0]}"
                )
        elif hasattr(self, "n_features_in_") and X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"expected {self.n_features_in_} components, got {X.shape[1]}"
            )
        return X
