"""Dense auto-encoder numerics: forward pass, composite loss, analytic gradients.

The engine works on plain lists of weight matrices (out_dim x in_dim) and bias
vectors, with one activation name per layer, so the same code runs the
production 17-128-32-8-32-128-17 topology and the reduced topologies used by
finite-difference gradient checks.

The composite loss has three terms:

  recon = mean over batch rows and components of (output - input)^2
  kl    = sum over first-hidden units of
          rho * ln(rho / r_j) + (1 - rho) * ln((1 - rho) / (1 - r_j))
          where r_j is the batch-mean activation of unit j, clamped to
          [CLAMP_EPS, 1 - CLAMP_EPS] before the logarithms
  l2    = sum of squared weights (biases excluded)

  total = recon + sparsity_weight * kl + l2_weight * l2

The kl gradient flows into the first hidden layer through the batch mean, so
backward() treats that layer specially.  Everything is float64.
"""

from __future__ import annotations

import numpy as np

from .errors import NumericError

CLAMP_EPS = 1e-7

SIGMOID = "sigmoid"
TANH = "tanh"

# Index (among hidden activations) of the layer carrying the sparsity penalty.
SPARSITY_LAYER = 0


def activation_names(n_layers: int) -> list[str]:
    """Sigmoid on the first hidden and output layers, tanh everywhere else."""
    if n_layers < 2:
        raise ValueError("need at least two layers")
    return [SIGMOID] + [TANH] * (n_layers - 2) + [SIGMOID]


def apply_activation(name: str, z: np.ndarray) -> np.ndarray:
    if name == SIGMOID:
        return 1.0 / (1.0 + np.exp(-z))
    if name == TANH:
        return np.tanh(z)
    raise ValueError(f"unknown activation {name!r}")


def activation_derivative(name: str, a: np.ndarray) -> np.ndarray:
    """Derivative of the activation expressed through its output `a`."""
    if name == SIGMOID:
        return a * (1.0 - a)
    if name == TANH:
        return 1.0 - a * a
    raise ValueError(f"unknown activation {name!r}")


def init_parameters(
    dims: list[int], rng: np.random.Generator
) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Glorot-uniform weights, zero biases, for the layer chain `dims`.

    Each weight entry is drawn uniformly from +-sqrt(6 / (in_dim + out_dim)).
    Deterministic given the generator state.
    """
    weights, biases = [], []
    for d_in, d_out in zip(dims[:-1], dims[1:]):
        limit = np.sqrt(6.0 / (d_in + d_out))
        weights.append(rng.uniform(-limit, limit, size=(d_out, d_in)))
        biases.append(np.zeros(d_out))
    return weights, biases


def forward(
    weights: list[np.ndarray],
    biases: list[np.ndarray],
    activations: list[str],
    X: np.ndarray,
) -> list[np.ndarray]:
    """Run a batch through the network; returns per-layer activation arrays.

    `X` is (batch, in_dim).  The result list has one (batch, out_dim) array
    per layer; the last entry is the reconstruction.  Raises NumericError,
    naming the layer, if a non-finite value appears.
    """
    a = np.asarray(X, dtype=float)
    if a.ndim != 2:
        raise ValueError(f"expected a (batch, dim) input, got shape {a.shape}")
    outputs = []
    for i, (W, b, act) in enumerate(zip(weights, biases, activations)):
        a = apply_activation(act, a @ W.T + b)
        if not np.all(np.isfinite(a)):
            raise NumericError(f"non-finite activation in layer {i}")
        outputs.append(a)
    return outputs


def kl_sparsity(rho: float, rho_hat: np.ndarray) -> float:
    """Sparsity penalty: summed KL divergence of each unit's mean activation.

    `rho_hat` must already lie in [0, 1]; values are clamped away from the
    endpoints before the logarithms so sigmoid saturation cannot produce
    infinities.  Nonnegative, zero exactly when every unit sits at `rho`.
    """
    if not 0.0 < rho < 1.0:
        raise ValueError("rho must lie strictly inside (0, 1)")
    rho_hat = np.asarray(rho_hat, dtype=float)
    if np.any(rho_hat < 0.0) or np.any(rho_hat > 1.0):
        raise ValueError("mean activations must lie in [0, 1]")
    r = np.clip(rho_hat, CLAMP_EPS, 1.0 - CLAMP_EPS)
    return float(np.sum(rho * np.log(rho / r) + (1.0 - rho) * np.log((1.0 - rho) / (1.0 - r))))


def terms_from_outputs(
    weights: list[np.ndarray],
    X: np.ndarray,
    layer_out: list[np.ndarray],
    rho: float,
) -> tuple[float, float, float]:
    """Unweighted (recon, kl, l2) terms given an already-computed forward pass."""
    recon = float(np.mean((layer_out[-1] - X) ** 2))
    rho_hat = layer_out[SPARSITY_LAYER].mean(axis=0)
    kl = kl_sparsity(rho, rho_hat)
    l2 = float(sum(np.sum(W * W) for W in weights))
    return recon, kl, l2


def loss_terms(
    weights: list[np.ndarray],
    biases: list[np.ndarray],
    activations: list[str],
    X: np.ndarray,
    rho: float,
) -> tuple[float, float, float]:
    """Unweighted (recon, kl, l2) loss terms for one batch."""
    X = np.asarray(X, dtype=float)
    if X.size == 0:
        raise ValueError("empty batch")
    layer_out = forward(weights, biases, activations, X)
    return terms_from_outputs(weights, X, layer_out, rho)


def backward(
    weights: list[np.ndarray],
    biases: list[np.ndarray],
    activations: list[str],
    X: np.ndarray,
    layer_out: list[np.ndarray],
    rho: float,
    sparsity_weight: float,
    l2_weight: float,
) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Analytic gradients of the composite loss for one batch.

    `layer_out` is the list returned by forward() on the same inputs.
    Returns per-layer (weight_grads, bias_grads) matching the parameter
    shapes.  The sparsity term contributes through the batch mean of the
    first hidden layer; where that mean falls in the clamped region its
    gradient is zero, consistent with the clamped loss.
    """
    X = np.asarray(X, dtype=float)
    n_batch, n_in = X.shape
    n_layers = len(weights)

    grad_w = [None] * n_layers
    grad_b = [None] * n_layers

    # d total / d output, from the reconstruction term
    g = 2.0 * (layer_out[-1] - X) / (n_batch * n_in)

    for layer in range(n_layers - 1, -1, -1):
        a_out = layer_out[layer]
        if layer == SPARSITY_LAYER and sparsity_weight != 0.0:
            rho_hat = a_out.mean(axis=0)
            active = (rho_hat > CLAMP_EPS) & (rho_hat < 1.0 - CLAMP_EPS)
            r = np.clip(rho_hat, CLAMP_EPS, 1.0 - CLAMP_EPS)
            dkl = np.where(active, -rho / r + (1.0 - rho) / (1.0 - r), 0.0)
            g = g + (sparsity_weight / n_batch) * dkl
        delta = g * activation_derivative(activations[layer], a_out)
        a_prev = X if layer == 0 else layer_out[layer - 1]
        grad_w[layer] = delta.T @ a_prev + 2.0 * l2_weight * weights[layer]
        grad_b[layer] = delta.sum(axis=0)
        if layer > 0:
            g = delta @ weights[layer]

    return grad_w, grad_b
