"""A small fully-connected network with manual reverse-mode gradients.

Parameters live in one flat vector with a stable layout (W then b, layer
by layer), so the optimizers in :mod:`activelr.backbones` see the network
as just another objective.  Per-layer gradient L1 norms are exposed for
phase analysis of training runs.
"""

from dataclasses import dataclass

import numpy as np

from .datasets import Dataset, TWO_CLUSTERS, make_synthetic_dataset
from .objectives import Objective

TANH = "tanh"
RELU = "relu"
MSE = "mse"
CROSS_ENTROPY = "cross_entropy"


@dataclass
class MlpSpec:
    layer_sizes: list
    activation: str = TANH
    seed: int = 0

    def __post_init__(self):
        if len(self.layer_sizes) < 2:
            raise ValueError("need at least input and output layer sizes")
        if any(s < 1 for s in self.layer_sizes):
            raise ValueError(f"layer sizes must be positive: {self.layer_sizes}")
        if self.activation not in (TANH, RELU):
            raise ValueError(f"unknown activation {self.activation!r}")


class Mlp:
    """Flat-vector multilayer perceptron (linear output layer)."""

    def __init__(self, spec: MlpSpec):
        self.spec = spec
        sizes = spec.layer_sizes
        self.shapes = [(sizes[i], sizes[i + 1]) for i in range(len(sizes) - 1)]
        self.n_layers = len(self.shapes)
        self.n_params = sum(fi * fo + fo for fi, fo in self.shapes)

    def init_params(self) -> np.ndarray:
        """Uniform +-sqrt(6/(fan_in+fan_out)) weights, zero biases."""
        rng = np.random.default_rng(self.spec.seed)
        chunks = []
        for fi, fo in self.shapes:
            limit = np.sqrt(6.0 / (fi + fo))
            chunks.append(rng.uniform(-limit, limit, size=fi * fo))
            chunks.append(np.zeros(fo))
        return np.concatenate(chunks)

    def unpack(self, theta):
        weights, biases, pos = [], [], 0
        for fi, fo in self.shapes:
            weights.append(theta[pos:pos + fi * fo].reshape(fi, fo))
            pos += fi * fo
            biases.append(theta[pos:pos + fo])
            pos += fo
        return weights, biases

    def _activate(self, z):
        return np.tanh(z) if self.spec.activation == TANH else np.maximum(z, 0.0)

    def forward(self, theta, X):
        """Returns the linear outputs plus cached activations per layer."""
        weights, biases = self.unpack(theta)
        acts = [np.asarray(X, dtype=float)]
        pre = []
        h = acts[0]
        for l in range(self.n_layers):
            z = h @ weights[l] + biases[l]
            pre.append(z)
            h = self._activate(z) if l < self.n_layers - 1 else z
            acts.append(h)
        return acts, pre

    def loss_and_grad(self, theta, X, targets, loss):
        """Mean loss over the batch and its flat gradient, via backprop.

        Also returns the per-layer gradient L1 norms (weights + bias of
        each layer together).
        """
        weights, _ = self.unpack(theta)
        acts, pre = self.forward(theta, X)
        out = acts[-1]
        n = len(X)

        if loss == MSE:
            t = np.asarray(targets, dtype=float).reshape(out.shape)
            value = float(np.mean(0.5 * np.sum((out - t) ** 2, axis=1)))
            delta = (out - t) / n
        elif loss == CROSS_ENTROPY:
            labels = np.asarray(targets, dtype=np.int64)
            shifted = out - out.max(axis=1, keepdims=True)
            logsumexp = np.log(np.sum(np.exp(shifted), axis=1))
            value = float(np.mean(logsumexp - shifted[np.arange(n), labels]))
            probs = np.exp(shifted) / np.exp(logsumexp)[:, None]
            probs[np.arange(n), labels] -= 1.0
            delta = probs / n
        else:
            raise ValueError(f"unknown loss {loss!r}")

        grads_w = [None] * self.n_layers
        grads_b = [None] * self.n_layers
        for l in range(self.n_layers - 1, -1, -1):
            grads_w[l] = acts[l].T @ delta
            grads_b[l] = delta.sum(axis=0)
            if l > 0:
                delta = delta @ weights[l].T
                if self.spec.activation == TANH:
                    delta = delta * (1.0 - np.tanh(pre[l - 1]) ** 2)
                else:
                    delta = delta * (pre[l - 1] > 0)

        flat = np.concatenate([np.concatenate([gw.ravel(), gb])
                               for gw, gb in zip(grads_w, grads_b)])
        layer_l1 = [float(np.abs(gw).sum() + np.abs(gb).sum())
                    for gw, gb in zip(grads_w, grads_b)]
        return value, flat, layer_l1

    def predict_labels(self, theta, X):
        acts, _ = self.forward(theta, X)
        out = acts[-1]
        if out.shape[1] == 1:
            return (out[:, 0] > 0.5).astype(np.int64)
        return np.argmax(out, axis=1)


class MlpObjective(Objective):
    """Objective view of an MLP on a dataset, with mini-batch access."""

    def __init__(self, mlp: Mlp, dataset: Dataset, loss: str):
        self.mlp = mlp
        self.dataset = dataset
        self.loss = loss

        def f(theta):
            value, _, _ = mlp.loss_and_grad(theta, dataset.X, dataset.y, loss)
            return value

        def grad(theta):
            _, g, _ = mlp.loss_and_grad(theta, dataset.X, dataset.y, loss)
            return g

        super().__init__(name="mlp", dim=mlp.n_params, f=f, grad=grad)

    @property
    def n_samples(self):
        return self.dataset.n

    def init_params(self):
        return self.mlp.init_params()

    def batch_loss_grad(self, theta, indices):
        """Loss, flat gradient, and per-layer gradient L1 norms on a batch."""
        X = self.dataset.X[indices]
        y = self.dataset.y[indices]
        return self.mlp.loss_and_grad(theta, X, y, self.loss)

    def accuracy(self, theta):
        if not self.dataset.is_classification:
            return None
        pred = self.mlp.predict_labels(theta, self.dataset.X)
        return float(np.mean(pred == self.dataset.y))


def mlp_objective(spec: MlpSpec, dataset: Dataset, loss: str) -> MlpObjective:
    """Wire a network spec to a dataset, validating shape compatibility."""
    mlp = Mlp(spec)
    if spec.layer_sizes[0] != dataset.n_features:
        raise ValueError(
            f"input size {spec.layer_sizes[0]} != dataset features {dataset.n_features}"
        )
    out = spec.layer_sizes[-1]
    if loss == CROSS_ENTROPY:
        if not dataset.is_classification:
            raise ValueError("cross-entropy needs integer class labels")
        n_classes = int(dataset.y.max()) + 1
        if out < n_classes:
            raise ValueError(f"output size {out} < number of classes {n_classes}")
    elif loss == MSE:
        width = 1 if dataset.y.ndim == 1 else dataset.y.shape[1]
        if out != width:
            raise ValueError(f"output size {out} != target width {width}")
    else:
        raise ValueError(f"unknown loss {loss!r}")
    return MlpObjective(mlp, dataset, loss)


def two_clusters_task(seed, n=200, noise=0.9, hidden=8) -> MlpObjective:
    """Binary classification of two overlapping Gaussian clusters.

    The dataset stays fixed across seeds (its own seed is 0) while the
    network init varies, so multi-seed statistics measure optimizer
    behavior, not data luck.  ``noise`` sets cluster overlap: at 0.9 the
    classes are mostly but not perfectly separable.
    """
    dataset = make_synthetic_dataset(TWO_CLUSTERS, n=n, noise=noise, seed=0)
    spec = MlpSpec(layer_sizes=[dataset.n_features, hidden, 2],
                   activation=TANH, seed=seed)
    return mlp_objective(spec, dataset, CROSS_ENTROPY)
