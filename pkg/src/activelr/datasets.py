"""Deterministic synthetic datasets with CSV round-trip.

Features are standardized to zero mean and unit variance column-wise.
Regression targets are real, classification labels are integer 0/1.
"""

from dataclasses import dataclass

import numpy as np

LINEAR_REGRESSION = "linear_regression"
TWO_CLUSTERS = "two_clusters"
TWO_SPIRALS = "two_spirals"

KINDS = (LINEAR_REGRESSION, TWO_CLUSTERS, TWO_SPIRALS)


@dataclass
class Dataset:
    kind: str
    X: np.ndarray
    y: np.ndarray
    w_true: np.ndarray = None

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def n_features(self):
        return self.X.shape[1]

    @property
    def is_classification(self):
        return self.kind in (TWO_CLUSTERS, TWO_SPIRALS)


def _standardize(X):
    mu = X.mean(axis=0)
    sd = X.std(axis=0)
    sd[sd == 0] = 1.0
    return (X - mu) / sd


def make_synthetic_dataset(kind, n, noise=0.1, seed=0, n_features=2) -> Dataset:
    """Build one of the three generator families; bit-identical per seed."""
    if kind not in KINDS:
        raise ValueError(f"unknown dataset kind {kind!r}; valid: {KINDS}")
    if n < 8:
        raise ValueError(f"n must be >= 8, got {n}")
    rng = np.random.default_rng(seed)

    if kind == LINEAR_REGRESSION:
        X = _standardize(rng.standard_normal((n, n_features)))
        w = rng.standard_normal(n_features)
        y = X @ w + noise * rng.standard_normal(n)
        return Dataset(kind, X, y, w_true=w)

    if kind == TWO_CLUSTERS:
        # centers 4 apart along the first axis; `noise` is the cluster std
        labels = np.repeat([0, 1], [n - n // 2, n // 2])
        centers = np.zeros((n, 2))
        centers[labels == 0, 0] = -2.0
        centers[labels == 1, 0] = 2.0
        X = _standardize(centers + noise * rng.standard_normal((n, 2)))
        return Dataset(kind, X, labels.astype(np.int64))

    # two interleaved spirals in the plane
    half = n // 2
    counts = (n - half, half)
    rows, labels = [], []
    for cls, m in enumerate(counts):
        t = np.sqrt(rng.uniform(0.25, 1.0, size=m)) * 3.0 * np.pi
        sign = 1.0 if cls == 0 else -1.0
        x = sign * t * np.cos(t) + noise * rng.standard_normal(m)
        y_ = sign * t * np.sin(t) + noise * rng.standard_normal(m)
        rows.append(np.column_stack([x, y_]))
        labels.append(np.full(m, cls))
    X = _standardize(np.vstack(rows))
    return Dataset(kind, X, np.concatenate(labels).astype(np.int64))


def to_csv(dataset: Dataset, path) -> None:
    """Header row, one sample per line, lossless float text."""
    cols = [f"x{j}" for j in range(dataset.n_features)] + ["y"]
    with open(path, "w") as fh:
        fh.write(f"# kind: {dataset.kind}\n")
        fh.write(",".join(cols) + "\n")
        classify = dataset.is_classification
        for i in range(dataset.n):
            feats = ",".join("%.17g" % v for v in dataset.X[i])
            target = str(int(dataset.y[i])) if classify else "%.17g" % dataset.y[i]
            fh.write(f"{feats},{target}\n")


def from_csv(path) -> Dataset:
    with open(path) as fh:
        header = fh.readline().strip()
        if not header.startswith("# kind:"):
            raise ValueError(f"{path}: missing '# kind:' header line")
        kind = header.split(":", 1)[1].strip()
        fh.readline()  # column names
        rows = [line.strip().split(",") for line in fh if line.strip()]
    data = np.array(rows, dtype=np.float64)
    X, y = data[:, :-1], data[:, -1]
    if kind in (TWO_CLUSTERS, TWO_SPIRALS):
        y = y.astype(np.int64)
    return Dataset(kind, X, y)


def lda_train_accuracy(dataset: Dataset) -> float:
    """Closed-form linear-discriminant accuracy on the training rows.

    Pooled-covariance LDA: w = Sigma^-1 (mu1 - mu0), threshold at the
    midpoint of the projected class means.  Serves as an independent
    linear-separability oracle.
    """
    if not dataset.is_classification:
        raise ValueError("LDA oracle needs a classification dataset")
    X, y = dataset.X, dataset.y
    mu0, mu1 = X[y == 0].mean(axis=0), X[y == 1].mean(axis=0)
    centered = np.vstack([X[y == 0] - mu0, X[y == 1] - mu1])
    sigma = centered.T @ centered / len(X) + 1e-9 * np.eye(X.shape[1])
    w = np.linalg.solve(sigma, mu1 - mu0)
    scores = X @ w
    threshold = 0.5 * (mu0 @ w + mu1 @ w)
    pred = (scores > threshold).astype(np.int64)
    return float(np.mean(pred == y))
