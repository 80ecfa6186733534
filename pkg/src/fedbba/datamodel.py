"""Synthetic vision data and the small classifier clients train locally.

Each class has a fixed binary block template (parity pattern over pixel
index); samples are the template plus Gaussian noise, clamped to [0, 1].
The classifier is a one-hidden-layer perceptron (inputs -> 32 tanh units
-> softmax over classes) trained with mini-batch SGD on cross-entropy.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace

import numpy as np

from .errors import InvalidConfig, InvalidInput
from .numerics import RngStream

HIDDEN_UNITS = 32
_TEMPLATE_LO = 0.05
_TEMPLATE_HI = 0.95


@dataclass
class ImageDataset:
    images: np.ndarray  # n x (h*w), intensities in [0, 1]
    labels: np.ndarray  # n ints in [0, n_classes)
    height: int
    width: int
    n_classes: int

    def __post_init__(self):
        self.images = np.asarray(self.images, dtype=float)
        self.labels = np.asarray(self.labels, dtype=int)
        if self.images.ndim != 2 or self.images.shape[1] != self.height * self.width:
            raise InvalidInput("ImageDataset: image array shape mismatch")
        if self.labels.shape != (self.images.shape[0],):
            raise InvalidInput("ImageDataset: labels misaligned with images")
        if self.labels.size and (
            self.labels.min() < 0 or self.labels.max() >= self.n_classes
        ):
            raise InvalidInput("ImageDataset: label outside [0, n_classes)")

    def __len__(self) -> int:
        return self.images.shape[0]


@dataclass(frozen=True)
class MlpShape:
    n_inputs: int
    n_hidden: int
    n_classes: int

    @property
    def n_params(self) -> int:
        return (
            self.n_inputs * self.n_hidden
            + self.n_hidden
            + self.n_hidden * self.n_classes
            + self.n_classes
        )


@dataclass
class ModelParams:
    flat: np.ndarray
    shape: MlpShape

    def __post_init__(self):
        self.flat = np.asarray(self.flat, dtype=float)
        if self.flat.shape != (self.shape.n_params,):
            raise InvalidInput("ModelParams: flat vector length mismatch")

    def copy(self) -> "ModelParams":
        return ModelParams(flat=self.flat.copy(), shape=self.shape)


@dataclass
class TrainConfig:
    learning_rate: float = 0.3
    epochs: int = 2
    batch_size: int = 32
    rng: RngStream | None = None

    def __post_init__(self):
        if self.learning_rate < 0:
            raise InvalidConfig("TrainConfig: learning_rate must be >= 0")
        if self.epochs < 1 or self.batch_size < 1:
            raise InvalidConfig("TrainConfig: epochs and batch_size must be >= 1")

    def with_rng(self, rng: RngStream) -> "TrainConfig":
        return replace(self, rng=rng)


def unflatten(params: ModelParams):
    """Split the flat vector into (W1, b1, W2, b2) views."""
    s = params.shape
    v = params.flat
    i = 0
    W1 = v[i : i + s.n_inputs * s.n_hidden].reshape(s.n_inputs, s.n_hidden)
    i += s.n_inputs * s.n_hidden
    b1 = v[i : i + s.n_hidden]
    i += s.n_hidden
    W2 = v[i : i + s.n_hidden * s.n_classes].reshape(s.n_hidden, s.n_classes)
    i += s.n_hidden * s.n_classes
    b2 = v[i : i + s.n_classes]
    return W1, b1, W2, b2


def flatten(W1, b1, W2, b2, shape: MlpShape) -> ModelParams:
    flat = np.concatenate([W1.ravel(), b1.ravel(), W2.ravel(), b2.ravel()])
    return ModelParams(flat=flat, shape=shape)


def init_params(shape: MlpShape, rng: RngStream) -> ModelParams:
    W1 = rng.gen.standard_normal((shape.n_inputs, shape.n_hidden)) / np.sqrt(
        shape.n_inputs
    )
    W2 = rng.gen.standard_normal((shape.n_hidden, shape.n_classes)) / np.sqrt(
        shape.n_hidden
    )
    return flatten(W1, np.zeros(shape.n_hidden), W2, np.zeros(shape.n_classes), shape)


def class_templates(n_classes: int, height: int, width: int) -> np.ndarray:
    """Fixed per-class block patterns, pairwise distinct by construction."""
    if n_classes < 2:
        raise InvalidConfig("class_templates: need at least 2 classes")
    pixels = height * width
    idx = np.arange(pixels) % 64
    templates = np.empty((n_classes, pixels))
    for c in range(n_classes):
        parity = np.array([bin((c + 1) & int(i)).count("1") % 2 for i in idx])
        templates[c] = np.where(parity == 0, _TEMPLATE_HI, _TEMPLATE_LO)
    for a in range(n_classes):
        for b in range(a + 1, n_classes):
            if np.array_equal(templates[a], templates[b]):
                raise InvalidConfig(
                    f"class_templates: {height}x{width} too small to separate "
                    f"{n_classes} classes"
                )
    return templates


def generate_dataset(
    n_classes: int,
    per_class: int,
    height: int,
    width: int,
    noise_sigma: float,
    rng: RngStream,
) -> ImageDataset:
    """Noisy template images, `per_class` samples for each class in order."""
    if n_classes < 2:
        raise InvalidConfig("generate_dataset: need at least 2 classes")
    if per_class < 1:
        raise InvalidConfig("generate_dataset: per_class must be >= 1")
    templates = class_templates(n_classes, height, width)
    rows = []
    labels = []
    for c in range(n_classes):
        noise = rng.gen.normal(scale=noise_sigma, size=(per_class, height * width))
        rows.append(np.clip(templates[c] + noise, 0.0, 1.0))
        labels.extend([c] * per_class)
    return ImageDataset(
        images=np.vstack(rows),
        labels=np.array(labels),
        height=height,
        width=width,
        n_classes=n_classes,
    )


def partition_noniid(
    ds: ImageDataset,
    n_clients: int,
    classes_per_client_range: tuple[int, int],
    samples_per_class_range: tuple[int, int],
    rng: RngStream,
) -> list[ImageDataset]:
    """Class-skewed shards: each client draws a class subset, then samples
    with replacement from those classes' pools."""
    c_lo, c_hi = classes_per_client_range
    s_lo, s_hi = samples_per_class_range
    if n_clients < 1:
        raise InvalidConfig("partition_noniid: n_clients must be >= 1")
    if not (1 <= c_lo <= c_hi <= ds.n_classes):
        raise InvalidConfig(
            f"partition_noniid: classes_per_client_range {classes_per_client_range} "
            f"infeasible for {ds.n_classes} classes"
        )
    if not (1 <= s_lo <= s_hi):
        raise InvalidConfig(
            f"partition_noniid: samples_per_class_range {samples_per_class_range} invalid"
        )
    pools = [np.flatnonzero(ds.labels == c) for c in range(ds.n_classes)]
    shards = []
    for _ in range(n_clients):
        k = int(rng.gen.integers(c_lo, c_hi + 1))
        classes = np.sort(rng.gen.choice(ds.n_classes, size=k, replace=False))
        taken = []
        for c in classes:
            if pools[c].size == 0:
                raise InvalidConfig(f"partition_noniid: class {c} has no samples")
            m = int(rng.gen.integers(s_lo, s_hi + 1))
            taken.append(rng.gen.choice(pools[c], size=m, replace=True))
        idx = np.concatenate(taken)
        shards.append(
            ImageDataset(
                images=ds.images[idx].copy(),
                labels=ds.labels[idx].copy(),
                height=ds.height,
                width=ds.width,
                n_classes=ds.n_classes,
            )
        )
    return shards


def _forward(flat: np.ndarray, shape: MlpShape, X: np.ndarray):
    params = ModelParams(flat=flat, shape=shape)
    W1, b1, W2, b2 = unflatten(params)
    H = np.tanh(X @ W1 + b1)
    return H, H @ W2 + b2


def _softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def loss_and_grad(flat: np.ndarray, shape: MlpShape, X: np.ndarray, y: np.ndarray):
    """Mean cross-entropy over the batch and its gradient in flat layout."""
    W1, b1, W2, b2 = unflatten(ModelParams(flat=flat, shape=shape))
    H = np.tanh(X @ W1 + b1)
    P = _softmax(H @ W2 + b2)
    n = X.shape[0]
    loss = float(-np.mean(np.log(P[np.arange(n), y] + 1e-300)))
    dlogits = P.copy()
    dlogits[np.arange(n), y] -= 1.0
    dlogits /= n
    dW2 = H.T @ dlogits
    db2 = dlogits.sum(axis=0)
    dpre = (dlogits @ W2.T) * (1.0 - H * H)
    dW1 = X.T @ dpre
    db1 = dpre.sum(axis=0)
    grad = np.concatenate([dW1.ravel(), db1.ravel(), dW2.ravel(), db2.ravel()])
    return loss, grad


def train_local(start: ModelParams, ds: ImageDataset, cfg: TrainConfig) -> ModelParams:
    """Mini-batch SGD from `start`; the input parameters are not mutated."""
    if len(ds) == 0:
        raise InvalidInput("train_local: empty dataset")
    if cfg.rng is None:
        raise InvalidConfig("train_local: TrainConfig.rng must be set")
    flat = start.flat.copy()
    n = len(ds)
    for _ in range(cfg.epochs):
        order = cfg.rng.gen.permutation(n)
        for lo in range(0, n, cfg.batch_size):
            batch = order[lo : lo + cfg.batch_size]
            _, grad = loss_and_grad(flat, start.shape, ds.images[batch], ds.labels[batch])
            flat -= cfg.learning_rate * grad
    return ModelParams(flat=flat, shape=start.shape)


def predict(model: ModelParams, images: np.ndarray) -> np.ndarray:
    _, logits = _forward(model.flat, model.shape, images)
    return np.argmax(logits, axis=1)


def evaluate(model: ModelParams, ds: ImageDataset) -> float:
    """Fraction of argmax-correct predictions."""
    if len(ds) == 0:
        raise InvalidInput("evaluate: empty dataset")
    return float(np.mean(predict(model, ds.images) == ds.labels))


def save_csv(ds: ImageDataset, path) -> None:
    """One row per image: label, then h*w intensities."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for label, row in zip(ds.labels, ds.images):
            writer.writerow([int(label)] + [repr(float(v)) for v in row])


def load_csv(path, height: int, width: int, n_classes: int) -> ImageDataset:
    labels = []
    rows = []
    with open(path, newline="") as fh:
        for record in csv.reader(fh):
            if not record:
                continue
            labels.append(int(record[0]))
            rows.append([float(v) for v in record[1:]])
    return ImageDataset(
        images=np.array(rows, dtype=float),
        labels=np.array(labels, dtype=int),
        height=height,
        width=width,
        n_classes=n_classes,
    )
