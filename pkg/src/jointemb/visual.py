"""Feed-forward regressor mapping image features into the text space.

The network (input F, rectified hidden layers, identity output of size
d) is trained with mini-batch gradient descent plus momentum to minimize
a componentwise sigmoid cross-entropy between squashed targets and
squashed predictions. Parameters live in float64 for gradient fidelity
and are persisted in float32.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import UnembeddableQueryError, ValidationError
from .persist import read_artifact, write_artifact
from .text.base import embed_document

KIND = "visual_embedder"


@dataclass
class TrainConfig:
    """Optimization schedule; the stated defaults are the reference values.

    The learning rate is multiplied by decay_factor every decay_interval
    steps; desk-scale runs shrink decay_interval (and usually raise the
    rate) rather than run hundreds of thousands of iterations.
    """

    learning_rate: float = 0.001
    decay_factor: float = 0.1
    decay_interval: int = 100_000
    momentum: float = 0.9
    batch_size: int = 120
    iterations: int = 10_000
    hidden: tuple[int, ...] = (256,)
    seed: int = 0

    def validate(self) -> "TrainConfig":
        if self.learning_rate <= 0:
            raise ValidationError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.decay_factor <= 0:
            raise ValidationError(f"decay_factor must be positive, got {self.decay_factor}")
        if self.decay_interval < 1:
            raise ValidationError(f"decay_interval must be >= 1, got {self.decay_interval}")
        if not 0 <= self.momentum < 1:
            raise ValidationError(f"momentum must be in [0, 1), got {self.momentum}")
        if self.batch_size < 1:
            raise ValidationError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.iterations < 0:
            raise ValidationError(f"iterations must be >= 0, got {self.iterations}")
        if any(h < 1 for h in self.hidden):
            raise ValidationError(f"hidden sizes must be positive, got {self.hidden}")
        return self


class VisualEmbedder:
    """Layered affine maps; rectifier on hidden layers, identity output."""

    def __init__(self, layer_dims: list[int], weights: list[np.ndarray],
                 biases: list[np.ndarray]):
        self.layer_dims = list(layer_dims)
        self.weights = weights
        self.biases = biases
        self.loss_curve: list[tuple[int, float]] = []

    @property
    def input_dim(self) -> int:
        return self.layer_dims[0]

    @property
    def dim(self) -> int:
        return self.layer_dims[-1]

    @classmethod
    def initialize(cls, input_dim: int, output_dim: int,
                   hidden: tuple[int, ...] = (256,), seed: int = 0) -> "VisualEmbedder":
        """Scaled-normal init, std sqrt(2 / fan_in); biases start at zero."""
        dims = [input_dim, *hidden, output_dim]
        if min(dims) < 1:
            raise ValidationError(f"all layer sizes must be positive, got {dims}")
        rng = np.random.default_rng(seed)
        weights, biases = [], []
        for fan_in, fan_out in zip(dims[:-1], dims[1:]):
            scale = np.sqrt(2.0 / fan_in)
            weights.append(rng.normal(0.0, scale, (fan_in, fan_out)))
            biases.append(np.zeros(fan_out))
        return cls(dims, weights, biases)

    def forward_batch(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 2 or x.shape[1] != self.input_dim:
            raise ValidationError(
                f"feature batch must be (n, {self.input_dim}), got {x.shape}")
        a = x
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            a = a @ w + b
            if i < last:
                a = np.maximum(a, 0.0)
        return a

    def _forward_trace(self, x: np.ndarray):
        """Forward pass keeping pre- and post-activation values per layer."""
        activations = [np.asarray(x, dtype=np.float64)]
        pre = []
        last = len(self.weights) - 1
        a = activations[0]
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            z = a @ w + b
            pre.append(z)
            a = np.maximum(z, 0.0) if i < last else z
            activations.append(a)
        return pre, activations


def forward(embedder: VisualEmbedder, feature: np.ndarray) -> np.ndarray:
    """Embed one feature vector; pure function of (parameters, input)."""
    feature = np.asarray(feature, dtype=np.float64)
    if feature.ndim != 1 or feature.shape[0] != embedder.input_dim:
        raise ValidationError(
            f"feature must have length {embedder.input_dim}, got shape {feature.shape}")
    return embedder.forward_batch(feature[None, :])[0]


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def sigmoid_xent_loss(targets: np.ndarray, predictions: np.ndarray):
    """Componentwise cross entropy between squashed vectors.

    targets are the raw text vectors (squashed internally to p), and
    predictions the raw regressor outputs z (p-hat = sigmoid(z)). Returns
    (loss, gradient wrt predictions); the gradient of each component is
    (sigmoid(z) - p) / (N * d). The log-sum-exp form keeps |z| up to the
    hundreds finite.
    """
    t = np.asarray(targets, dtype=np.float64)
    z = np.asarray(predictions, dtype=np.float64)
    if t.ndim == 1:
        t = t[None, :]
    if z.ndim == 1:
        z = z[None, :]
    if t.shape != z.shape:
        raise ValidationError(f"target shape {t.shape} != prediction shape {z.shape}")
    if t.shape[0] < 1:
        raise ValidationError("batch must contain at least one pair")
    if not (np.isfinite(t).all() and np.isfinite(z).all()):
        raise ValidationError("loss inputs contain NaN or Inf")
    n, d = z.shape
    p = _sigmoid(t)
    # per-component cross entropy: max(z,0) - z*p + log(1 + exp(-|z|))
    ce = np.maximum(z, 0.0) - z * p + np.log1p(np.exp(-np.abs(z)))
    loss = float(ce.sum() / (n * d))
    grad = (_sigmoid(z) - p) / (n * d)
    return loss, grad


def loss_floor(targets: np.ndarray) -> float:
    """Mean binary entropy of the squashed targets.

    Cross entropy is bounded below by entropy, with equality exactly when
    the prediction distribution matches the target distribution, so this
    is the best loss any regressor can reach on fixed targets.
    """
    p = _sigmoid(np.asarray(targets, dtype=np.float64))
    eps = 1e-300
    h = -(p * np.log(p + eps) + (1.0 - p) * np.log(1.0 - p + eps))
    return float(h.mean())


def _backward(embedder: VisualEmbedder, x: np.ndarray, targets: np.ndarray):
    """Loss plus gradients for every weight and bias on one batch."""
    pre, acts = embedder._forward_trace(x)
    loss, delta = sigmoid_xent_loss(targets, acts[-1])
    grads_w = [None] * len(embedder.weights)
    grads_b = [None] * len(embedder.biases)
    for i in range(len(embedder.weights) - 1, -1, -1):
        grads_w[i] = acts[i].T @ delta
        grads_b[i] = delta.sum(axis=0)
        if i > 0:
            delta = (delta @ embedder.weights[i].T) * (pre[i - 1] > 0.0)
    return loss, grads_w, grads_b


def train_targets(corpus, text_embedder, aggregation="mean", stats=None,
                  split: str = "train"):
    """Feature matrix and text-vector targets for the given split.

    Documents whose text has no representable token are skipped (their
    count is returned); documents lacking features are an error listing
    the offending ids.
    """
    docs = corpus.split(split)
    missing = [doc.id for doc in docs if doc.features is None]
    if missing:
        raise ValidationError(
            f"{len(missing)} document(s) lack features: {missing[:10]}")
    feats, targets, kept_ids = [], [], []
    skipped = 0
    for doc in docs:
        try:
            vec = embed_document(text_embedder, doc.tokens(), aggregation, stats)
        except UnembeddableQueryError:
            skipped += 1
            continue
        feats.append(doc.features)
        targets.append(vec)
        kept_ids.append(doc.id)
    if not feats:
        raise ValidationError(f"no embeddable document in split {split!r}")
    return (np.asarray(feats, dtype=np.float64),
            np.asarray(targets, dtype=np.float64), kept_ids, skipped)


def train_visual(corpus, text_embedder, aggregation: str = "mean",
                 config: TrainConfig | None = None, stats=None) -> VisualEmbedder:
    """Mini-batch gradient descent with momentum on the squashing loss.

    Batches are drawn by reshuffling the train split whenever it is
    exhausted; the step size follows the decay schedule. Single-worker
    and bit-reproducible for a fixed seed.
    """
    config = (config or TrainConfig()).validate()
    x, t, _, _ = train_targets(corpus, text_embedder, aggregation, stats)
    embedder = VisualEmbedder.initialize(
        x.shape[1], t.shape[1], config.hidden, config.seed)

    rng = np.random.default_rng(np.random.SeedSequence([config.seed, 0x7E57]))
    vel_w = [np.zeros_like(w) for w in embedder.weights]
    vel_b = [np.zeros_like(b) for b in embedder.biases]
    n = x.shape[0]
    batch = min(config.batch_size, n)
    perm = rng.permutation(n)
    ptr = 0
    curve = []
    for step in range(config.iterations):
        if ptr + batch > n:
            perm = rng.permutation(n)
            ptr = 0
        idx = perm[ptr:ptr + batch]
        ptr += batch
        loss, grads_w, grads_b = _backward(embedder, x[idx], t[idx])
        lr = config.learning_rate * config.decay_factor ** (step // config.decay_interval)
        for i in range(len(embedder.weights)):
            vel_w[i] = config.momentum * vel_w[i] - lr * grads_w[i]
            vel_b[i] = config.momentum * vel_b[i] - lr * grads_b[i]
            embedder.weights[i] += vel_w[i]
            embedder.biases[i] += vel_b[i]
        curve.append((step, loss))
        if not all(np.isfinite(w).all() for w in embedder.weights):
            raise ValidationError(f"parameters diverged at iteration {step}")
    embedder.loss_curve = curve
    return embedder


def gradient_check(embedder: VisualEmbedder, features: np.ndarray,
                   targets: np.ndarray, epsilon: float = 1e-4) -> float:
    """Max relative disagreement between backprop and central differences."""
    if not 0 < epsilon <= 1e-2:
        raise ValidationError(f"epsilon must be in (0, 1e-2], got {epsilon}")
    x = np.asarray(features, dtype=np.float64)
    t = np.asarray(targets, dtype=np.float64)
    _, grads_w, grads_b = _backward(embedder, x, t)
    worst = 0.0
    params = list(zip(embedder.weights, grads_w)) + list(zip(embedder.biases, grads_b))
    for tensor, analytic in params:
        flat = tensor.reshape(-1)
        aflat = analytic.reshape(-1)
        for j in range(flat.shape[0]):
            keep = flat[j]
            flat[j] = keep + epsilon
            lp, _ = sigmoid_xent_loss(t, embedder.forward_batch(x))
            flat[j] = keep - epsilon
            lm, _ = sigmoid_xent_loss(t, embedder.forward_batch(x))
            flat[j] = keep
            fd = (lp - lm) / (2.0 * epsilon)
            denom = max(abs(fd), abs(aflat[j]), 1e-8)
            worst = max(worst, abs(fd - aflat[j]) / denom)
    return worst


def save_visual(embedder: VisualEmbedder, path) -> None:
    meta = {"layer_dims": embedder.layer_dims}
    arrays = {}
    for i, (w, b) in enumerate(zip(embedder.weights, embedder.biases)):
        arrays[f"w{i}"] = w.astype("<f4")
        arrays[f"b{i}"] = b.astype("<f4")
    write_artifact(path, KIND, meta, arrays)


def load_visual(path) -> VisualEmbedder:
    meta, arrays = read_artifact(path, expect_kind=KIND)
    dims = [int(v) for v in meta["layer_dims"]]
    n_layers = len(dims) - 1
    weights = [arrays[f"w{i}"].astype(np.float64) for i in range(n_layers)]
    biases = [arrays[f"b{i}"].astype(np.float64) for i in range(n_layers)]
    return VisualEmbedder(dims, weights, biases)


def save_loss_curve(curve: list[tuple[int, float]], path) -> None:
    """CSV export, columns iteration,loss."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration", "loss"])
        for it, loss in curve:
            writer.writerow([it, f"{loss:.10g}"])
