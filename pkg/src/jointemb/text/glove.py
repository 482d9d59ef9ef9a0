"""Word vectors from weighted least squares on windowed co-occurrences."""

from __future__ import annotations

import math

import numpy as np

from .. import _kernels as kernels
from ..corpus import Corpus
from .base import (TextEmbedder, derive_seed, pack_token_streams, run_shards,
                   training_vocabulary)
from .config import EmbeddingConfig


class GloVeEmbedder(TextEmbedder):
    method = "glove"

    def __init__(self, vocab, dim, vectors: np.ndarray, config,
                 epoch_costs: list[float] | None = None):
        super().__init__(vocab, dim, config)
        self.vectors = vectors
        self.epoch_costs = list(epoch_costs or [])

    def token_vector(self, token: str):
        idx = self.vocab.token_to_id.get(token)
        return None if idx is None else self.vectors[idx]

    def has_token(self, token: str) -> bool:
        return token in self.vocab


def build_cooccurrence(data: np.ndarray, offsets: np.ndarray, window: int):
    """Symmetric windowed co-occurrence counts with 1/distance weighting.

    Pairs never cross sentence boundaries. Entries are emitted in sorted
    (row, col) order so construction is deterministic.
    """
    acc: dict[tuple[int, int], float] = {}
    for s in range(len(offsets) - 1):
        start = int(offsets[s])
        end = int(offsets[s + 1])
        for i in range(start, end):
            wi = int(data[i])
            for j in range(max(start, i - window), i):
                wj = int(data[j])
                w = 1.0 / (i - j)
                acc[(wi, wj)] = acc.get((wi, wj), 0.0) + w
                acc[(wj, wi)] = acc.get((wj, wi), 0.0) + w
    items = sorted(acc.items())
    rows = np.array([ij[0] for ij, _ in items], dtype=np.int32)
    cols = np.array([ij[1] for ij, _ in items], dtype=np.int32)
    vals = np.array([v for _, v in items], dtype=np.float64)
    return rows, cols, vals


def train_glove(corpus: Corpus, config: EmbeddingConfig) -> GloVeEmbedder:
    """AdaGrad descent on the weighted co-occurrence regression objective.

    Weight f(x) = min(1, (x / x_max)^glove_alpha); squared-gradient
    accumulators start at 1. The per-epoch objective sum is recorded in
    epoch_costs. The final word vector is the sum of the main and context
    tables.
    """
    config.validate("glove")
    docs, vocab = training_vocabulary(corpus, config)
    data, offsets = pack_token_streams(docs, vocab)
    rows, cols, vals = build_cooccurrence(data, offsets, config.window)

    n_pairs = len(rows)
    v, d = len(vocab), config.dim
    logx = np.log(vals).astype(np.float32) if n_pairs else np.zeros(0, np.float32)
    fweight = np.minimum(1.0, (vals / config.x_max) ** config.glove_alpha
                         ).astype(np.float32) if n_pairs else np.zeros(0, np.float32)

    rng = np.random.default_rng(derive_seed(config.seed, "glove-init"))
    w_main = ((rng.random((v, d)) - 0.5) / d).astype(np.float32)
    w_ctx = ((rng.random((v, d)) - 0.5) / d).astype(np.float32)
    b_main = ((rng.random(v) - 0.5) / d).astype(np.float32)
    b_ctx = ((rng.random(v) - 0.5) / d).astype(np.float32)
    gsq_w_main = np.ones((v, d), dtype=np.float32)
    gsq_w_ctx = np.ones((v, d), dtype=np.float32)
    gsq_b_main = np.ones(v, dtype=np.float32)
    gsq_b_ctx = np.ones(v, dtype=np.float32)

    order_rng = np.random.default_rng(derive_seed(config.seed, "glove-order"))
    lr = config.effective_learning_rate
    costs = []
    for _ in range(config.epochs):
        order = order_rng.permutation(n_pairs).astype(np.int64)
        if config.workers <= 1 or n_pairs < 2:
            cost = kernels.glove_epoch(
                rows, cols, logx, fweight, order, w_main, w_ctx, b_main, b_ctx,
                gsq_w_main, gsq_w_ctx, gsq_b_main, gsq_b_ctx, lr)
        else:
            bounds = np.linspace(0, n_pairs, config.workers + 1).astype(np.int64)
            parts = []
            run_shards(
                lambda lo, hi: parts.append(kernels.glove_epoch(
                    rows, cols, logx, fweight, order[lo:hi], w_main, w_ctx,
                    b_main, b_ctx, gsq_w_main, gsq_w_ctx, gsq_b_main,
                    gsq_b_ctx, lr)),
                [(int(bounds[w]), int(bounds[w + 1])) for w in range(config.workers)],
                config.workers)
            cost = math.fsum(parts)
        costs.append(float(cost))
    vectors = w_main + w_ctx
    return GloVeEmbedder(vocab, d, vectors, config, costs)
