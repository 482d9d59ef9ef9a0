"""Skip-gram word vectors trained with negative sampling."""

from __future__ import annotations

import numpy as np

from .. import _kernels as kernels
from ..corpus import Corpus
from .base import (TextEmbedder, build_negative_table, derive_seed,
                   epoch_alpha_bounds, init_vector_table, pack_token_streams,
                   run_shards, shard_sentences, training_vocabulary)
from .config import EmbeddingConfig


class Word2VecEmbedder(TextEmbedder):
    method = "word2vec"

    def __init__(self, vocab, dim, vectors: np.ndarray, config):
        super().__init__(vocab, dim, config)
        self.vectors = vectors

    def token_vector(self, token: str):
        idx = self.vocab.token_to_id.get(token)
        return None if idx is None else self.vectors[idx]

    def has_token(self, token: str) -> bool:
        return token in self.vocab


def train_word2vec(corpus: Corpus, config: EmbeddingConfig) -> Word2VecEmbedder:
    """Skip-gram with negative sampling over the train-split token streams.

    Each center position draws a reduced window uniformly in [1, window];
    the learning rate decays linearly across all epochs. Single-worker
    runs are bit-reproducible for a fixed seed.
    """
    config.validate("word2vec")
    docs, vocab = training_vocabulary(corpus, config)
    data, offsets = pack_token_streams(docs, vocab)
    syn0 = init_vector_table(len(vocab), config.dim, derive_seed(config.seed, "w2v-in"))
    syn1 = np.zeros((len(vocab), config.dim), dtype=np.float32)
    table = build_negative_table(vocab.counts)
    lr = config.effective_learning_rate

    shards = shard_sentences(offsets, config.workers)
    states = [np.array([derive_seed(config.seed, "w2v-rng", w)], dtype=np.uint64)
              for w in range(len(shards))]
    for epoch in range(config.epochs):
        a0, a1 = epoch_alpha_bounds(lr, epoch, config.epochs)
        run_shards(
            lambda off, st: kernels.sgns_epoch(
                data, off, syn0, syn1, table, config.window, config.negative,
                a0, a1, st),
            list(zip(shards, states)), config.workers)
    return Word2VecEmbedder(vocab, config.dim, syn0, config)
