"""Subword skip-gram vectors: a word is the sum of its character n-grams."""

from __future__ import annotations

import numpy as np

from .. import _kernels as kernels
from ..corpus import Corpus
from .base import (TextEmbedder, build_negative_table, derive_seed,
                   epoch_alpha_bounds, init_vector_table, pack_token_streams,
                   run_shards, shard_sentences, training_vocabulary)
from .config import EmbeddingConfig


def word_ngrams(word: str, min_n: int, max_n: int) -> list[str]:
    """Character n-grams of the boundary-marked word, shortest first.

    "cat" with min_n = max_n = 3 yields exactly ["<ca", "cat", "at>"].
    """
    marked = "<" + word + ">"
    out = []
    for n in range(min_n, max_n + 1):
        for i in range(len(marked) - n + 1):
            out.append(marked[i:i + n])
    return out


class FastTextEmbedder(TextEmbedder):
    """Gram table plus composition; OOV words embed via shared n-grams."""

    method = "fasttext"

    def __init__(self, vocab, dim, gram_list: list[str],
                 gram_vectors: np.ndarray, config):
        super().__init__(vocab, dim, config)
        self.gram_list = list(gram_list)
        self.gram_to_id = {g: i for i, g in enumerate(gram_list)}
        self.gram_vectors = gram_vectors

    def gram_ids(self, token: str) -> list[int]:
        # sorted so the float sum is canonical per gram multiset (anagrams
        # with equal gram sets compose bit-identically)
        g2i = self.gram_to_id
        return sorted(g2i[g] for g in word_ngrams(token, self.config.min_n,
                                                  self.config.max_n)
                      if g in g2i)

    def token_vector(self, token: str):
        ids = self.gram_ids(token)
        if not ids:
            return None
        # exact sum of the n-gram rows, by contract
        return self.gram_vectors[ids].sum(axis=0)


def _gram_inventory(vocab, min_n, max_n):
    """Gram ids in first-seen order over vocabulary words, plus the packed
    per-word gram-id lists the kernel consumes."""
    gram_to_id: dict[str, int] = {}
    per_word: list[list[int]] = []
    for token in vocab.id_to_token:
        ids = []
        for g in word_ngrams(token, min_n, max_n):
            gid = gram_to_id.setdefault(g, len(gram_to_id))
            ids.append(gid)
        per_word.append(ids)
    ngram_offsets = np.zeros(len(per_word) + 1, dtype=np.int64)
    for w, ids in enumerate(per_word):
        ngram_offsets[w + 1] = ngram_offsets[w] + len(ids)
    if per_word and ngram_offsets[-1] > 0:
        ngram_data = np.concatenate(
            [np.asarray(ids, dtype=np.int32) for ids in per_word if ids])
    else:
        ngram_data = np.zeros(0, dtype=np.int32)
    grams = [None] * len(gram_to_id)
    for g, i in gram_to_id.items():
        grams[i] = g
    return grams, ngram_data, ngram_offsets


def train_fasttext(corpus: Corpus, config: EmbeddingConfig) -> FastTextEmbedder:
    """Skip-gram negative sampling where centers are n-gram sums.

    The gram inventory is exact (every n-gram of every vocabulary word
    gets its own row, no hashing buckets), so composition at embed time
    is the same pure function used during training.
    """
    config.validate("fasttext")
    docs, vocab = training_vocabulary(corpus, config)
    data, offsets = pack_token_streams(docs, vocab)
    grams, ngram_data, ngram_offsets = _gram_inventory(
        vocab, config.min_n, config.max_n)
    gram_vectors = init_vector_table(len(grams), config.dim,
                                     derive_seed(config.seed, "ft-grams"))
    syn1 = np.zeros((len(vocab), config.dim), dtype=np.float32)
    table = build_negative_table(vocab.counts)
    lr = config.effective_learning_rate

    shards = shard_sentences(offsets, config.workers)
    states = [np.array([derive_seed(config.seed, "ft-rng", w)], dtype=np.uint64)
              for w in range(len(shards))]
    for epoch in range(config.epochs):
        a0, a1 = epoch_alpha_bounds(lr, epoch, config.epochs)
        run_shards(
            lambda off, st: kernels.subword_sgns_epoch(
                data, off, ngram_data, ngram_offsets, gram_vectors, syn1,
                table, config.window, config.negative, a0, a1, st),
            list(zip(shards, states)), config.workers)
    return FastTextEmbedder(vocab, config.dim, grams, gram_vectors, config)
