"""Paragraph vectors, distributed bag-of-words flavor."""

from __future__ import annotations

import numpy as np

from .. import _kernels as kernels
from ..corpus import Corpus
from ..errors import UnembeddableQueryError
from .base import (MIN_ALPHA, TextEmbedder, build_negative_table, derive_seed,
                   epoch_alpha_bounds, init_vector_table, pack_token_streams,
                   run_shards, training_vocabulary)
from .config import EmbeddingConfig


class Doc2VecEmbedder(TextEmbedder):
    """Trained doc-vector table plus frozen-output inference for new text.

    Inference trains a fresh vector to predict the document's words
    against the frozen output layer; it is a pure function of (model,
    tokens), so repeated inference of the same tokens is bit-identical.
    """

    method = "doc2vec"
    native_document_inference = True

    def __init__(self, vocab, dim, doc_ids: list[str], doc_vectors: np.ndarray,
                 syn1: np.ndarray, config):
        super().__init__(vocab, dim, config)
        self.doc_ids = list(doc_ids)
        self.doc_vectors = doc_vectors
        self.syn1 = syn1
        self._neg_table = build_negative_table(vocab.counts)

    def token_vector(self, token: str):
        if token not in self.vocab:
            return None
        return self.infer_document([token])

    def has_token(self, token: str) -> bool:
        return token in self.vocab

    def infer_document(self, tokens: list[str]) -> np.ndarray:
        ids = self.vocab.encode(tokens)
        if not ids:
            raise UnembeddableQueryError(
                "document has no in-vocabulary token to infer from")
        seed = derive_seed(self.config.seed, "d2v-infer", tuple(ids))
        rng = np.random.default_rng(seed)
        vec = ((rng.random((1, self.dim)) - 0.5) / self.dim).astype(np.float32)
        steps = self.config.inference_steps
        contexts = np.tile(np.asarray(ids, dtype=np.int32), steps)
        centers = np.zeros(len(contexts), dtype=np.int32)
        state = np.array([derive_seed(seed, "rng")], dtype=np.uint64)
        kernels.sgns_pairs_epoch(
            centers, contexts, vec, self.syn1, self._neg_table,
            self.config.negative, self.config.effective_learning_rate,
            MIN_ALPHA, False, state)
        return vec[0].astype(np.float64)


def train_doc2vec(corpus: Corpus, config: EmbeddingConfig) -> Doc2VecEmbedder:
    """Each document's vector learns to predict its own words.

    The output layer is shared with negative sampling; held-out documents
    are embedded later by inference against the frozen weights.
    """
    config.validate("doc2vec")
    docs, vocab = training_vocabulary(corpus, config)
    kept_ids = []
    streams = []
    for doc in docs:
        ids = vocab.encode(doc.tokens())
        if ids:
            kept_ids.append(doc.id)
            streams.append(np.asarray(ids, dtype=np.int32))
    n_docs = len(streams)
    contexts = (np.concatenate(streams) if streams else np.zeros(0, np.int32))
    centers = np.concatenate(
        [np.full(len(s), i, dtype=np.int32) for i, s in enumerate(streams)]
    ) if streams else np.zeros(0, np.int32)

    doc_vectors = init_vector_table(n_docs, config.dim,
                                    derive_seed(config.seed, "d2v-docs"))
    syn1 = np.zeros((len(vocab), config.dim), dtype=np.float32)
    table = build_negative_table(vocab.counts)
    lr = config.effective_learning_rate

    workers = max(1, min(config.workers, n_docs or 1))
    bounds = np.linspace(0, len(centers), workers + 1).astype(np.int64)
    states = [np.array([derive_seed(config.seed, "d2v-rng", w)], dtype=np.uint64)
              for w in range(workers)]
    for epoch in range(config.epochs):
        a0, a1 = epoch_alpha_bounds(lr, epoch, config.epochs)
        run_shards(
            lambda lo, hi, st: kernels.sgns_pairs_epoch(
                centers[lo:hi], contexts[lo:hi], doc_vectors, syn1, table,
                config.negative, a0, a1, True, st),
            [(int(bounds[w]), int(bounds[w + 1]), states[w]) for w in range(workers)],
            workers)
    return Doc2VecEmbedder(vocab, config.dim, kept_ids, doc_vectors, syn1, config)
