"""Topic-model embeddings via collapsed Gibbs sampling.

A word's embedding is its normalized topic-assignment distribution; a
document's embedding is the smoothed topic posterior obtained by Gibbs
passes against the frozen topic-word counts. Both are probability
vectors over the dim topics.
"""

from __future__ import annotations

import warnings

import numpy as np

from .. import _kernels as kernels
from ..corpus import Corpus
from ..errors import UnembeddableQueryError
from .base import TextEmbedder, derive_seed, training_vocabulary
from .config import EmbeddingConfig


class LdaEmbedder(TextEmbedder):
    method = "lda"
    native_document_inference = True

    def __init__(self, vocab, dim, topic_word_counts: np.ndarray, config):
        super().__init__(vocab, dim, config)
        # (n_topics, V) assignment counts; frozen after training
        self.topic_word_counts = np.ascontiguousarray(topic_word_counts, dtype=np.int32)
        self._topic_totals = self.topic_word_counts.sum(axis=1, dtype=np.int64)
        self._topic_totals_i32 = self._topic_totals.astype(np.int32)

    def token_vector(self, token: str):
        idx = self.vocab.token_to_id.get(token)
        if idx is None:
            return None
        counts = self.topic_word_counts[:, idx].astype(np.float64)
        total = counts.sum()
        if total == 0:
            # never assigned (possible only with zero sweeps over zero occurrences)
            return np.full(self.dim, 1.0 / self.dim)
        return counts / total

    def has_token(self, token: str) -> bool:
        return token in self.vocab

    def infer_document(self, tokens: list[str]) -> np.ndarray:
        """Topic posterior of unseen text against the frozen model.

        A single representable token embeds as that word's own topic
        distribution, which keeps one-word queries meaningful.
        """
        ids = self.vocab.encode(tokens)
        if not ids:
            raise UnembeddableQueryError(
                "document has no in-vocabulary token to infer from")
        if len(ids) == 1:
            return self.token_vector(self.vocab.id_to_token[ids[0]])
        alpha = self.config.effective_topic_alpha
        seed = derive_seed(self.config.seed, "lda-infer", tuple(ids))
        rng = np.random.default_rng(seed)
        word_ids = np.asarray(ids, dtype=np.int32)
        topics = rng.integers(0, self.dim, len(ids)).astype(np.int32)
        doc_ids = np.zeros(len(ids), dtype=np.int32)
        n_doc_topic = np.zeros((1, self.dim), dtype=np.int32)
        np.add.at(n_doc_topic[0], topics, 1)
        state = np.array([derive_seed(seed, "sweep")], dtype=np.uint64)
        for _ in range(self.config.inference_steps):
            kernels.lda_sweep(doc_ids, word_ids, topics, n_doc_topic,
                              self.topic_word_counts, self._topic_totals_i32,
                              alpha, self.config.topic_beta, False, state)
        theta = n_doc_topic[0].astype(np.float64) + alpha
        return theta / theta.sum()


def train_lda(corpus: Corpus, config: EmbeddingConfig) -> LdaEmbedder:
    """Collapsed Gibbs sampling over the train-split token stream.

    dim is the topic count; the doc-topic prior defaults to 50/dim and
    the topic-word prior to 0.01. Sampling is sequential, so the worker
    count is ignored.
    """
    config.validate("lda")
    docs, vocab = training_vocabulary(corpus, config)
    n_topics = config.dim
    if len(docs) < n_topics:
        warnings.warn(
            f"fewer train documents ({len(docs)}) than topics ({n_topics}); "
            "topic estimates will be diffuse", stacklevel=2)

    doc_list = []
    word_list = []
    d = 0
    for doc in docs:
        ids = vocab.encode(doc.tokens())
        if not ids:
            continue
        doc_list.append(np.full(len(ids), d, dtype=np.int32))
        word_list.append(np.asarray(ids, dtype=np.int32))
        d += 1
    doc_ids = np.concatenate(doc_list) if doc_list else np.zeros(0, np.int32)
    word_ids = np.concatenate(word_list) if word_list else np.zeros(0, np.int32)

    rng = np.random.default_rng(derive_seed(config.seed, "lda-init"))
    topics = rng.integers(0, n_topics, len(word_ids)).astype(np.int32)

    n_doc_topic = np.zeros((max(d, 1), n_topics), dtype=np.int32)
    n_topic_word = np.zeros((n_topics, len(vocab)), dtype=np.int32)
    n_topic = np.zeros(n_topics, dtype=np.int32)
    np.add.at(n_doc_topic, (doc_ids, topics), 1)
    np.add.at(n_topic_word, (topics, word_ids), 1)
    np.add.at(n_topic, topics, 1)

    alpha = config.effective_topic_alpha
    state = np.array([derive_seed(config.seed, "lda-rng")], dtype=np.uint64)
    for _ in range(config.gibbs_sweeps):
        kernels.lda_sweep(doc_ids, word_ids, topics, n_doc_topic, n_topic_word,
                          n_topic, alpha, config.topic_beta, True, state)
    return LdaEmbedder(vocab, n_topics, n_topic_word, config)
