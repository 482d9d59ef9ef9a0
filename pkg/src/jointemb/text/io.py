"""Persistence and export for trained text embedders."""

from __future__ import annotations

import numpy as np

from ..corpus import Vocabulary
from ..errors import ArtifactFormatError, ValidationError
from ..persist import read_artifact, write_artifact
from .config import EmbeddingConfig
from .doc2vec import Doc2VecEmbedder
from .fasttext import FastTextEmbedder
from .glove import GloVeEmbedder
from .lda import LdaEmbedder
from .word2vec import Word2VecEmbedder

KIND = "text_embedder"


def save_embedder(embedder, path) -> None:
    """Write the model to the binary container; round trips are bit-exact."""
    meta = {
        "method": embedder.method,
        "dim": embedder.dim,
        "config": embedder.config.to_dict(),
        "vocab_tokens": embedder.vocab.id_to_token,
    }
    arrays = {
        "vocab_counts": embedder.vocab.counts.astype("<i8"),
        "vocab_doc_freqs": embedder.vocab.doc_freqs.astype("<i8"),
    }
    if embedder.method in ("word2vec", "glove"):
        arrays["vectors"] = embedder.vectors.astype("<f4")
        if embedder.method == "glove":
            meta["epoch_costs"] = embedder.epoch_costs
    elif embedder.method == "fasttext":
        meta["gram_list"] = embedder.gram_list
        arrays["gram_vectors"] = embedder.gram_vectors.astype("<f4")
    elif embedder.method == "doc2vec":
        meta["doc_ids"] = embedder.doc_ids
        arrays["doc_vectors"] = embedder.doc_vectors.astype("<f4")
        arrays["syn1"] = embedder.syn1.astype("<f4")
    elif embedder.method == "lda":
        arrays["topic_word_counts"] = embedder.topic_word_counts.astype("<i4")
    else:
        raise ValidationError(f"cannot persist unknown method {embedder.method!r}")
    write_artifact(path, KIND, meta, arrays)


def load_embedder(path):
    """Reconstruct a TextEmbedder; the stored method tag picks the class."""
    meta, arrays = read_artifact(path, expect_kind=KIND)
    vocab = Vocabulary(meta["vocab_tokens"], arrays["vocab_counts"],
                       arrays["vocab_doc_freqs"])
    config = EmbeddingConfig.from_dict(meta["config"])
    method = meta["method"]
    dim = int(meta["dim"])
    if method == "word2vec":
        return Word2VecEmbedder(vocab, dim, arrays["vectors"], config)
    if method == "glove":
        return GloVeEmbedder(vocab, dim, arrays["vectors"], config,
                             meta.get("epoch_costs"))
    if method == "fasttext":
        return FastTextEmbedder(vocab, dim, meta["gram_list"],
                                arrays["gram_vectors"], config)
    if method == "doc2vec":
        return Doc2VecEmbedder(vocab, dim, meta["doc_ids"],
                               arrays["doc_vectors"], arrays["syn1"], config)
    if method == "lda":
        return LdaEmbedder(vocab, dim, arrays["topic_word_counts"], config)
    raise ArtifactFormatError(f"{path}: unknown embedder method {method!r}")


def export_word_vectors(embedder, path) -> None:
    """Plain-text dump: "count dim" then one "token v1 .. vd" line each."""
    if embedder.method == "doc2vec":
        raise ValidationError(
            "the paragraph-vector model has no word-vector table to export")
    tokens = embedder.vocab.id_to_token
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{len(tokens)} {embedder.dim}\n")
        for token in tokens:
            vec = np.asarray(embedder.token_vector(token), dtype=np.float64)
            fh.write(token + " " + " ".join(f"{x:.6f}" for x in vec) + "\n")
