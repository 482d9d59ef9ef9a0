"""Text-embedding trainers and document aggregation."""

from .base import AGGREGATIONS, TextEmbedder, embed_document
from .config import METHODS, EmbeddingConfig
from .doc2vec import Doc2VecEmbedder, train_doc2vec
from .fasttext import FastTextEmbedder, train_fasttext, word_ngrams
from .glove import GloVeEmbedder, build_cooccurrence, train_glove
from .io import export_word_vectors, load_embedder, save_embedder
from .lda import LdaEmbedder, train_lda
from .word2vec import Word2VecEmbedder, train_word2vec

TRAINERS = {
    "word2vec": train_word2vec,
    "fasttext": train_fasttext,
    "glove": train_glove,
    "doc2vec": train_doc2vec,
    "lda": train_lda,
}


def train_text_embedder(corpus, config: EmbeddingConfig) -> TextEmbedder:
    """Dispatch to the trainer named by config.method."""
    config.validate()
    return TRAINERS[config.method](corpus, config)


__all__ = [
    "AGGREGATIONS", "METHODS", "TRAINERS", "EmbeddingConfig", "TextEmbedder",
    "Word2VecEmbedder", "FastTextEmbedder", "GloVeEmbedder", "Doc2VecEmbedder",
    "LdaEmbedder", "train_word2vec", "train_fasttext", "train_glove",
    "train_doc2vec", "train_lda", "train_text_embedder", "embed_document",
    "save_embedder", "load_embedder", "export_word_vectors", "word_ngrams",
    "build_cooccurrence",
]
