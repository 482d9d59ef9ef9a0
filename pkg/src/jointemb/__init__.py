"""Joint text and image embeddings with cosine retrieval.

Text embedders (skip-gram, subword, co-occurrence factorization, paragraph
vectors, topic model) map tokens and documents into R^d; a small feedforward
regressor maps image feature vectors into the same space. Retrieval is
cosine similarity over a normalized index, exposed through a CLI and a
JSON HTTP service.
"""

from ._kernels import BACKEND
from .corpus import (
    Corpus,
    Document,
    Vocabulary,
    build_vocabulary,
    compute_tfidf_stats,
    filter_low_frequency_tags,
    generate_synthetic_corpus,
    load_corpus,
    save_corpus,
    tokenize,
)
from .engine import Engine, EngineConfig, execute_query, load_engine_config, parse_query_terms
from .errors import (
    ArtifactFormatError,
    ConfigError,
    CorpusFormatError,
    DegenerateQueryError,
    PrerequisiteError,
    UnembeddableQueryError,
    ValidationError,
)
from .evaluation import (
    average_precision,
    distance_correlation_study,
    eval_p5_suite,
    load_query_fixture,
    mean_average_precision,
    precision_at_k,
    r_squared,
)
from .retrieval import RetrievalIndex, build_index, compose_query, cosine_similarity, query_nearest
from .text import EmbeddingConfig, embed_document, train_text_embedder
from .visual import TrainConfig, VisualEmbedder, forward, sigmoid_xent_loss, train_visual

__version__ = "0.1.0"

__all__ = [
    "ArtifactFormatError",
    "BACKEND",
    "ConfigError",
    "Corpus",
    "CorpusFormatError",
    "DegenerateQueryError",
    "Document",
    "EmbeddingConfig",
    "Engine",
    "EngineConfig",
    "PrerequisiteError",
    "RetrievalIndex",
    "TrainConfig",
    "UnembeddableQueryError",
    "ValidationError",
    "VisualEmbedder",
    "Vocabulary",
    "average_precision",
    "build_index",
    "build_vocabulary",
    "compose_query",
    "compute_tfidf_stats",
    "cosine_similarity",
    "distance_correlation_study",
    "embed_document",
    "eval_p5_suite",
    "execute_query",
    "filter_low_frequency_tags",
    "forward",
    "generate_synthetic_corpus",
    "load_corpus",
    "load_engine_config",
    "load_query_fixture",
    "mean_average_precision",
    "parse_query_terms",
    "precision_at_k",
    "query_nearest",
    "r_squared",
    "save_corpus",
    "sigmoid_xent_loss",
    "tokenize",
    "train_text_embedder",
    "train_visual",
    "__version__",
]
