"""Embedder interface, document aggregation, and trainer plumbing.

Every trainer produces a TextEmbedder whose token_vector is a pure
function, so trained models are immutable and safely shared across
threads. Document vectors are built here by mean or tf-idf aggregation;
the paragraph-vector and topic-model methods override with native
document inference instead.
"""

from __future__ import annotations

import hashlib
import math
from abc import ABC, abstractmethod
from collections import Counter
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from ..corpus import Corpus, Document, Vocabulary, build_vocabulary
from ..errors import ConfigError, UnembeddableQueryError, ValidationError
from .config import EmbeddingConfig

# floor of the linearly decaying SGNS learning rate
MIN_ALPHA = 1e-4

NEGATIVE_TABLE_SIZE = 1 << 20

AGGREGATIONS = ("mean", "tfidf")


class TextEmbedder(ABC):
    """Trained text model: token vectors plus optional native doc inference."""

    method: str = ""
    native_document_inference = False

    def __init__(self, vocab: Vocabulary, dim: int, config: EmbeddingConfig):
        self.vocab = vocab
        self.dim = dim
        self.config = config

    @abstractmethod
    def token_vector(self, token: str):
        """Vector for one token, or None when it cannot be represented."""

    def has_token(self, token: str) -> bool:
        return self.token_vector(token) is not None

    def infer_document(self, tokens: list[str]) -> np.ndarray:
        raise NotImplementedError(f"{self.method} has no native document inference")


def _idf_for(embedder: TextEmbedder, stats, token: str) -> float:
    tid = embedder.vocab.token_to_id.get(token)
    if tid is None:
        # unseen token: df = 0 under the smoothed formula
        return math.log(stats.n_documents) + 1.0
    return float(stats.idf[tid])


def embed_document(embedder: TextEmbedder, tokens: list[str],
                   aggregation: str = "mean", stats=None) -> np.ndarray:
    """Aggregate token vectors into one document vector of length dim.

    mean: arithmetic mean over representable tokens. tfidf: sum of
    tf(t)*idf(t) weighted vectors divided by the weight sum. Methods with
    native document inference ignore the aggregation choice. OOV tokens
    are dropped; a document with no representable token is an error.
    """
    if aggregation not in AGGREGATIONS:
        raise ConfigError(f"aggregation must be one of {AGGREGATIONS}, got {aggregation!r}")
    if embedder.native_document_inference:
        return embedder.infer_document(tokens)
    if aggregation == "tfidf" and stats is None:
        raise ConfigError("tfidf aggregation requires tf-idf statistics")
    counts = Counter(tokens)
    num = np.zeros(embedder.dim, dtype=np.float64)
    den = 0.0
    matched = 0
    # distinct tokens in sorted order: exact invariance to token order
    for tok in sorted(counts):
        vec = embedder.token_vector(tok)
        if vec is None:
            continue
        matched += 1
        w = float(counts[tok])
        if aggregation == "tfidf":
            w *= _idf_for(embedder, stats, tok)
        num += w * np.asarray(vec, dtype=np.float64)
        den += w
    if matched == 0:
        raise UnembeddableQueryError(
            f"none of the {len(counts)} distinct token(s) is representable"
        )
    return num / den


def derive_seed(*parts) -> int:
    """Stable 64-bit seed from arbitrary hashable parts."""
    digest = hashlib.blake2b(repr(parts).encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def build_negative_table(counts: np.ndarray, power: float = 0.75,
                         size: int = NEGATIVE_TABLE_SIZE) -> np.ndarray:
    """Unigram^power sampling table of word ids.

    Slot counts are proportional to count^power; drawing a uniform slot
    approximates the smoothed unigram distribution.
    """
    weights = np.asarray(counts, dtype=np.float64) ** power
    cum = np.cumsum(weights)
    if cum[-1] <= 0:
        raise ValidationError("negative-sampling table needs positive counts")
    thresholds = (np.arange(size, dtype=np.float64) + 0.5) / size * cum[-1]
    return np.searchsorted(cum, thresholds, side="left").astype(np.int32)


def init_vector_table(n: int, dim: int, seed: int) -> np.ndarray:
    """Uniform init in (-0.5/dim, 0.5/dim), the standard skip-gram scheme."""
    rng = np.random.default_rng(seed)
    return ((rng.random((n, dim)) - 0.5) / dim).astype(np.float32)


def pack_token_streams(docs: list[Document], vocab: Vocabulary):
    """Concatenate per-document token-id streams; empty documents dropped.

    Returns (data int32, offsets int64) where sentence s spans
    data[offsets[s]:offsets[s+1]].
    """
    streams = []
    for doc in docs:
        ids = vocab.encode(doc.tokens())
        if ids:
            streams.append(ids)
    offsets = np.zeros(len(streams) + 1, dtype=np.int64)
    for s, ids in enumerate(streams):
        offsets[s + 1] = offsets[s] + len(ids)
    if streams:
        data = np.concatenate([np.asarray(s, dtype=np.int32) for s in streams])
    else:
        data = np.zeros(0, dtype=np.int32)
    return data, offsets


def epoch_alpha_bounds(lr: float, epoch: int, epochs: int,
                       min_alpha: float = MIN_ALPHA) -> tuple[float, float]:
    """Linear global decay from lr to min_alpha split into per-epoch ranges."""
    lo = min(min_alpha, lr)
    start = lr - (lr - lo) * (epoch / epochs)
    end = lr - (lr - lo) * ((epoch + 1) / epochs)
    return start, end


def shard_sentences(offsets: np.ndarray, workers: int) -> list[np.ndarray]:
    """Split the sentence offset array into contiguous per-worker views."""
    n_sent = len(offsets) - 1
    workers = max(1, min(workers, n_sent)) if n_sent else 1
    bounds = np.linspace(0, n_sent, workers + 1).astype(np.int64)
    return [offsets[bounds[w]:bounds[w + 1] + 1] for w in range(workers)]


def run_shards(fn, shards: list, workers: int) -> None:
    """Apply fn to each shard, threaded when workers > 1 (hogwild updates).

    Multi-worker runs race on the shared tables and are nondeterministic
    by contract; single-worker runs are bit-reproducible.
    """
    if workers <= 1 or len(shards) <= 1:
        for shard in shards:
            fn(*shard)
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        list(pool.map(lambda args: fn(*args), shards))


def training_vocabulary(corpus: Corpus, config: EmbeddingConfig) -> tuple[list, Vocabulary]:
    """Train-split documents and the vocabulary built over them."""
    docs = corpus.split("train")
    if not docs:
        raise ValidationError("corpus has an empty train split")
    vocab = build_vocabulary(corpus, config.min_count)
    return docs, vocab
