"""Engine configuration, artifact wiring, and query execution.

The Engine owns one immutable snapshot of (corpus, text embedder, tf-idf
stats, index) and answers structured queries against it. Reload builds a
fresh snapshot and swaps it in a single reference assignment, so
concurrent readers always see a consistent artifact set.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np

from .corpus import Corpus, compute_tfidf_stats, load_corpus, tokenize
from .errors import (ConfigError, UnembeddableQueryError, ValidationError)
from .retrieval import RetrievalIndex, compose_query, load_index, query_nearest
from .text import EmbeddingConfig, embed_document, load_embedder
from .visual import TrainConfig


@dataclass
class EngineConfig:
    """Paths and hyperparameters for one engine deployment.

    Relative paths are resolved against the config file's directory when
    loaded from disk. embedding.seed and visual.seed inherit the engine
    seed unless the file sets them explicitly.
    """

    corpus: str = "corpus.jsonl"
    embedding: EmbeddingConfig = field(default_factory=EmbeddingConfig)
    visual: TrainConfig = field(default_factory=TrainConfig)
    aggregation: str = "mean"
    min_tag_count: int = 0
    text_model: str = "text_embedder.bin"
    visual_model: str = "visual_embedder.bin"
    index: str = "index.bin"
    loss_curve: str = "visual_loss.csv"
    reports_dir: str = "reports"
    ui_dir: str | None = None
    host: str = "127.0.0.1"
    port: int = 8000
    seed: int = 0

    def validate(self) -> "EngineConfig":
        if self.aggregation not in ("mean", "tfidf"):
            raise ConfigError(f"aggregation must be mean or tfidf, got {self.aggregation!r}")
        if self.min_tag_count < 0:
            raise ConfigError(f"min_tag_count must be >= 0, got {self.min_tag_count}")
        if not 1 <= self.port <= 65535:
            raise ConfigError(f"port must be in [1, 65535], got {self.port}")
        self.embedding.validate()
        self.visual.validate()
        return self

    def apply_seed(self, seed: int) -> None:
        """Force one seed everywhere (the CLI --seed override)."""
        self.seed = seed
        self.embedding.seed = seed
        self.visual.seed = seed


_PATH_FIELDS = ("corpus", "text_model", "visual_model", "index", "loss_curve",
                "reports_dir", "ui_dir")


def load_engine_config(path) -> EngineConfig:
    """Parse the JSON config file; unknown keys are an error."""
    with open(path, encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc.msg})") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: config must be a JSON object")
    known = set(EngineConfig.__dataclass_fields__)
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"{path}: unknown config keys {sorted(unknown)}")

    seed = int(raw.get("seed", 0))
    emb_raw = dict(raw.get("embedding", {}))
    vis_raw = dict(raw.get("visual", {}))
    emb_raw.setdefault("seed", seed)
    vis_raw.setdefault("seed", seed)
    if "hidden" in vis_raw:
        vis_raw["hidden"] = tuple(vis_raw["hidden"])
    kwargs = {k: v for k, v in raw.items() if k not in ("embedding", "visual")}
    try:
        config = EngineConfig(embedding=EmbeddingConfig.from_dict(emb_raw),
                              visual=TrainConfig(**vis_raw), **kwargs)
    except TypeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc

    base = os.path.dirname(os.path.abspath(path))
    for name in _PATH_FIELDS:
        value = getattr(config, name)
        if value is not None and not os.path.isabs(value):
            setattr(config, name, os.path.join(base, value))
    return config.validate()


def save_engine_config(config: EngineConfig, path) -> None:
    data = {
        "corpus": config.corpus,
        "embedding": config.embedding.to_dict(),
        "visual": {**config.visual.__dict__, "hidden": list(config.visual.hidden)},
        "aggregation": config.aggregation,
        "min_tag_count": config.min_tag_count,
        "text_model": config.text_model,
        "visual_model": config.visual_model,
        "index": config.index,
        "loss_curve": config.loss_curve,
        "reports_dir": config.reports_dir,
        "ui_dir": config.ui_dir,
        "host": config.host,
        "port": config.port,
        "seed": config.seed,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


@dataclass(frozen=True)
class EngineState:
    """One immutable artifact snapshot."""

    corpus: Corpus
    text_embedder: object
    stats: object
    index: RetrievalIndex
    aggregation: str


class Engine:
    """Loaded artifacts plus query execution, shared by CLI and service."""

    def __init__(self, config: EngineConfig):
        self.config = config
        self._state = self._load_state()

    def _load_state(self) -> EngineState:
        corpus = load_corpus(self.config.corpus)
        text_embedder = load_embedder(self.config.text_model)
        stats = None
        if self.config.aggregation == "tfidf":
            stats = compute_tfidf_stats(corpus, text_embedder.vocab)
        index = load_index(self.config.index)
        return EngineState(corpus, text_embedder, stats, index,
                           self.config.aggregation)

    @property
    def state(self) -> EngineState:
        return self._state

    def reload(self) -> EngineState:
        """Re-read all artifacts; readers see the old or new set, never a mix."""
        state = self._load_state()
        self._state = state
        return state

    def execute_query(self, terms: list[dict], k: int):
        """Run one structured query against the current snapshot.

        Each term is {"text": str, "weight": num} or {"image_id": str,
        "weight": num}. Returns (RankedResult, dropped-token list).
        """
        state = self._state
        return execute_query(state, terms, k)


def execute_query(state: EngineState, terms: list[dict], k: int):
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")
    if not terms:
        raise ValidationError("query needs at least one term")
    vec_terms = []
    dropped: list[str] = []
    for term in terms:
        weight = float(term.get("weight", 1.0))
        text = term.get("text")
        image_id = term.get("image_id")
        if (text is None) == (image_id is None):
            raise ValidationError("each term needs exactly one of text or image_id")
        if text is not None:
            tokens = tokenize(text)
            if not tokens:
                raise UnembeddableQueryError(f"term {text!r} has no tokens")
            dropped.extend(t for t in tokens
                           if not state.text_embedder.has_token(t))
            vec = embed_document(state.text_embedder, tokens,
                                 state.aggregation, state.stats)
            vec_terms.append((vec, weight))
        else:
            if image_id not in state.index:
                raise ValidationError(f"image id {image_id!r} is not indexed")
            vec_terms.append((np.asarray(state.index.vector(image_id),
                                         dtype=np.float64), weight))
    qvec = compose_query(vec_terms)
    return query_nearest(state.index, qvec, k), dropped


def parse_query_terms(text: str) -> list[dict]:
    """CLI mini-syntax for weighted terms.

    Whitespace separates terms. "word" adds with weight +1, "-word"
    subtracts, "+word" adds, "word:0.5" sets an explicit weight, and
    "img:ID" (optionally "img:ID:w") references an indexed image.
    """
    terms = []
    for chunk in text.split():
        weight = 1.0
        if chunk.startswith(("+", "-")):
            if chunk[0] == "-":
                weight = -1.0
            chunk = chunk[1:]
        if not chunk:
            raise ValidationError("empty query term")
        parts = chunk.split(":")
        if parts[0] == "img":
            if len(parts) == 2:
                terms.append({"image_id": parts[1], "weight": weight})
            elif len(parts) == 3:
                terms.append({"image_id": parts[1], "weight": weight * float(parts[2])})
            else:
                raise ValidationError(f"cannot parse image term {chunk!r}")
        elif len(parts) == 1:
            terms.append({"text": parts[0], "weight": weight})
        elif len(parts) == 2:
            try:
                explicit = float(parts[1])
            except ValueError as exc:
                raise ValidationError(f"bad weight in term {chunk!r}") from exc
            terms.append({"text": parts[0], "weight": weight * explicit})
        else:
            raise ValidationError(f"cannot parse term {chunk!r}")
    if not terms:
        raise ValidationError("query string has no terms")
    return terms
