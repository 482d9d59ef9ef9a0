"""Retrieval metrics and the three evaluation protocols.

Covers precision-at-5 over a fixed query list, mean average precision
with tag- and concept-based relevance, and the regression study relating
text-space distances to image-space distances over random document
pairs.
"""

from __future__ import annotations

import csv
import dataclasses
import json
from dataclasses import dataclass, field
from importlib import resources
from itertools import combinations

import numpy as np

from .corpus import Corpus, tokenize
from .errors import (DegenerateQueryError, PrerequisiteError,
                     UnembeddableQueryError, ValidationError)
from .retrieval import (RetrievalIndex, compose_query, cosine_similarity,
                        query_nearest)
from .text.base import embed_document
from .visual import VisualEmbedder, forward

CATEGORIES = ("urban", "weather", "food", "people")


@dataclass(frozen=True)
class QuerySpec:
    """One benchmark query: a single concept word or a pair of them."""

    words: tuple[str, ...]
    category: str
    complexity: str

    def __post_init__(self):
        if self.complexity not in ("simple", "complex"):
            raise ValidationError(f"complexity must be simple/complex, got {self.complexity!r}")
        want = 1 if self.complexity == "simple" else 2
        if len(self.words) != want:
            raise ValidationError(
                f"{self.complexity} query must have {want} word(s), got {list(self.words)}")


def load_query_fixture() -> list[QuerySpec]:
    """The 24 benchmark queries (12 simple, 12 complex, 4 categories)."""
    raw = resources.files("jointemb.data").joinpath("eval_queries.json").read_text("utf-8")
    return [QuerySpec(tuple(q["words"]), q["category"], q["complexity"])
            for q in json.loads(raw)]


def label_query_specs(corpus: Corpus, split: str | None = "test") -> list[QuerySpec]:
    """Queries derived from ground-truth labels, for generated corpora.

    Simple queries are the distinct labels; complex queries are label
    pairs that co-occur on at least one document of the split.
    """
    docs = corpus.split(split) if split else corpus.documents
    labels = sorted({lab for doc in docs for lab in (doc.labels or ())})
    pairs = sorted({pair for doc in docs
                    for pair in combinations(sorted(doc.labels or ()), 2)})
    return ([QuerySpec((lab,), "generated", "simple") for lab in labels]
            + [QuerySpec(pair, "generated", "complex") for pair in pairs])


@dataclass
class EvalReport:
    """Metrics from one protocol run; unused fields stay None/empty."""

    protocol: str
    per_query: list[dict] = field(default_factory=list)
    aggregates: dict = field(default_factory=dict)
    map_score: float | None = None
    r2: float | None = None
    metadata: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def write_json(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    def write_csv(self, path) -> None:
        """Tabular per-query rows followed by aggregate rows."""
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["query", "metric", "value"])
            for row in self.per_query:
                name = row.get("query", row.get("concept", ""))
                metric = "p5" if "p5" in row else "ap"
                writer.writerow([name, metric, row[metric]])
            for key, value in sorted(self.aggregates.items()):
                writer.writerow(["", key, value])
            if self.map_score is not None:
                writer.writerow(["", "map", self.map_score])
            if self.r2 is not None:
                writer.writerow(["", "r2", self.r2])


def precision_at_k(relevance, k: int) -> float:
    """Fraction of the first k results that are relevant.

    Shorter lists count their missing tail as irrelevant; an empty list
    scores 0 by convention.
    """
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")
    rel = list(relevance)[:k]
    return sum(bool(r) for r in rel) / k


def relevance_complex(query: QuerySpec, labels) -> bool:
    """True when the labels contain every query word (both, for pairs)."""
    labels = set(labels or ())
    return all(word in labels for word in query.words)


def average_precision(relevance) -> float:
    """Mean of precision-at-hit over relevant positions; 0 with no hits."""
    hits = 0
    total = 0.0
    for i, rel in enumerate(relevance, start=1):
        if rel:
            hits += 1
            total += hits / i
    return total / hits if hits else 0.0


def mean_average_precision(aps) -> float:
    aps = list(aps)
    if not aps:
        raise ValidationError("MAP needs at least one query")
    return float(np.mean(aps))


def r_squared(x, y) -> float:
    """Coefficient of determination of y regressed on x (least squares).

    Constant x leaves the slope undefined; constant y is fit exactly by a
    flat line, giving 1.0.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValidationError(f"x and y must be equal-length 1-d, got {x.shape}, {y.shape}")
    if x.shape[0] < 2:
        raise ValidationError("need at least 2 points")
    xc = x - x.mean()
    ss_x = float(np.dot(xc, xc))
    if ss_x == 0.0:
        raise ValidationError("x is constant; the regression is undefined")
    yc = y - y.mean()
    ss_tot = float(np.dot(yc, yc))
    if ss_tot == 0.0:
        return 1.0
    slope = float(np.dot(xc, yc)) / ss_x
    resid = yc - slope * xc
    return 1.0 - float(np.dot(resid, resid)) / ss_tot


def embed_query_words(text_embedder, words, aggregation="mean", stats=None,
                      weights=None) -> np.ndarray:
    """Compose a query vector from words with equal (or given) weights.

    Each word is tokenized and embedded on its own, then the unit vectors
    are combined; hyphenated words therefore embed as the mean of their
    parts.
    """
    words = list(words)
    if weights is None:
        weights = [1.0] * len(words)
    terms = []
    for word, weight in zip(words, weights):
        vec = embed_document(text_embedder, tokenize(word), aggregation, stats)
        terms.append((vec, weight))
    return compose_query(terms)


def eval_p5_suite(corpus: Corpus, index: RetrievalIndex, text_embedder,
                  queries: list[QuerySpec] | None = None,
                  aggregation: str = "mean", stats=None, k: int = 5) -> EvalReport:
    """Top-k precision per query with label-containment relevance.

    Aggregates are reported for all queries and the simple/complex
    subsets. A query that cannot be embedded scores 0 and is flagged.
    """
    if queries is None:
        queries = load_query_fixture()
    per_query = []
    for query in queries:
        flagged = None
        p5 = 0.0
        try:
            qvec = embed_query_words(text_embedder, query.words, aggregation, stats)
        except (UnembeddableQueryError, DegenerateQueryError) as exc:
            flagged = type(exc).__name__
        else:
            ranked = query_nearest(index, qvec, k)
            rel = [id_ in corpus
                   and relevance_complex(query, corpus.by_id(id_).labels)
                   for id_ in ranked.ids()]
            p5 = precision_at_k(rel, k)
        per_query.append({
            "query": " ".join(query.words),
            "category": query.category,
            "complexity": query.complexity,
            "p5": p5,
            "flagged": flagged,
        })
    def agg(rows):
        return float(np.mean([r["p5"] for r in rows])) if rows else 0.0
    aggregates = {
        "all": agg(per_query),
        "simple": agg([r for r in per_query if r["complexity"] == "simple"]),
        "complex": agg([r for r in per_query if r["complexity"] == "complex"]),
    }
    return EvalReport(protocol="p5", per_query=per_query, aggregates=aggregates,
                      metadata={"k": k, "aggregation": aggregation,
                                "relevance": "labels contain every query word"})


def eval_tag_query_map(corpus: Corpus, index: RetrievalIndex, text_embedder,
                       query_fraction: float = 0.05, aggregation: str = "mean",
                       stats=None, seed: int = 0) -> EvalReport:
    """MAP where each query is a document's tags, shared-tag relevance.

    The indexed pool is split into a query set (query_fraction) and a
    retrieval set; a retrieved document is relevant when it shares at
    least one tag with the query document. Alternate split fractions
    reproduce the other protocol variants.
    """
    if not 0 < query_fraction < 1:
        raise ValidationError(f"query_fraction must be in (0, 1), got {query_fraction}")
    pool = [id_ for id_ in index.ids
            if id_ in corpus and corpus.by_id(id_).tags]
    if len(pool) < 2:
        raise PrerequisiteError("need at least 2 indexed documents with tags")
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(pool))
    n_query = max(1, int(round(query_fraction * len(pool))))
    query_ids = [pool[i] for i in order[:n_query]]
    retrieval_ids = [pool[i] for i in order[n_query:]]
    if not retrieval_ids:
        raise ValidationError("query_fraction leaves an empty retrieval set")
    sub_index = RetrievalIndex(retrieval_ids,
                               np.vstack([index.vector(i) for i in retrieval_ids]))
    per_query = []
    aps = []
    for qid in query_ids:
        qdoc = corpus.by_id(qid)
        tags = sorted(qdoc.tags)
        flagged = None
        ap = 0.0
        tokens = [t for tag in tags for t in tokenize(tag)]
        try:
            qvec = embed_document(text_embedder, tokens, aggregation, stats)
        except UnembeddableQueryError as exc:
            flagged = type(exc).__name__
        else:
            ranked = query_nearest(sub_index, qvec, len(sub_index))
            rel = [bool(qdoc.tags & corpus.by_id(id_).tags) for id_ in ranked.ids()]
            ap = average_precision(rel)
        aps.append(ap)
        per_query.append({"query": qid, "ap": ap, "flagged": flagged})
    return EvalReport(
        protocol="tagmap", per_query=per_query,
        map_score=mean_average_precision(aps),
        metadata={"query_fraction": query_fraction, "seed": seed,
                  "aggregation": aggregation,
                  "relevance": "shares at least one tag with the query document",
                  "n_query": len(query_ids), "n_retrieval": len(retrieval_ids)})


def eval_concept_ap(corpus: Corpus, index: RetrievalIndex, text_embedder,
                    concepts: list[str], aggregation: str = "mean",
                    stats=None) -> EvalReport:
    """Per-concept AP ranking the whole index by the concept-name query."""
    if not concepts:
        raise ValidationError("need at least one concept")
    missing_labels = all(corpus.by_id(id_).labels is None
                         for id_ in index.ids if id_ in corpus)
    if missing_labels:
        raise PrerequisiteError("indexed documents carry no ground-truth labels")
    per_query = []
    aps = []
    for concept in concepts:
        flagged = None
        ap = 0.0
        try:
            qvec = embed_document(text_embedder, tokenize(concept), aggregation, stats)
        except UnembeddableQueryError as exc:
            flagged = type(exc).__name__
        else:
            ranked = query_nearest(index, qvec, len(index))
            rel = [concept in (corpus.by_id(id_).labels or ())
                   for id_ in ranked.ids()]
            ap = average_precision(rel)
        aps.append(ap)
        per_query.append({"concept": concept, "ap": ap, "flagged": flagged})
    return EvalReport(
        protocol="conceptap", per_query=per_query,
        map_score=mean_average_precision(aps),
        metadata={"aggregation": aggregation,
                  "relevance": "item labels contain the query concept"})


@dataclass
class PairSample:
    """Normalized pairwise distances with shared-tag counts."""

    text_dist: np.ndarray
    image_dist: np.ndarray
    shared_tags: np.ndarray

    def __len__(self) -> int:
        return len(self.shared_tags)

    def bucket(self, count: int) -> int:
        """Plot bucket: 0, 1, 2, 3 shared tags, or 4 meaning >= 4."""
        return min(int(count), 4)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["text_dist", "image_dist", "shared_tags"])
            for t, i, s in zip(self.text_dist, self.image_dist, self.shared_tags):
                writer.writerow([f"{t:.10g}", f"{i:.10g}", int(s)])


def _minmax(values: np.ndarray, what: str) -> np.ndarray:
    lo = float(values.min())
    hi = float(values.max())
    if hi - lo <= 0:
        raise ValidationError(f"{what} distances are constant; cannot normalize")
    return (values - lo) / (hi - lo)


def distance_correlation_study(corpus: Corpus, text_embedder,
                               visual_embedder: VisualEmbedder, n_pairs: int,
                               seed: int = 0, aggregation: str = "mean",
                               stats=None, split: str | None = None):
    """Relate text-space distances to image-space distances over pairs.

    Samples n_pairs random document pairs, computes the cosine distance
    between their text embeddings and between their image embeddings,
    min-max normalizes each axis over the sample, and regresses image
    distance on text distance. Returns (PairSample, r2).
    """
    if n_pairs < 2:
        raise ValidationError(f"n_pairs must be >= 2, got {n_pairs}")
    docs = corpus.documents if split is None else corpus.split(split)
    docs = [d for d in docs if d.features is not None and d.tags]
    if len(docs) < 2:
        raise PrerequisiteError("need at least 2 documents with features and tags")

    text_vecs = []
    image_vecs = []
    kept = []
    for doc in docs:
        try:
            tvec = embed_document(text_embedder, doc.tokens(), aggregation, stats)
        except UnembeddableQueryError:
            continue
        text_vecs.append(tvec)
        image_vecs.append(forward(visual_embedder, np.asarray(doc.features)))
        kept.append(doc)
    if len(kept) < 2:
        raise PrerequisiteError("fewer than 2 embeddable documents")

    rng = np.random.default_rng(seed)
    n = len(kept)
    first = np.empty(n_pairs, dtype=np.int64)
    second = np.empty(n_pairs, dtype=np.int64)
    for p in range(n_pairs):
        i = int(rng.integers(0, n))
        j = int(rng.integers(0, n))
        while j == i:
            j = int(rng.integers(0, n))
        first[p], second[p] = i, j

    tdist = np.empty(n_pairs)
    idist = np.empty(n_pairs)
    shared = np.empty(n_pairs, dtype=np.int64)
    for p in range(n_pairs):
        i, j = int(first[p]), int(second[p])
        tdist[p] = 1.0 - cosine_similarity(text_vecs[i], text_vecs[j])
        idist[p] = 1.0 - cosine_similarity(image_vecs[i], image_vecs[j])
        shared[p] = len(kept[i].tags & kept[j].tags)

    tdist = _minmax(tdist, "text")
    idist = _minmax(idist, "image")
    sample = PairSample(tdist, idist, shared)
    return sample, r_squared(tdist, idist)
