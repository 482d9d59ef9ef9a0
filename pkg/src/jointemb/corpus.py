"""Corpus loading, tokenization, vocabulary, tf-idf stats, synthetic data.

The ingestion format is UTF-8 JSON Lines, one document per line:

    {"id": str, "caption": str, "tags": [str], "features": [num]?,
     "labels": [str]?, "split": "train"|"val"|"test", "image_url": str?}

``image_url`` is an optional passthrough used only by the explorer UI.
A document's token stream is its caption tokens followed by its tags
(tokenized, in sorted tag order).
"""

from __future__ import annotations

import json
import math
import re
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .errors import CorpusFormatError, ValidationError

SPLITS = ("train", "val", "test")

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


def tokenize(text: str) -> list[str]:
    """Lowercase and split on non-alphanumeric runs; drops empty tokens.

    Hashtag markers, punctuation, and underscores all act as separators,
    so the function is idempotent on the space-joined output.
    """
    return _TOKEN_RE.findall(text.lower())


@dataclass(frozen=True)
class Document:
    """One image-text pair; features stand in for the raw image."""

    id: str
    caption: str
    tags: frozenset[str]
    features: tuple[float, ...] | None = None
    labels: frozenset[str] | None = None
    split: str = "train"
    image_url: str | None = None

    def tokens(self) -> list[str]:
        """Caption tokens followed by tokenized tags in sorted tag order."""
        out = tokenize(self.caption)
        for tag in sorted(self.tags):
            out.extend(tokenize(tag))
        return out


class Corpus:
    """Immutable ordered collection of documents with unique ids."""

    def __init__(self, documents: list[Document]):
        self.documents = list(documents)
        self._by_id: dict[str, Document] = {}
        feature_dim = None
        for doc in self.documents:
            if doc.id in self._by_id:
                raise ValidationError(f"duplicate document id {doc.id!r}")
            if doc.split not in SPLITS:
                raise ValidationError(
                    f"document {doc.id!r}: split must be one of {SPLITS}, got {doc.split!r}"
                )
            if doc.features is not None:
                if feature_dim is None:
                    feature_dim = len(doc.features)
                elif len(doc.features) != feature_dim:
                    raise ValidationError(
                        f"document {doc.id!r}: feature length {len(doc.features)} "
                        f"!= expected {feature_dim}"
                    )
            self._by_id[doc.id] = doc
        self.feature_dim = feature_dim

    def __len__(self) -> int:
        return len(self.documents)

    def __iter__(self):
        return iter(self.documents)

    def __eq__(self, other) -> bool:
        return isinstance(other, Corpus) and self.documents == other.documents

    def by_id(self, doc_id: str) -> Document:
        return self._by_id[doc_id]

    def __contains__(self, doc_id: str) -> bool:
        return doc_id in self._by_id

    def split(self, name: str) -> list[Document]:
        return [d for d in self.documents if d.split == name]

    def feature_matrix(self, docs: list[Document]) -> np.ndarray:
        missing = [d.id for d in docs if d.features is None]
        if missing:
            raise ValidationError(
                f"{len(missing)} document(s) lack features: {missing[:10]}"
            )
        return np.array([d.features for d in docs], dtype=np.float64)


_REQUIRED_KEYS = {"id", "caption", "tags", "split"}
_ALLOWED_KEYS = _REQUIRED_KEYS | {"features", "labels", "image_url"}


def _document_from_record(rec: dict, line_no: int) -> Document:
    if not isinstance(rec, dict):
        raise CorpusFormatError("record is not a JSON object", line_no)
    unknown = set(rec) - _ALLOWED_KEYS
    if unknown:
        raise CorpusFormatError(f"unknown keys {sorted(unknown)}", line_no)
    missing = _REQUIRED_KEYS - set(rec)
    if missing:
        raise CorpusFormatError(f"missing keys {sorted(missing)}", line_no)
    if not isinstance(rec["id"], str) or not isinstance(rec["caption"], str):
        raise CorpusFormatError("id and caption must be strings", line_no)
    tags = rec["tags"]
    if not isinstance(tags, list) or not all(isinstance(t, str) for t in tags):
        raise CorpusFormatError("tags must be a list of strings", line_no)
    if rec["split"] not in SPLITS:
        raise CorpusFormatError(f"split must be one of {SPLITS}", line_no)
    features = rec.get("features")
    if features is not None:
        if not isinstance(features, list) or not all(
            isinstance(x, (int, float)) and not isinstance(x, bool) for x in features
        ):
            raise CorpusFormatError("features must be a list of numbers", line_no)
        features = tuple(float(x) for x in features)
    labels = rec.get("labels")
    if labels is not None:
        if not isinstance(labels, list) or not all(isinstance(x, str) for x in labels):
            raise CorpusFormatError("labels must be a list of strings", line_no)
        labels = frozenset(labels)
    image_url = rec.get("image_url")
    if image_url is not None and not isinstance(image_url, str):
        raise CorpusFormatError("image_url must be a string", line_no)
    return Document(
        id=rec["id"],
        caption=rec["caption"],
        tags=frozenset(tags),
        features=features,
        labels=labels,
        split=rec["split"],
        image_url=image_url,
    )


def load_corpus(path) -> Corpus:
    """Parse a JSON-lines corpus file; input order is preserved."""
    docs = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"invalid JSON ({exc.msg})", line_no) from exc
            doc = _document_from_record(rec, line_no)
            if doc.id in seen:
                raise ValidationError(f"duplicate document id {doc.id!r} (line {line_no})")
            seen.add(doc.id)
            docs.append(doc)
    return Corpus(docs)


def _document_to_record(doc: Document) -> dict:
    rec: dict = {
        "id": doc.id,
        "caption": doc.caption,
        "tags": sorted(doc.tags),
    }
    if doc.features is not None:
        rec["features"] = list(doc.features)
    if doc.labels is not None:
        rec["labels"] = sorted(doc.labels)
    rec["split"] = doc.split
    if doc.image_url is not None:
        rec["image_url"] = doc.image_url
    return rec


def save_corpus(corpus: Corpus, path) -> None:
    """Write JSON lines; deterministic byte output for equal corpora."""
    with open(path, "w", encoding="utf-8") as fh:
        for doc in corpus:
            fh.write(json.dumps(_document_to_record(doc), ensure_ascii=False))
            fh.write("\n")


class Vocabulary:
    """Dense token ids ordered by descending frequency, ties lexicographic."""

    def __init__(self, tokens: list[str], counts: list[int], doc_freqs: list[int]):
        self.id_to_token = list(tokens)
        self.token_to_id = {t: i for i, t in enumerate(tokens)}
        self.counts = np.asarray(counts, dtype=np.int64)
        self.doc_freqs = np.asarray(doc_freqs, dtype=np.int64)

    def __len__(self) -> int:
        return len(self.id_to_token)

    def __contains__(self, token: str) -> bool:
        return token in self.token_to_id

    def encode(self, tokens: list[str]) -> list[int]:
        """Map tokens to ids, silently dropping out-of-vocabulary tokens."""
        t2i = self.token_to_id
        return [t2i[t] for t in tokens if t in t2i]


def build_vocabulary(corpus: Corpus, min_count: int = 1,
                     split: str | None = "train") -> Vocabulary:
    """Retain tokens whose corpus frequency is >= min_count.

    Counts run over the given split (None = all documents). Raises if no
    token survives.
    """
    if min_count < 1:
        raise ValidationError(f"min_count must be >= 1, got {min_count}")
    docs = corpus.documents if split is None else corpus.split(split)
    counts: Counter[str] = Counter()
    doc_freqs: Counter[str] = Counter()
    for doc in docs:
        toks = doc.tokens()
        counts.update(toks)
        doc_freqs.update(set(toks))
    kept = sorted(
        (t for t, c in counts.items() if c >= min_count),
        key=lambda t: (-counts[t], t),
    )
    if not kept:
        raise ValidationError(
            f"no token reaches min_count={min_count} over {len(docs)} document(s)"
        )
    return Vocabulary(kept, [counts[t] for t in kept], [doc_freqs[t] for t in kept])


@dataclass
class TfIdfStats:
    """Smoothed idf per vocabulary token plus per-document raw term counts.

    idf(t) = ln(N / (1 + df(t))) + 1 over the N training documents; the
    smoothing keeps idf finite and the +1 keeps it strictly positive for
    df < N, and exactly idf = ln(N/(N+1)) + 1 > 0 for a token present in
    every document.
    """

    idf: np.ndarray
    n_documents: int
    doc_term_counts: dict[str, dict[int, int]] = field(default_factory=dict)

    def idf_of(self, token_id: int) -> float:
        return float(self.idf[token_id])


def compute_tfidf_stats(corpus: Corpus, vocab: Vocabulary,
                        split: str | None = "train") -> TfIdfStats:
    """Document frequencies and idf over the training split."""
    docs = corpus.documents if split is None else corpus.split(split)
    n = len(docs)
    df = np.zeros(len(vocab), dtype=np.int64)
    doc_term_counts: dict[str, dict[int, int]] = {}
    for doc in docs:
        ids = vocab.encode(doc.tokens())
        tf = Counter(ids)
        doc_term_counts[doc.id] = dict(tf)
        for tid in tf:
            df[tid] += 1
    idf = np.log(n / (1.0 + df)) + 1.0
    return TfIdfStats(idf=idf, n_documents=n, doc_term_counts=doc_term_counts)


def filter_low_frequency_tags(corpus: Corpus, min_tag_count: int = 20) -> Corpus:
    """Drop rare tags, then drop documents left without tags or labels.

    Tags with corpus-wide occurrence count < min_tag_count are removed from
    every document; documents whose tag set or label set becomes empty (or
    was absent) are removed. May return an empty corpus.
    """
    tag_counts: Counter[str] = Counter()
    for doc in corpus:
        tag_counts.update(doc.tags)
    kept_tags = {t for t, c in tag_counts.items() if c >= min_tag_count}
    out = []
    for doc in corpus:
        tags = doc.tags & kept_tags
        if not tags or not doc.labels:
            continue
        out.append(Document(
            id=doc.id, caption=doc.caption, tags=frozenset(tags),
            features=doc.features, labels=doc.labels, split=doc.split,
            image_url=doc.image_url,
        ))
    return Corpus(out)


def generate_synthetic_corpus(n_concepts: int, words_per_concept: int,
                              n_docs: int, feature_dim: int,
                              noise_sigma: float, seed: int) -> Corpus:
    """Deterministic concept-mixture corpus for desk-scale experiments.

    Each document draws 1-3 concepts; its caption samples words from those
    concepts' vocabularies, its tags and labels are the concept names, and
    its feature vector is the sum of per-concept indicator basis vectors
    plus Gaussian noise. Splits are assigned 80/10/10.
    """
    if min(n_concepts, words_per_concept, n_docs, feature_dim) < 1:
        raise ValidationError("all synthetic corpus counts must be positive")
    if feature_dim < n_concepts:
        raise ValidationError(
            f"feature_dim ({feature_dim}) must be >= n_concepts ({n_concepts})"
        )
    rng = np.random.default_rng(seed)
    concept_names = [f"concept{c:02d}" for c in range(n_concepts)]
    concept_words = [
        [f"c{c:02d}w{w:02d}" for w in range(words_per_concept)]
        for c in range(n_concepts)
    ]
    docs = []
    for i in range(n_docs):
        k = int(rng.integers(1, min(3, n_concepts) + 1))
        concepts = sorted(rng.choice(n_concepts, size=k, replace=False).tolist())
        pool = [w for c in concepts for w in concept_words[c]]
        n_words = int(rng.integers(5, 11))
        caption = " ".join(pool[int(j)] for j in rng.integers(0, len(pool), n_words))
        features = np.zeros(feature_dim)
        for c in concepts:
            features[c] = 1.0
        if noise_sigma > 0:
            features = features + rng.normal(0.0, noise_sigma, feature_dim)
        u = rng.random()
        split = "train" if u < 0.8 else ("val" if u < 0.9 else "test")
        names = [concept_names[c] for c in concepts]
        docs.append(Document(
            id=f"doc{i:06d}",
            caption=caption,
            tags=frozenset(names),
            features=tuple(float(x) for x in features),
            labels=frozenset(names),
            split=split,
        ))
    return Corpus(docs)
