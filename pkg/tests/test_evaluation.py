"""Ranking metrics, the three evaluation protocols, the pair-distance study."""

import itertools
import json

import numpy as np
import pytest

from jointemb.corpus import Corpus, generate_synthetic_corpus
from jointemb.errors import PrerequisiteError, ValidationError
from jointemb.evaluation import (CATEGORIES, EvalReport, QuerySpec,
                                 average_precision, distance_correlation_study,
                                 eval_concept_ap, eval_p5_suite,
                                 eval_tag_query_map, label_query_specs,
                                 load_query_fixture, mean_average_precision,
                                 precision_at_k, r_squared, relevance_complex)
from jointemb.retrieval import build_index
from jointemb.text import EmbeddingConfig, train_text_embedder
from jointemb.visual import VisualEmbedder
from conftest import make_doc


# ----------------------------------------------------------------- p@k, AP

def test_precision_at_k_hand_cases():
    assert precision_at_k([1, 1, 0, 1, 0], 5) == pytest.approx(0.6)
    assert precision_at_k([True] * 5, 5) == 1.0
    assert precision_at_k([False] * 5, 5) == 0.0
    assert precision_at_k([1, 0], 5) == pytest.approx(0.2)  # short list
    assert precision_at_k([], 5) == 0.0
    assert precision_at_k([1, 1, 1, 0, 0, 1, 1], 3) == 1.0  # tail ignored


def test_precision_at_k_counting_oracle(rng):
    for _ in range(200):
        n = int(rng.integers(0, 12))
        rel = [bool(b) for b in rng.integers(0, 2, n)]
        k = int(rng.integers(1, 9))
        assert precision_at_k(rel, k) == sum(rel[:k]) / k


def test_precision_at_k_invalid_k():
    with pytest.raises(ValidationError):
        precision_at_k([1], 0)


def test_average_precision_hand_cases():
    assert average_precision([1, 0, 1]) == pytest.approx((1 / 1 + 2 / 3) / 2)
    assert average_precision([1, 0, 1]) == pytest.approx(0.83333, abs=5e-6)
    assert average_precision([0, 0, 0]) == 0.0
    assert average_precision([]) == 0.0
    assert average_precision([1, 1, 1]) == 1.0
    assert average_precision([0, 1]) == pytest.approx(0.5)


def test_average_precision_counting_oracle(rng):
    for _ in range(200):
        rel = [bool(b) for b in rng.integers(0, 2, int(rng.integers(1, 15)))]
        hits = 0
        expected = 0.0
        for pos, r in enumerate(rel, 1):
            if r:
                hits += 1
                expected += hits / pos
        expected = expected / hits if hits else 0.0
        assert average_precision(rel) == pytest.approx(expected, abs=1e-12)


def test_average_precision_front_loading_is_maximal():
    # over all orderings of a fixed relevance multiset, relevant-first wins
    for n_rel in (1, 2, 3):
        base = [1] * n_rel + [0] * (6 - n_rel)
        best = average_precision(base)
        for perm in set(itertools.permutations(base)):
            assert average_precision(list(perm)) <= best + 1e-12


def test_mean_average_precision():
    assert mean_average_precision([1.0, 0.5, 0.0]) == pytest.approx(0.5)
    with pytest.raises(ValidationError):
        mean_average_precision([])


# --------------------------------------------------------------- r squared

def test_r_squared_exact_line():
    x = np.arange(10, dtype=float)
    assert r_squared(x, 2 * x + 1) == pytest.approx(1.0, abs=1e-12)
    assert r_squared(x, -3 * x + 7) == pytest.approx(1.0, abs=1e-12)


def test_r_squared_uncorrelated_is_small(rng):
    x = rng.standard_normal(5000)
    y = rng.standard_normal(5000)
    assert r_squared(x, y) < 0.01


def test_r_squared_five_point_hand_value():
    x = np.array([1.0, 2.0, 3.0, 4.0, 5.0])
    y = np.array([2.0, 3.9, 6.2, 8.0, 9.9])
    xc, yc = x - x.mean(), y - y.mean()
    slope = (xc @ yc) / (xc @ xc)
    resid = yc - slope * xc
    expected = 1 - (resid @ resid) / (yc @ yc)
    assert r_squared(x, y) == pytest.approx(expected, abs=1e-12)


def test_r_squared_affine_invariance(rng):
    x = rng.standard_normal(50)
    y = 0.3 * x + rng.standard_normal(50) * 0.5
    base = r_squared(x, y)
    assert r_squared(3 * x - 2, y) == pytest.approx(base, abs=1e-10)
    assert r_squared(x, -0.5 * y + 4) == pytest.approx(base, abs=1e-10)


def test_r_squared_constant_inputs():
    with pytest.raises(ValidationError, match="constant"):
        r_squared([1.0, 1.0, 1.0], [1.0, 2.0, 3.0])
    assert r_squared([1.0, 2.0, 3.0], [5.0, 5.0, 5.0]) == 1.0


def test_r_squared_shape_checks():
    with pytest.raises(ValidationError):
        r_squared([1.0], [2.0])
    with pytest.raises(ValidationError):
        r_squared([1.0, 2.0], [1.0, 2.0, 3.0])


# ----------------------------------------------------------- query fixture

def test_fixture_has_24_queries_12_12():
    qs = load_query_fixture()
    assert len(qs) == 24
    assert sum(q.complexity == "simple" for q in qs) == 12
    assert sum(q.complexity == "complex" for q in qs) == 12
    for cat in CATEGORIES:
        assert sum(q.category == cat for q in qs) == 6


def test_query_spec_word_count_enforced():
    with pytest.raises(ValidationError):
        QuerySpec(("a", "b"), "urban", "simple")
    with pytest.raises(ValidationError):
        QuerySpec(("a",), "urban", "complex")
    with pytest.raises(ValidationError):
        QuerySpec(("a",), "urban", "weird")


def test_relevance_complex():
    q1 = QuerySpec(("beach",), "weather", "simple")
    q2 = QuerySpec(("beach", "sunset"), "weather", "complex")
    assert relevance_complex(q1, {"beach", "sand"})
    assert not relevance_complex(q1, {"sand"})
    assert relevance_complex(q2, {"beach", "sunset", "x"})
    assert not relevance_complex(q2, {"beach"})  # both words required
    assert not relevance_complex(q2, None)


def test_label_query_specs_from_synthetic(synth_corpus):
    qs = label_query_specs(synth_corpus)
    simple = [q for q in qs if q.complexity == "simple"]
    complex_ = [q for q in qs if q.complexity == "complex"]
    labels = {lab for doc in synth_corpus.split("test") for lab in doc.labels}
    assert {q.words[0] for q in simple} == labels
    # every complex pair co-occurs on some test document
    for q in complex_:
        assert any(set(q.words) <= set(d.labels)
                   for d in synth_corpus.split("test"))


# ---------------------------------------------------------------- p5 suite

@pytest.fixture(scope="module")
def small_engine_parts():
    corpus = generate_synthetic_corpus(
        n_concepts=4, words_per_concept=10, n_docs=900, feature_dim=8,
        noise_sigma=0.03, seed=9)
    embedder = train_text_embedder(
        corpus, EmbeddingConfig(dim=24, epochs=8, seed=3, window=4))
    items = []
    for doc in corpus.split("test"):
        from jointemb.text.base import embed_document
        items.append((doc.id, embed_document(embedder, doc.tokens(), "mean")))
    return corpus, build_index(items), embedder


def test_eval_p5_saturated_ranking(small_engine_parts):
    corpus, index, embedder = small_engine_parts
    queries = label_query_specs(corpus)
    report = eval_p5_suite(corpus, index, embedder, queries=queries)
    # text-only round trip on a clean synthetic corpus is near-perfect
    assert report.aggregates["simple"] >= 0.9
    assert report.protocol == "p5"
    assert len(report.per_query) == len(queries)


def test_eval_p5_per_query_recomputation(small_engine_parts):
    from jointemb.evaluation import embed_query_words
    from jointemb.retrieval import query_nearest
    corpus, index, embedder = small_engine_parts
    queries = label_query_specs(corpus)[:6]
    report = eval_p5_suite(corpus, index, embedder, queries=queries)
    for spec, row in zip(queries, report.per_query):
        qvec = embed_query_words(embedder, spec.words)
        ranked = query_nearest(index, qvec, 5)
        rel = [relevance_complex(spec, corpus.by_id(i).labels)
               for i in ranked.ids()]
        assert row["p5"] == pytest.approx(precision_at_k(rel, 5))


def test_eval_p5_unembeddable_query_flagged(small_engine_parts):
    corpus, index, embedder = small_engine_parts
    queries = [QuerySpec(("zzzunknownzzz",), "generated", "simple")]
    report = eval_p5_suite(corpus, index, embedder, queries=queries)
    assert report.per_query[0]["p5"] == 0.0
    assert report.per_query[0]["flagged"] == "UnembeddableQueryError"
    assert report.aggregates["all"] == 0.0


def test_eval_p5_aggregates_are_means(small_engine_parts):
    corpus, index, embedder = small_engine_parts
    report = eval_p5_suite(corpus, index, embedder,
                           queries=label_query_specs(corpus))
    vals = [r["p5"] for r in report.per_query]
    assert report.aggregates["all"] == pytest.approx(np.mean(vals))


# ----------------------------------------------------------------- tag MAP

def _tagged_fixture_parts():
    """20 docs in two tag families, embedded along coordinate axes."""
    docs = []
    vecs = {}
    for i in range(10):
        id_ = f"sea{i:02d}"
        docs.append(make_doc(id_, "water", tags=("ocean",), split="test"))
        vecs[id_] = np.array([1.0, 0.01 * i, 0.0])
    for i in range(10):
        id_ = f"hill{i:02d}"
        docs.append(make_doc(id_, "rock", tags=("mountain",), split="test"))
        vecs[id_] = np.array([0.0, 0.01 * i, 1.0])
    corpus = Corpus(docs)
    index = build_index(sorted(vecs.items()))
    return corpus, index, vecs


class _AxisEmbedder:
    """Tiny stand-in: fixed vector per token, mean over tokens."""

    native_document_inference = False

    def __init__(self, table):
        self.table = table
        self.dim = len(next(iter(table.values()))) if table else 3

    def token_vector(self, token):
        return self.table.get(token)


def test_eval_tag_query_map_matches_brute_force():
    corpus, index, vecs = _tagged_fixture_parts()
    table = {"ocean": np.array([1.0, 0.0, 0.0]),
             "mountain": np.array([0.0, 0.0, 1.0]),
             "water": np.array([1.0, 0.0, 0.0]),
             "rock": np.array([0.0, 0.0, 1.0])}
    embedder = _AxisEmbedder(table)
    report = eval_tag_query_map(corpus, index, embedder,
                                query_fraction=0.2, seed=5)
    assert report.protocol == "tagmap"
    assert report.metadata["n_query"] == 4
    assert report.metadata["n_retrieval"] == 16
    # queries hit their own family first: every AP is 1.0 here
    for row in report.per_query:
        assert row["ap"] == pytest.approx(1.0)
    assert report.map_score == pytest.approx(1.0)


def test_eval_tag_query_map_brute_force_ap_recomputation():
    from jointemb.retrieval import RetrievalIndex, query_nearest
    corpus, index, vecs = _tagged_fixture_parts()
    table = {"ocean": np.array([1.0, 0.2, 0.0]),
             "mountain": np.array([0.0, 0.2, 1.0]),
             "water": np.array([1.0, 0.0, 0.0]),
             "rock": np.array([0.0, 0.0, 1.0])}
    embedder = _AxisEmbedder(table)
    report = eval_tag_query_map(corpus, index, embedder,
                                query_fraction=0.2, seed=11)
    rng = np.random.default_rng(11)
    pool = [i for i in index.ids if corpus.by_id(i).tags]
    order = rng.permutation(len(pool))
    n_query = max(1, int(round(0.2 * len(pool))))
    query_ids = [pool[i] for i in order[:n_query]]
    retr = [pool[i] for i in order[n_query:]]
    sub = RetrievalIndex(retr, np.vstack([index.vector(i) for i in retr]))
    assert [r["query"] for r in report.per_query] == query_ids
    for row in report.per_query:
        qdoc = corpus.by_id(row["query"])
        qvec = table[sorted(qdoc.tags)[0]]
        ranked = query_nearest(sub, qvec, len(sub))
        rel = [bool(qdoc.tags & corpus.by_id(i).tags) for i in ranked.ids()]
        assert row["ap"] == pytest.approx(average_precision(rel))


def test_eval_tag_query_map_bad_fraction():
    corpus, index, _ = _tagged_fixture_parts()
    with pytest.raises(ValidationError):
        eval_tag_query_map(corpus, index, _AxisEmbedder({}), query_fraction=0.0)
    with pytest.raises(ValidationError):
        eval_tag_query_map(corpus, index, _AxisEmbedder({}), query_fraction=1.0)


# -------------------------------------------------------------- concept AP

def test_eval_concept_ap_oracle():
    # 3 concepts, 10 items with known label sets, hand-placed vectors
    docs, items = [], []
    axes = {"red": 0, "green": 1, "blue": 2}
    layout = [
        ("i0", ("red",), [1.0, 0.0, 0.0]),
        ("i1", ("red",), [0.9, 0.1, 0.0]),
        ("i2", ("red", "green"), [0.7, 0.7, 0.0]),
        ("i3", ("green",), [0.0, 1.0, 0.0]),
        ("i4", ("green",), [0.1, 0.9, 0.0]),
        ("i5", ("blue",), [0.0, 0.0, 1.0]),
        ("i6", ("blue",), [0.0, 0.1, 0.9]),
        ("i7", ("blue", "red"), [0.6, 0.0, 0.6]),
        ("i8", (), [0.4, 0.4, 0.4]),
        ("i9", ("green", "blue"), [0.0, 0.7, 0.7]),
    ]
    for id_, labels, vec in layout:
        docs.append(make_doc(id_, "x", labels=labels, split="test"))
        items.append((id_, np.array(vec)))
    corpus = Corpus(docs)
    index = build_index(items)
    table = {c: np.eye(3)[i] for c, i in axes.items()}
    report = eval_concept_ap(corpus, index, _AxisEmbedder(table),
                             concepts=["red", "green", "blue"])
    from jointemb.retrieval import query_nearest
    expected = []
    for concept in ["red", "green", "blue"]:
        ranked = query_nearest(index, table[concept], len(index))
        rel = [concept in (corpus.by_id(i).labels or ()) for i in ranked.ids()]
        expected.append(average_precision(rel))
    got = [r["ap"] for r in report.per_query]
    np.testing.assert_allclose(got, expected, atol=1e-12)
    assert report.map_score == pytest.approx(np.mean(expected))


def test_eval_concept_ap_unembeddable_scores_zero():
    corpus, index, _ = _tagged_fixture_parts()
    labeled = Corpus([make_doc(d.id, d.caption, tags=sorted(d.tags),
                               labels=("ocean",), split="test")
                      for d in corpus.documents])
    report = eval_concept_ap(labeled, index, _AxisEmbedder({}),
                             concepts=["nowhere"])
    assert report.per_query[0]["ap"] == 0.0
    assert report.per_query[0]["flagged"] == "UnembeddableQueryError"


def test_eval_concept_ap_requires_labels():
    corpus, index, _ = _tagged_fixture_parts()  # tag-only documents
    with pytest.raises(PrerequisiteError):
        eval_concept_ap(corpus, index, _AxisEmbedder({}), concepts=["ocean"])


# ---------------------------------------------------------- distance study

class _IdentityVisual(VisualEmbedder):
    pass


def _identity_net(d):
    return VisualEmbedder([d, d], [np.eye(d)], [np.zeros(d)])


def test_distance_study_perfect_mapping_r2_one():
    # image features equal the text embedding and the net is identity, so
    # both axes carry the same distances up to min-max scaling
    rng = np.random.default_rng(2)
    table = {}
    docs = []
    for i in range(30):
        word = f"w{i:02d}"
        table[word] = rng.standard_normal(4)
        docs.append(make_doc(f"d{i:02d}", word, tags=(f"t{i % 5}",),
                             features=tuple(table[word]), split="test"))
    corpus = Corpus(docs)
    sample, r2 = distance_correlation_study(
        corpus, _AxisEmbedder(table), _identity_net(4), n_pairs=200, seed=3)
    assert r2 == pytest.approx(1.0, abs=1e-9)
    np.testing.assert_allclose(sample.text_dist, sample.image_dist, atol=1e-9)


def test_distance_study_same_seed_identical():
    rng = np.random.default_rng(4)
    table = {f"w{i}": rng.standard_normal(4) for i in range(20)}
    docs = [make_doc(f"d{i}", f"w{i}", tags=(f"t{i % 3}",),
                     features=tuple(rng.standard_normal(4)), split="test")
            for i in range(20)]
    corpus = Corpus(docs)
    net = _identity_net(4)
    s1, r1 = distance_correlation_study(corpus, _AxisEmbedder(table), net,
                                        n_pairs=100, seed=7)
    s2, r2 = distance_correlation_study(corpus, _AxisEmbedder(table), net,
                                        n_pairs=100, seed=7)
    assert r1 == r2
    np.testing.assert_array_equal(s1.text_dist, s2.text_dist)
    np.testing.assert_array_equal(s1.shared_tags, s2.shared_tags)


def test_distance_study_shared_tag_counts_and_buckets():
    rng = np.random.default_rng(5)
    table = {f"w{i}": rng.standard_normal(3) for i in range(10)}
    docs = [make_doc(f"d{i}", f"w{i}",
                     tags=tuple(f"t{j}" for j in range(i % 6)),
                     features=tuple(rng.standard_normal(3)), split="test")
            for i in range(1, 10)]
    corpus = Corpus(docs)
    sample, _ = distance_correlation_study(
        corpus, _AxisEmbedder(table), _identity_net(3), n_pairs=50, seed=1)
    assert len(sample) == 50
    docs_kept = [d for d in corpus.documents if d.tags]
    # shared counts must match set intersection for the sampled pairs
    assert sample.shared_tags.min() >= 0
    assert sample.bucket(0) == 0 and sample.bucket(3) == 3
    assert sample.bucket(4) == 4 and sample.bucket(9) == 4
    assert sample.text_dist.min() >= 0 and sample.text_dist.max() <= 1


def test_distance_study_pair_count_validation():
    with pytest.raises(ValidationError):
        distance_correlation_study(Corpus([]), None, _identity_net(2), n_pairs=1)


def test_distance_study_csv(tmp_path):
    sample, _ = None, None
    rng = np.random.default_rng(6)
    table = {f"w{i}": rng.standard_normal(3) for i in range(8)}
    docs = [make_doc(f"d{i}", f"w{i}", tags=("t",),
                     features=tuple(rng.standard_normal(3)), split="test")
            for i in range(8)]
    sample, _ = distance_correlation_study(
        Corpus(docs), _AxisEmbedder(table), _identity_net(3),
        n_pairs=25, seed=2)
    p = tmp_path / "pairs.csv"
    sample.write_csv(p)
    lines = p.read_text().splitlines()
    assert lines[0] == "text_dist,image_dist,shared_tags"
    assert len(lines) == 26


# ----------------------------------------------------------------- reports

def test_report_write_json(tmp_path):
    report = EvalReport(protocol="p5",
                        per_query=[{"query": "q", "p5": 0.4, "flagged": None}],
                        aggregates={"all": 0.4})
    p = tmp_path / "report.json"
    report.write_json(p)
    back = json.loads(p.read_text())
    assert back["protocol"] == "p5"
    assert back["aggregates"]["all"] == 0.4
    assert back["per_query"][0]["query"] == "q"


def test_report_write_csv(tmp_path):
    report = EvalReport(protocol="tagmap",
                        per_query=[{"query": "a", "ap": 1.0},
                                   {"query": "b", "ap": 0.5}],
                        map_score=0.75)
    p = tmp_path / "report.csv"
    report.write_csv(p)
    lines = p.read_text().splitlines()
    assert lines[0] == "query,metric,value"
    assert "a,ap,1.0" in lines
    assert any(line.endswith("map,0.75") for line in lines)
