"""Command-line entry points.

Every error class maps to its own exit code so scripts can branch on
failures: 2 usage, 3 I/O, 4 artifact or corpus format, 5 validation or
configuration, 6 degenerate query, 7 unembeddable query, 8 missing
prerequisite, 1 anything unexpected.
"""

from __future__ import annotations

import argparse
import os
import sys
import time

import numpy as np

from . import _kernels as kernels
from .corpus import (filter_low_frequency_tags, generate_synthetic_corpus,
                     load_corpus, save_corpus)
from .engine import Engine, load_engine_config, parse_query_terms
from .errors import (ArtifactFormatError, ConfigError, CorpusFormatError,
                     DegenerateQueryError, PrerequisiteError,
                     UnembeddableQueryError, ValidationError)
from .evaluation import (EvalReport, distance_correlation_study,
                         eval_concept_ap, eval_p5_suite, eval_tag_query_map,
                         label_query_specs, load_query_fixture)
from .retrieval import build_index, load_index, save_index
from .text import load_embedder, save_embedder, train_text_embedder
from .visual import forward, load_visual, save_loss_curve, save_visual, train_visual

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_FORMAT = 4
EXIT_VALIDATION = 5
EXIT_DEGENERATE = 6
EXIT_UNEMBEDDABLE = 7
EXIT_PREREQUISITE = 8

_ERROR_CODES = (
    (DegenerateQueryError, EXIT_DEGENERATE),
    (UnembeddableQueryError, EXIT_UNEMBEDDABLE),
    (PrerequisiteError, EXIT_PREREQUISITE),
    (CorpusFormatError, EXIT_FORMAT),
    (ArtifactFormatError, EXIT_FORMAT),
    (ConfigError, EXIT_VALIDATION),
    (ValidationError, EXIT_VALIDATION),
    (OSError, EXIT_IO),
)


def _load_config(args):
    config = load_engine_config(args.config)
    if args.seed is not None:
        config.apply_seed(args.seed)
    return config


def _load_training_corpus(config):
    corpus = load_corpus(config.corpus)
    if config.min_tag_count > 0:
        corpus = filter_low_frequency_tags(corpus, config.min_tag_count)
    return corpus


def _tfidf_stats(config, corpus, embedder):
    if config.aggregation != "tfidf":
        return None
    from .corpus import compute_tfidf_stats
    return compute_tfidf_stats(corpus, embedder.vocab)


def cmd_gen_synthetic(args) -> int:
    corpus = generate_synthetic_corpus(
        args.concepts, args.words_per_concept, args.docs, args.feature_dim,
        args.noise_sigma, args.seed if args.seed is not None else 0)
    save_corpus(corpus, args.out)
    print(f"wrote {len(corpus)} documents "
          f"({len(corpus.split('train'))} train / {len(corpus.split('val'))} val / "
          f"{len(corpus.split('test'))} test) to {args.out}")
    return EXIT_OK


def cmd_train_text(args) -> int:
    config = _load_config(args)
    corpus = _load_training_corpus(config)
    started = time.perf_counter()
    embedder = train_text_embedder(corpus, config.embedding)
    elapsed = time.perf_counter() - started
    save_embedder(embedder, config.text_model)
    print(f"method={embedder.method} vocab={len(embedder.vocab)} "
          f"dim={embedder.dim} epochs={config.embedding.epochs} "
          f"backend={kernels.BACKEND} wall={elapsed:.2f}s -> {config.text_model}")
    return EXIT_OK


def cmd_train_visual(args) -> int:
    config = _load_config(args)
    corpus = _load_training_corpus(config)
    text_embedder = load_embedder(config.text_model)
    stats = _tfidf_stats(config, corpus, text_embedder)
    started = time.perf_counter()
    visual = train_visual(corpus, text_embedder, config.aggregation,
                          config.visual, stats)
    elapsed = time.perf_counter() - started
    save_visual(visual, config.visual_model)
    save_loss_curve(visual.loss_curve, config.loss_curve)
    first = visual.loss_curve[0][1] if visual.loss_curve else float("nan")
    last = visual.loss_curve[-1][1] if visual.loss_curve else float("nan")
    print(f"layers={visual.layer_dims} iterations={config.visual.iterations} "
          f"loss {first:.6f} -> {last:.6f} wall={elapsed:.2f}s "
          f"-> {config.visual_model}")
    return EXIT_OK


def cmd_build_index(args) -> int:
    config = _load_config(args)
    corpus = _load_training_corpus(config)
    visual = load_visual(config.visual_model)
    test_docs = corpus.split("test")
    if not test_docs:
        raise PrerequisiteError("corpus has no test-split documents to index")
    missing = [d.id for d in test_docs if d.features is None]
    if missing:
        raise ValidationError(
            f"{len(missing)} test document(s) lack features: {missing[:10]}")
    items = [(doc.id, forward(visual, np.asarray(doc.features)))
             for doc in test_docs]
    index = build_index(items)
    save_index(index, config.index)
    print(f"indexed {len(index)} test documents (dim={index.dim}) -> {config.index}")
    return EXIT_OK


def cmd_query(args) -> int:
    config = _load_config(args)
    engine = Engine(config)
    terms = parse_query_terms(args.query)
    ranked, dropped = engine.execute_query(terms, args.k)
    if dropped:
        print(f"dropped out-of-vocabulary tokens: {' '.join(dropped)}",
              file=sys.stderr)
    for id_, score in ranked:
        print(f"{id_}\t{score:.6f}")
    return EXIT_OK


def cmd_eval(args) -> int:
    config = _load_config(args)
    corpus = _load_training_corpus(config)
    text_embedder = load_embedder(config.text_model)
    stats = _tfidf_stats(config, corpus, text_embedder)
    index = load_index(config.index)
    os.makedirs(config.reports_dir, exist_ok=True)
    base = os.path.join(config.reports_dir, args.protocol)

    if args.protocol == "p5":
        queries = (label_query_specs(corpus) if args.queries == "labels"
                   else load_query_fixture())
        report = eval_p5_suite(corpus, index, text_embedder, queries,
                               config.aggregation, stats)
        summary = " ".join(f"{k}={v:.4f}" for k, v in report.aggregates.items())
    elif args.protocol == "tagmap":
        report = eval_tag_query_map(corpus, index, text_embedder,
                                    args.query_fraction, config.aggregation,
                                    stats, seed=config.seed)
        summary = f"map={report.map_score:.4f}"
    elif args.protocol == "conceptap":
        concepts = (args.concepts.split(",") if args.concepts
                    else sorted({lab for doc in corpus
                                 for lab in (doc.labels or ())}))
        report = eval_concept_ap(corpus, index, text_embedder, concepts,
                                 config.aggregation, stats)
        summary = f"map={report.map_score:.4f} over {len(concepts)} concepts"
    elif args.protocol == "corr":
        visual = load_visual(config.visual_model)
        sample, r2 = distance_correlation_study(
            corpus, text_embedder, visual, args.n_pairs, seed=config.seed,
            aggregation=config.aggregation, stats=stats, split="test")
        sample.write_csv(base + "_pairs.csv")
        report = EvalReport(protocol="corr", r2=r2,
                            metadata={"n_pairs": args.n_pairs, "seed": config.seed})
        summary = f"r2={r2:.4f} ({len(sample)} pairs)"
    else:  # pragma: no cover - argparse restricts choices
        raise ValidationError(f"unknown protocol {args.protocol!r}")

    report.write_json(base + ".json")
    report.write_csv(base + ".csv")
    print(f"{args.protocol}: {summary} -> {base}.json")
    return EXIT_OK


def cmd_serve(args) -> int:
    config = _load_config(args)
    from .service import serve
    serve(config, args.host, args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jointemb",
        description="joint text-image embedding trainer and retrieval engine")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default="engine.json",
                        help="engine config file (JSON)")
    common.add_argument("--seed", type=int, default=None,
                        help="override every configured seed")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-synthetic", parents=[common],
                       help="write a concept-mixture corpus")
    p.add_argument("--concepts", type=int, default=10)
    p.add_argument("--words-per-concept", type=int, default=50)
    p.add_argument("--docs", type=int, default=5000)
    p.add_argument("--feature-dim", type=int, default=64)
    p.add_argument("--noise-sigma", type=float, default=0.1)
    p.add_argument("--out", default="corpus.jsonl")
    p.set_defaults(func=cmd_gen_synthetic)

    p = sub.add_parser("train-text", parents=[common],
                       help="train the configured text embedding")
    p.set_defaults(func=cmd_train_text)

    p = sub.add_parser("train-visual", parents=[common],
                       help="train the visual regressor against the text model")
    p.set_defaults(func=cmd_train_visual)

    p = sub.add_parser("build-index", parents=[common],
                       help="embed and index the test split")
    p.set_defaults(func=cmd_build_index)

    p = sub.add_parser("query", parents=[common],
                       help="run a weighted query, e.g. 'snow -leopard'")
    p.add_argument("query")
    p.add_argument("--k", type=int, default=10)
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("eval", parents=[common], help="run an evaluation protocol")
    p.add_argument("protocol", choices=("p5", "tagmap", "conceptap", "corr"))
    p.add_argument("--queries", choices=("fixture", "labels"), default="fixture",
                   help="p5 query source")
    p.add_argument("--query-fraction", type=float, default=0.05,
                   help="tagmap query split fraction")
    p.add_argument("--concepts", default=None,
                   help="conceptap comma-separated concept list (default: all labels)")
    p.add_argument("--n-pairs", type=int, default=20000,
                   help="corr sample size")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("serve", parents=[common], help="run the HTTP API")
    p.add_argument("--host", default=None)
    p.add_argument("--port", type=int, default=None)
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # noqa: BLE001 - single translation point
        for cls, code in _ERROR_CODES:
            if isinstance(exc, cls):
                print(f"error: {exc}", file=sys.stderr)
                return code
        raise


if __name__ == "__main__":
    sys.exit(main())
