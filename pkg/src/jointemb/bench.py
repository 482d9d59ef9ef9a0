"""Benchmark the compiled kernels against the pure numpy fallback.

Run as ``python -m jointemb.bench``. Workloads are synthetic and sized
by --scale; each kernel runs the same inputs on both backends (fresh
copies, since the kernels mutate their tables in place).
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from ._kernels import get_backend


def _token_stream(rng, vocab_size, n_tokens, n_sentences):
    data = rng.integers(0, vocab_size, n_tokens).astype(np.int32)
    cuts = np.sort(rng.choice(np.arange(1, n_tokens), n_sentences - 1, replace=False))
    offsets = np.concatenate([[0], cuts, [n_tokens]]).astype(np.int64)
    return data, offsets


def _bench(label, builder, runner, backends, repeats):
    rows = []
    for backend in backends:
        best = float("inf")
        for _ in range(repeats):
            state = builder()
            start = time.perf_counter()
            runner(backend, state)
            best = min(best, time.perf_counter() - start)
        rows.append((backend.NAME, best))
    return label, rows


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--scale", type=float, default=1.0,
                        help="multiply workload sizes")
    parser.add_argument("--repeats", type=int, default=3,
                        help="take the best of this many runs")
    args = parser.parse_args(argv)

    backends = [get_backend("pure-python")]
    try:
        backends.append(get_backend("cython"))
    except ImportError:
        print("compiled backend not built; timing the fallback only")

    s = args.scale
    vocab, dim = 2000, 64
    n_tokens = int(40_000 * s)
    n_sent = max(2, int(400 * s))
    rng = np.random.default_rng(7)
    data, offsets = _token_stream(rng, vocab, n_tokens, n_sent)
    table = rng.integers(0, vocab, 1 << 16).astype(np.int32)

    results = []

    def sgns_state():
        return (((rng.random((vocab, dim)) - 0.5) / dim).astype(np.float32),
                np.zeros((vocab, dim), dtype=np.float32),
                np.array([12345], dtype=np.uint64))

    results.append(_bench(
        f"skip-gram epoch ({n_tokens} tokens, d={dim})",
        sgns_state,
        lambda b, st: b.sgns_epoch(data, offsets, st[0], st[1], table, 5, 5,
                                   0.025, 0.0001, st[2]),
        backends, args.repeats))

    n_grams = vocab * 4
    ngram_offsets = (np.arange(vocab + 1, dtype=np.int64) * 4)
    ngram_data = rng.integers(0, n_grams, vocab * 4).astype(np.int32)

    def subword_state():
        return (((rng.random((n_grams, dim)) - 0.5) / dim).astype(np.float32),
                np.zeros((vocab, dim), dtype=np.float32),
                np.array([999], dtype=np.uint64))

    results.append(_bench(
        f"subword epoch ({n_tokens} tokens, 4 grams/word)",
        subword_state,
        lambda b, st: b.subword_sgns_epoch(data, offsets, ngram_data,
                                           ngram_offsets, st[0], st[1], table,
                                           5, 5, 0.05, 0.0001, st[2]),
        backends, args.repeats))

    n_pairs = int(120_000 * s)
    rows_ = rng.integers(0, vocab, n_pairs).astype(np.int32)
    cols_ = rng.integers(0, vocab, n_pairs).astype(np.int32)
    vals = rng.random(n_pairs) * 50 + 1
    logx = np.log(vals).astype(np.float32)
    fw = np.minimum(1.0, (vals / 100.0) ** 0.75).astype(np.float32)
    order = rng.permutation(n_pairs).astype(np.int64)

    def glove_state():
        r = np.random.default_rng(3)
        return (((r.random((vocab, dim)) - 0.5) / dim).astype(np.float32),
                ((r.random((vocab, dim)) - 0.5) / dim).astype(np.float32),
                np.zeros(vocab, dtype=np.float32), np.zeros(vocab, dtype=np.float32),
                np.ones((vocab, dim), dtype=np.float32),
                np.ones((vocab, dim), dtype=np.float32),
                np.ones(vocab, dtype=np.float32), np.ones(vocab, dtype=np.float32))

    results.append(_bench(
        f"co-occurrence epoch ({n_pairs} entries, d={dim})",
        glove_state,
        lambda b, st: b.glove_epoch(rows_, cols_, logx, fw, order, *st, 0.05),
        backends, args.repeats))

    n_topics = 50
    lda_docs = rng.integers(0, 500, n_tokens).astype(np.int32)
    lda_words = data.copy()

    def lda_state():
        r = np.random.default_rng(5)
        topics = r.integers(0, n_topics, n_tokens).astype(np.int32)
        ndt = np.zeros((500, n_topics), dtype=np.int32)
        ntw = np.zeros((n_topics, vocab), dtype=np.int32)
        nt = np.zeros(n_topics, dtype=np.int32)
        np.add.at(ndt, (lda_docs, topics), 1)
        np.add.at(ntw, (topics, lda_words), 1)
        np.add.at(nt, topics, 1)
        return topics, ndt, ntw, nt, np.array([77], dtype=np.uint64)

    results.append(_bench(
        f"collapsed Gibbs sweep ({n_tokens} tokens, {n_topics} topics)",
        lda_state,
        lambda b, st: b.lda_sweep(lda_docs, lda_words, st[0], st[1], st[2],
                                  st[3], 1.0, 0.01, True, st[4]),
        backends, args.repeats))

    width = max(len(label) for label, _ in results)
    print(f"{'kernel':<{width}}  " + "  ".join(f"{b.NAME:>12}" for b in backends)
          + ("       speedup" if len(backends) == 2 else ""))
    for label, rows in results:
        cells = "  ".join(f"{seconds:>11.4f}s" for _, seconds in rows)
        line = f"{label:<{width}}  {cells}"
        if len(rows) == 2 and rows[1][1] > 0:
            line += f"  {rows[0][1] / rows[1][1]:>11.1f}x"
        print(line)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
