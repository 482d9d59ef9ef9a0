"""Pure numpy fallback for the training kernels.

Implements exactly the same update rules, sampling order, and RNG stream
as the compiled extension (``_fast.pyx``). Each backend is bit-reproducible
run-to-run for a fixed seed; across backends results agree only up to
float32 rounding of the dot-product reductions.

All kernels draw randomness from a SplitMix64 stream whose state is passed
in a 1-element uint64 array and advanced in place, so multi-epoch drivers
can chain calls without repeating samples.
"""

import math

import numpy as np

NAME = "pure-python"

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


def _mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


class SplitMix64:
    """Tiny deterministic RNG; the compiled kernel implements the same stream."""

    __slots__ = ("state",)

    def __init__(self, state: int):
        self.state = state & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + _GAMMA) & _MASK64
        return _mix64(self.state)

    def next_double(self) -> float:
        # 53 high-quality bits -> [0, 1)
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))


def rng_stream(seed: int, n: int) -> np.ndarray:
    """First `n` uint64 draws from seed; used by backend parity tests."""
    rng = SplitMix64(seed)
    return np.array([rng.next_u64() for _ in range(n)], dtype=np.uint64)


def _sigmoid(x: float) -> float:
    if x >= 0.0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def _sgns_pair(l1, syn1, target0, neg_table, negative, alpha, rng, learn_hidden):
    """One skip-gram negative-sampling update; returns the input-side error.

    A sampled negative equal to the positive target is skipped (not
    resampled), so the draw count per pair is fixed.
    """
    neu1e = np.zeros(l1.shape[0], dtype=np.float32)
    n_table = len(neg_table)
    for k in range(negative + 1):
        if k == 0:
            target = target0
            label = 1.0
        else:
            target = int(neg_table[rng.next_u64() % n_table])
            if target == target0:
                continue
            label = 0.0
        row = syn1[target]
        f = float(np.dot(l1, row))
        g = np.float32((label - _sigmoid(f)) * alpha)
        neu1e += g * row
        if learn_hidden:
            row += g * l1
    return neu1e


def sgns_epoch(data, offsets, syn0, syn1, neg_table, window, negative,
               alpha_start, alpha_end, rng_state):
    """One skip-gram pass over packed sentences.

    For each center position a reduced window size is drawn uniformly from
    [1, window]; the center word's input vector predicts each context word.
    The learning rate decays linearly from alpha_start to alpha_end across
    the positions of this call.
    """
    rng = SplitMix64(int(rng_state[0]))
    total = max(1, len(data))
    pos = 0
    for s in range(len(offsets) - 1):
        start = int(offsets[s])
        end = int(offsets[s + 1])
        for i in range(start, end):
            alpha = alpha_start + (alpha_end - alpha_start) * (pos / total)
            pos += 1
            center = int(data[i])
            b = 1 + rng.next_u64() % window
            lo = max(start, i - b)
            hi = min(end, i + b + 1)
            l1 = syn0[center]
            for j in range(lo, hi):
                if j == i:
                    continue
                neu1e = _sgns_pair(l1, syn1, int(data[j]), neg_table,
                                   negative, alpha, rng, True)
                l1 += neu1e
    rng_state[0] = rng.state


def sgns_pairs_epoch(centers, contexts, vecs, syn1, neg_table, negative,
                     alpha_start, alpha_end, learn_hidden, rng_state):
    """Negative-sampling updates over an explicit (center row, context id) list.

    Used by the paragraph-vector trainer (center row indexes the document
    matrix) and its frozen-output inference mode (learn_hidden=False).
    """
    rng = SplitMix64(int(rng_state[0]))
    total = max(1, len(centers))
    for t in range(len(centers)):
        alpha = alpha_start + (alpha_end - alpha_start) * (t / total)
        l1 = vecs[int(centers[t])]
        neu1e = _sgns_pair(l1, syn1, int(contexts[t]), neg_table,
                           negative, alpha, rng, learn_hidden)
        l1 += neu1e
    rng_state[0] = rng.state


def subword_sgns_epoch(data, offsets, ngram_data, ngram_offsets, grams, syn1,
                       neg_table, window, negative, alpha_start, alpha_end,
                       rng_state):
    """Skip-gram pass where the center representation is a sum of n-gram rows.

    The pair error is added to every n-gram row of the center word. Words
    with an empty n-gram list are skipped as centers but still act as
    context targets.
    """
    rng = SplitMix64(int(rng_state[0]))
    total = max(1, len(data))
    pos = 0
    for s in range(len(offsets) - 1):
        start = int(offsets[s])
        end = int(offsets[s + 1])
        for i in range(start, end):
            alpha = alpha_start + (alpha_end - alpha_start) * (pos / total)
            pos += 1
            center = int(data[i])
            b = 1 + rng.next_u64() % window
            g_lo = int(ngram_offsets[center])
            g_hi = int(ngram_offsets[center + 1])
            if g_hi == g_lo:
                continue
            gram_ids = ngram_data[g_lo:g_hi]
            l1 = grams[gram_ids].sum(axis=0, dtype=np.float32)
            lo = max(start, i - b)
            hi = min(end, i + b + 1)
            for j in range(lo, hi):
                if j == i:
                    continue
                neu1e = _sgns_pair(l1, syn1, int(data[j]), neg_table,
                                   negative, alpha, rng, True)
                for g in gram_ids:
                    grams[int(g)] += neu1e
                # each of the n gram rows moved by neu1e, so the sum moved n times
                l1 += np.float32(len(gram_ids)) * neu1e
    rng_state[0] = rng.state


def glove_epoch(rows, cols, logx, fweight, order, w_main, w_ctx, b_main, b_ctx,
                gsq_w_main, gsq_w_ctx, gsq_b_main, gsq_b_ctx, lr):
    """One AdaGrad pass over the nonzero co-occurrence entries.

    Returns the epoch cost sum(0.5 * f(x) * diff^2). Squared-gradient
    accumulators must be initialized to 1.0 by the caller; the division
    uses the accumulation prior to this entry's contribution.
    """
    cost = 0.0
    for t in order:
        t = int(t)
        i = int(rows[t])
        j = int(cols[t])
        wi = w_main[i]
        wj = w_ctx[j]
        diff = float(np.dot(wi, wj)) + float(b_main[i]) + float(b_ctx[j]) - float(logx[t])
        fdiff = float(fweight[t]) * diff
        cost += 0.5 * fdiff * diff
        flr = np.float32(fdiff * lr)
        upd_i = flr * wj
        upd_j = flr * wi
        wi -= upd_i / np.sqrt(gsq_w_main[i])
        wj -= upd_j / np.sqrt(gsq_w_ctx[j])
        gsq_w_main[i] += upd_i * upd_i
        gsq_w_ctx[j] += upd_j * upd_j
        b_main[i] -= flr / np.float32(math.sqrt(gsq_b_main[i]))
        b_ctx[j] -= flr / np.float32(math.sqrt(gsq_b_ctx[j]))
        gsq_b_main[i] += flr * flr
        gsq_b_ctx[j] += flr * flr
    return cost


def lda_sweep(doc_ids, word_ids, topics, n_doc_topic, n_topic_word, n_topic,
              alpha, beta, update_model, rng_state):
    """One collapsed-Gibbs sweep over all (doc, word) tokens.

    With update_model=False the topic-word counts stay frozen (held-out
    document inference); only the doc-topic counts and assignments move.
    """
    rng = SplitMix64(int(rng_state[0]))
    n_topics = n_doc_topic.shape[1]
    vbeta = n_topic_word.shape[1] * beta
    for t in range(len(word_ids)):
        d = int(doc_ids[t])
        w = int(word_ids[t])
        k_old = int(topics[t])
        n_doc_topic[d, k_old] -= 1
        if update_model:
            n_topic_word[k_old, w] -= 1
            n_topic[k_old] -= 1
        p = (n_doc_topic[d] + alpha) * (n_topic_word[:, w] + beta) / (n_topic + vbeta)
        cum = np.cumsum(p)
        u = rng.next_double() * float(cum[-1])
        k_new = min(int(np.searchsorted(cum, u, side="right")), n_topics - 1)
        topics[t] = k_new
        n_doc_topic[d, k_new] += 1
        if update_model:
            n_topic_word[k_new, w] += 1
            n_topic[k_new] += 1
    rng_state[0] = rng.state
