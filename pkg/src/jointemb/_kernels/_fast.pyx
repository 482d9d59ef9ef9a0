# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled training kernels.

Mirrors the semantics of ``_pure.py`` exactly: same update rules, same
sampling order, same SplitMix64 stream. Reduction rounding may differ
(dot products accumulate in double here, BLAS order in the fallback).
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, sqrt


cdef inline unsigned long long _mix64(unsigned long long z) noexcept nogil:
    z = (z ^ (z >> 30)) * <unsigned long long>0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * <unsigned long long>0x94D049BB133111EB
    return z ^ (z >> 31)


cdef inline unsigned long long _next_u64(unsigned long long *state) noexcept nogil:
    state[0] = state[0] + <unsigned long long>0x9E3779B97F4A7C15
    return _mix64(state[0])


cdef inline double _next_double(unsigned long long *state) noexcept nogil:
    return (_next_u64(state) >> 11) * (1.0 / 9007199254740992.0)


def rng_stream(seed, n):
    """First `n` uint64 draws from seed; used by backend parity tests."""
    cdef unsigned long long state = seed
    cdef Py_ssize_t i
    out = np.empty(n, dtype=np.uint64)
    cdef unsigned long long[:] view = out
    for i in range(n):
        view[i] = _next_u64(&state)
    return out


cdef inline double _sigmoid(double x) noexcept nogil:
    cdef double e
    if x >= 0.0:
        return 1.0 / (1.0 + exp(-x))
    e = exp(x)
    return e / (1.0 + e)


cdef inline void _sgns_pair(float *l1, float[:, ::1] syn1, int target0,
                            int[:] neg_table, int negative, double alpha,
                            unsigned long long *rng, float *neu1e, int d,
                            bint learn_hidden) noexcept nogil:
    cdef int k, c, target
    cdef Py_ssize_t n_table = neg_table.shape[0]
    cdef double f, label
    cdef float g
    for c in range(d):
        neu1e[c] = 0.0
    for k in range(negative + 1):
        if k == 0:
            target = target0
            label = 1.0
        else:
            target = neg_table[<Py_ssize_t>(_next_u64(rng) % n_table)]
            if target == target0:
                continue
            label = 0.0
        f = 0.0
        for c in range(d):
            f += l1[c] * syn1[target, c]
        g = <float>((label - _sigmoid(f)) * alpha)
        for c in range(d):
            neu1e[c] += g * syn1[target, c]
        if learn_hidden:
            for c in range(d):
                syn1[target, c] += g * l1[c]


def sgns_epoch(int[:] data, long long[:] offsets, float[:, ::1] syn0,
               float[:, ::1] syn1, int[:] neg_table, int window, int negative,
               double alpha_start, double alpha_end,
               unsigned long long[:] rng_state):
    cdef unsigned long long rng = rng_state[0]
    cdef Py_ssize_t s, i, j, start, end, lo, hi, pos = 0
    cdef Py_ssize_t n_sent = offsets.shape[0] - 1
    cdef Py_ssize_t total = data.shape[0]
    cdef int c, d = syn0.shape[1]
    cdef int center, b
    cdef double alpha
    scratch = np.zeros(d, dtype=np.float32)
    cdef float[:] neu1e = scratch
    if total < 1:
        total = 1
    with nogil:
        for s in range(n_sent):
            start = offsets[s]
            end = offsets[s + 1]
            for i in range(start, end):
                alpha = alpha_start + (alpha_end - alpha_start) * (<double>pos / total)
                pos += 1
                center = data[i]
                b = 1 + <int>(_next_u64(&rng) % <unsigned long long>window)
                lo = i - b
                if lo < start:
                    lo = start
                hi = i + b + 1
                if hi > end:
                    hi = end
                for j in range(lo, hi):
                    if j == i:
                        continue
                    _sgns_pair(&syn0[center, 0], syn1, data[j], neg_table,
                               negative, alpha, &rng, &neu1e[0], d, True)
                    for c in range(d):
                        syn0[center, c] += neu1e[c]
    rng_state[0] = rng


def sgns_pairs_epoch(int[:] centers, int[:] contexts, float[:, ::1] vecs,
                     float[:, ::1] syn1, int[:] neg_table, int negative,
                     double alpha_start, double alpha_end, bint learn_hidden,
                     unsigned long long[:] rng_state):
    cdef unsigned long long rng = rng_state[0]
    cdef Py_ssize_t t, row
    cdef Py_ssize_t total = centers.shape[0]
    cdef int c, d = vecs.shape[1]
    cdef double alpha
    scratch = np.zeros(d, dtype=np.float32)
    cdef float[:] neu1e = scratch
    cdef Py_ssize_t denom = total if total > 0 else 1
    with nogil:
        for t in range(total):
            alpha = alpha_start + (alpha_end - alpha_start) * (<double>t / denom)
            row = centers[t]
            _sgns_pair(&vecs[row, 0], syn1, contexts[t], neg_table, negative,
                       alpha, &rng, &neu1e[0], d, learn_hidden)
            for c in range(d):
                vecs[row, c] += neu1e[c]
    rng_state[0] = rng


def subword_sgns_epoch(int[:] data, long long[:] offsets, int[:] ngram_data,
                       long long[:] ngram_offsets, float[:, ::1] grams,
                       float[:, ::1] syn1, int[:] neg_table, int window,
                       int negative, double alpha_start, double alpha_end,
                       unsigned long long[:] rng_state):
    cdef unsigned long long rng = rng_state[0]
    cdef Py_ssize_t s, i, j, g, start, end, lo, hi, g_lo, g_hi, pos = 0
    cdef Py_ssize_t n_sent = offsets.shape[0] - 1
    cdef Py_ssize_t total = data.shape[0]
    cdef int c, d = grams.shape[1]
    cdef int center, b
    cdef float n_grams
    cdef double alpha
    scratch_e = np.zeros(d, dtype=np.float32)
    scratch_l = np.zeros(d, dtype=np.float32)
    cdef float[:] neu1e = scratch_e
    cdef float[:] l1 = scratch_l
    if total < 1:
        total = 1
    with nogil:
        for s in range(n_sent):
            start = offsets[s]
            end = offsets[s + 1]
            for i in range(start, end):
                alpha = alpha_start + (alpha_end - alpha_start) * (<double>pos / total)
                pos += 1
                center = data[i]
                b = 1 + <int>(_next_u64(&rng) % <unsigned long long>window)
                g_lo = ngram_offsets[center]
                g_hi = ngram_offsets[center + 1]
                if g_hi == g_lo:
                    continue
                for c in range(d):
                    l1[c] = 0.0
                for g in range(g_lo, g_hi):
                    for c in range(d):
                        l1[c] += grams[ngram_data[g], c]
                n_grams = <float>(g_hi - g_lo)
                lo = i - b
                if lo < start:
                    lo = start
                hi = i + b + 1
                if hi > end:
                    hi = end
                for j in range(lo, hi):
                    if j == i:
                        continue
                    _sgns_pair(&l1[0], syn1, data[j], neg_table, negative,
                               alpha, &rng, &neu1e[0], d, True)
                    for g in range(g_lo, g_hi):
                        for c in range(d):
                            grams[ngram_data[g], c] += neu1e[c]
                    # each of the n gram rows moved by neu1e, so the sum moved n times
                    for c in range(d):
                        l1[c] += n_grams * neu1e[c]
    rng_state[0] = rng


def glove_epoch(int[:] rows, int[:] cols, float[:] logx, float[:] fweight,
                long long[:] order, float[:, ::1] w_main, float[:, ::1] w_ctx,
                float[:] b_main, float[:] b_ctx, float[:, ::1] gsq_w_main,
                float[:, ::1] gsq_w_ctx, float[:] gsq_b_main,
                float[:] gsq_b_ctx, double lr):
    cdef double cost = 0.0
    cdef Py_ssize_t n = order.shape[0]
    cdef Py_ssize_t t, e
    cdef int i, j, c, d = w_main.shape[1]
    cdef double diff, fdiff
    cdef float flr, upd_i, upd_j, old_i
    with nogil:
        for e in range(n):
            t = order[e]
            i = rows[t]
            j = cols[t]
            diff = 0.0
            for c in range(d):
                diff += w_main[i, c] * w_ctx[j, c]
            diff += <double>b_main[i] + <double>b_ctx[j] - <double>logx[t]
            fdiff = <double>fweight[t] * diff
            cost += 0.5 * fdiff * diff
            flr = <float>(fdiff * lr)
            for c in range(d):
                old_i = w_main[i, c]
                upd_i = flr * w_ctx[j, c]
                upd_j = flr * old_i
                w_main[i, c] = old_i - upd_i / <float>sqrt(<double>gsq_w_main[i, c])
                w_ctx[j, c] = w_ctx[j, c] - upd_j / <float>sqrt(<double>gsq_w_ctx[j, c])
                gsq_w_main[i, c] += upd_i * upd_i
                gsq_w_ctx[j, c] += upd_j * upd_j
            b_main[i] -= flr / <float>sqrt(<double>gsq_b_main[i])
            b_ctx[j] -= flr / <float>sqrt(<double>gsq_b_ctx[j])
            gsq_b_main[i] += flr * flr
            gsq_b_ctx[j] += flr * flr
    return cost


def lda_sweep(int[:] doc_ids, int[:] word_ids, int[:] topics,
              int[:, ::1] n_doc_topic, int[:, ::1] n_topic_word, int[:] n_topic,
              double alpha, double beta, bint update_model,
              unsigned long long[:] rng_state):
    cdef unsigned long long rng = rng_state[0]
    cdef Py_ssize_t t, n = word_ids.shape[0]
    cdef int d, w, k, k_old, k_new
    cdef int n_topics = n_doc_topic.shape[1]
    cdef double vbeta = n_topic_word.shape[1] * beta
    cdef double total, u, acc
    scratch = np.zeros(n_topics, dtype=np.float64)
    cdef double[:] p = scratch
    with nogil:
        for t in range(n):
            d = doc_ids[t]
            w = word_ids[t]
            k_old = topics[t]
            n_doc_topic[d, k_old] -= 1
            if update_model:
                n_topic_word[k_old, w] -= 1
                n_topic[k_old] -= 1
            total = 0.0
            for k in range(n_topics):
                p[k] = (n_doc_topic[d, k] + alpha) * (n_topic_word[k, w] + beta) / (n_topic[k] + vbeta)
                total += p[k]
            u = _next_double(&rng) * total
            k_new = n_topics - 1
            acc = 0.0
            for k in range(n_topics):
                acc += p[k]
                if u < acc:
                    k_new = k
                    break
            topics[t] = k_new
            n_doc_topic[d, k_new] += 1
            if update_model:
                n_topic_word[k_new, w] += 1
                n_topic[k_new] += 1
    rng_state[0] = rng


NAME = "cython"
