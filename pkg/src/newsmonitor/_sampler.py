"""Collapsed Gibbs sweep kernels (numba-compiled, strictly sequential).

The conditional for token i in document d with word w is

    p(z_i = k | rest) ∝ (n_kw[k,w] + B[k,w]) / (n_k[k] + Bsum[k]) * (n_dk[d,k] + alpha)

where B is the (possibly topic/word dependent) word-prior matrix.  Topic
draws use cumulative-sum inverse-CDF on pre-generated uniforms, so a run is
reproducible bit-for-bit from the RNG stream alone.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def gibbs_sweeps(tokens, doc_of, z, n_kw, n_dk, n_k, word_prior, prior_sum,
                 alpha, uniforms, record, z_history, accumulate, acc_kw, acc_dk):
    n_sweeps = uniforms.shape[0]
    n_tokens = tokens.shape[0]
    K = n_kw.shape[0]
    cum = np.empty(K, np.float64)
    for s in range(n_sweeps):
        for i in range(n_tokens):
            w = tokens[i]
            d = doc_of[i]
            k_old = z[i]
            n_kw[k_old, w] -= 1
            n_dk[d, k_old] -= 1
            n_k[k_old] -= 1
            total = 0.0
            for k in range(K):
                p = (n_kw[k, w] + word_prior[k, w]) / (n_k[k] + prior_sum[k]) \
                    * (n_dk[d, k] + alpha)
                total += p
                cum[k] = total
            u = uniforms[s, i] * total
            k_new = 0
            while k_new < K - 1 and cum[k_new] < u:
                k_new += 1
            z[i] = k_new
            n_kw[k_new, w] += 1
            n_dk[d, k_new] += 1
            n_k[k_new] += 1
        if record:
            for i in range(n_tokens):
                z_history[s, i] = z[i]
        if accumulate:
            for k in range(K):
                n_k_row = n_kw[k]
                acc_row = acc_kw[k]
                for w in range(n_kw.shape[1]):
                    acc_row[w] += n_k_row[w]
            for d in range(n_dk.shape[0]):
                for k in range(K):
                    acc_dk[d, k] += n_dk[d, k]


@njit(cache=True)
def fold_in_sweeps(tokens, z, n_kw, n_k, n_dk_local, word_prior, prior_sum,
                   alpha, uniforms):
    """Gibbs over one held-out document; model counts stay frozen."""
    n_sweeps = uniforms.shape[0]
    n_tokens = tokens.shape[0]
    K = n_kw.shape[0]
    cum = np.empty(K, np.float64)
    for s in range(n_sweeps):
        for i in range(n_tokens):
            w = tokens[i]
            k_old = z[i]
            n_dk_local[k_old] -= 1
            total = 0.0
            for k in range(K):
                p = (n_kw[k, w] + word_prior[k, w]) / (n_k[k] + prior_sum[k]) \
                    * (n_dk_local[k] + alpha)
                total += p
                cum[k] = total
            u = uniforms[s, i] * total
            k_new = 0
            while k_new < K - 1 and cum[k_new] < u:
                k_new += 1
            z[i] = k_new
            n_dk_local[k_new] += 1
