"""Static topic modeling: collapsed Gibbs LDA, fold-in inference,
coherence / log-perplexity scoring, and a K sweep for model selection."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from typing import Iterable, Optional, Sequence

import numpy as np

from ._sampler import fold_in_sweeps, gibbs_sweeps
from .rng import CounterRng, derive_seed

# Bound the per-chunk uniforms buffer at ~80 MB.
_CHUNK_BUDGET = 10_000_000


class TopicsError(Exception):
    pass


@dataclass(frozen=True)
class LdaConfig:
    n_topics: int
    alpha: Optional[float] = None
    beta: float = 0.01
    iterations: int = 1000
    burn_in: int = 200
    seed: int = 0
    average_counts: bool = False

    def __post_init__(self):
        if self.n_topics < 2:
            raise ValueError("n_topics must be >= 2")
        if self.alpha is not None and self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if self.beta <= 0:
            raise ValueError("beta must be positive")
        if not (self.iterations > self.burn_in >= 0):
            raise ValueError("need iterations > burn_in >= 0")

    @property
    def effective_alpha(self) -> float:
        """alpha, defaulting to 50/K when unset."""
        return self.alpha if self.alpha is not None else 50.0 / self.n_topics


@dataclass(frozen=True)
class TopicModel:
    phi: np.ndarray          # (K, V) topic-word probabilities
    theta: np.ndarray        # (D, K) doc-topic probabilities
    assignments: tuple       # per-doc int32 arrays, final-sweep z
    n_kw: np.ndarray         # (K, V) int64
    n_dk: np.ndarray         # (D, K) int64
    n_k: np.ndarray          # (K,) int64
    config: Optional[LdaConfig] = None
    doc_ids: Optional[tuple] = None
    vocab_hash: Optional[str] = None
    z_history: Optional[np.ndarray] = None
    word_prior: Optional[np.ndarray] = None

    @property
    def n_topics(self) -> int:
        return self.phi.shape[0]

    @property
    def n_words(self) -> int:
        return self.phi.shape[1]

    def theta_for(self, doc_id: str) -> np.ndarray:
        if self.doc_ids is None:
            raise TopicsError("model carries no document ids")
        return self.theta[self.doc_ids.index(doc_id)]

    def validate(self, docs=None, atol: float = 1e-9) -> None:
        """Count-consistency and simplex invariants; raises on violation.

        Pass the fitted docs to additionally recompute n_kw from the stored
        assignments and token ids.
        """
        if not np.allclose(self.phi.sum(axis=1), 1.0, atol=atol):
            raise AssertionError("phi rows must sum to 1")
        if not np.allclose(self.theta.sum(axis=1), 1.0, atol=atol):
            raise AssertionError("theta rows must sum to 1")
        if (self.n_kw < 0).any() or (self.n_dk < 0).any() or (self.n_k < 0).any():
            raise AssertionError("negative counts")
        if not np.array_equal(self.n_kw.sum(axis=1), self.n_k):
            raise AssertionError("sum_w n_kw != n_k")
        K = self.n_topics
        n_dk = np.zeros_like(self.n_dk)
        for d, zs in enumerate(self.assignments):
            for k in range(K):
                n_dk[d, k] = int((zs == k).sum())
            if self.n_dk[d].sum() != len(zs):
                raise AssertionError("sum_k n_dk != doc length")
        if not np.array_equal(n_dk, self.n_dk):
            raise AssertionError("n_dk inconsistent with assignments")
        if docs is not None:
            n_kw = np.zeros_like(self.n_kw)
            for zs, doc in zip(self.assignments, docs):
                ids = np.asarray(_token_ids(doc), dtype=np.int64)
                np.add.at(n_kw, (zs.astype(np.int64), ids), 1)
            if not np.array_equal(n_kw, self.n_kw):
                raise AssertionError("n_kw inconsistent with assignments")


def _token_ids(doc) -> list:
    return list(getattr(doc, "token_ids", doc))


def _flatten(docs: Sequence) -> tuple:
    tokens, doc_of, offsets = [], [], [0]
    for d, doc in enumerate(docs):
        ids = _token_ids(doc)
        tokens.extend(ids)
        doc_of.extend([d] * len(ids))
        offsets.append(offsets[-1] + len(ids))
    return (np.asarray(tokens, dtype=np.int32),
            np.asarray(doc_of, dtype=np.int32),
            np.asarray(offsets, dtype=np.int64))


def _prior_matrix(config: LdaConfig, n_words: int,
                  word_prior: Optional[np.ndarray], n_topics: int) -> np.ndarray:
    if word_prior is None:
        return np.full((n_topics, n_words), config.beta, dtype=np.float64)
    word_prior = np.asarray(word_prior, dtype=np.float64)
    if word_prior.shape != (n_topics, n_words):
        raise TopicsError(f"word prior shape {word_prior.shape} != {(n_topics, n_words)}")
    if (word_prior <= 0).any():
        raise TopicsError("word prior entries must be positive")
    return word_prior


def fit_lda(docs: Sequence, config: LdaConfig, n_words: Optional[int] = None,
            word_prior: Optional[np.ndarray] = None, record_history: bool = False,
            vocab_hash: Optional[str] = None) -> TopicModel:
    """Collapsed Gibbs LDA fit.

    z is seeded-random initialized, then `iterations` full sweeps run; phi
    and theta come from the final counts with add-prior smoothing, or from
    post-burn-in averaged counts when `config.average_counts` is set.
    Zero-length documents are skipped by the sampler and get uniform theta.
    `word_prior` (K x V) replaces the flat beta matrix; this is how the
    dynamic model couples consecutive slices.
    """
    docs = list(docs)
    if not docs:
        raise TopicsError("empty corpus")
    tokens, doc_of, offsets = _flatten(docs)
    K = config.n_topics
    if n_words is None:
        if tokens.size == 0:
            raise TopicsError("cannot infer vocabulary size from empty docs")
        n_words = int(tokens.max()) + 1
    if tokens.size and int(tokens.max()) >= n_words:
        raise TopicsError("token id out of vocabulary range")
    D = len(docs)
    alpha = config.effective_alpha
    prior = _prior_matrix(config, n_words, word_prior, K)
    prior_sum = prior.sum(axis=1)

    z = CounterRng(config.seed, "lda-init").integers(tokens.size, K).astype(np.int32)
    n_kw = np.zeros((K, n_words), dtype=np.int64)
    n_dk = np.zeros((D, K), dtype=np.int64)
    np.add.at(n_kw, (z, tokens), 1)
    np.add.at(n_dk, (doc_of, z), 1)
    n_k = n_kw.sum(axis=1)

    rng = CounterRng(config.seed, "lda-gibbs")
    n_post = config.iterations - config.burn_in
    z_history = (np.empty((config.iterations, tokens.size), dtype=np.int32)
                 if record_history else np.empty((0, 0), dtype=np.int32))
    acc_kw = np.zeros((K, n_words), dtype=np.int64)
    acc_dk = np.zeros((D, K), dtype=np.int64)
    dummy_hist = np.empty((0, 0), dtype=np.int32)

    chunk = max(1, _CHUNK_BUDGET // max(1, tokens.size))
    done = 0
    while done < config.iterations and tokens.size:
        todo = min(chunk, config.iterations - done)
        uniforms = rng.uniforms(todo * tokens.size).reshape(todo, tokens.size)
        hist_slice = z_history[done:done + todo] if record_history else dummy_hist
        # split the chunk at the burn-in boundary so accumulation starts cleanly
        if config.average_counts and done < config.burn_in < done + todo:
            pre = config.burn_in - done
            gibbs_sweeps(tokens, doc_of, z, n_kw, n_dk, n_k, prior, prior_sum,
                         alpha, uniforms[:pre],
                         record_history, z_history[done:done + pre] if record_history else dummy_hist,
                         False, acc_kw, acc_dk)
            gibbs_sweeps(tokens, doc_of, z, n_kw, n_dk, n_k, prior, prior_sum,
                         alpha, uniforms[pre:],
                         record_history, z_history[done + pre:done + todo] if record_history else dummy_hist,
                         True, acc_kw, acc_dk)
        else:
            accumulate = config.average_counts and done >= config.burn_in
            gibbs_sweeps(tokens, doc_of, z, n_kw, n_dk, n_k, prior, prior_sum,
                         alpha, uniforms, record_history, hist_slice,
                         accumulate, acc_kw, acc_dk)
        done += todo

    if config.average_counts and n_post > 0 and tokens.size:
        kw = acc_kw / n_post
        dk = acc_dk / n_post
        k_tot = kw.sum(axis=1)
    else:
        kw, dk, k_tot = n_kw, n_dk, n_k
    phi = (kw + prior) / (k_tot + prior_sum)[:, None]
    doc_len = np.diff(offsets)
    theta = (dk + alpha) / (doc_len + K * alpha)[:, None]

    assignments = tuple(z[offsets[d]:offsets[d + 1]].copy() for d in range(D))
    doc_ids = tuple(getattr(doc, "article_id", str(d)) for d, doc in enumerate(docs))
    return TopicModel(phi=phi, theta=theta, assignments=assignments,
                      n_kw=n_kw, n_dk=n_dk, n_k=n_k, config=config,
                      doc_ids=doc_ids, vocab_hash=vocab_hash,
                      z_history=z_history if record_history else None,
                      word_prior=word_prior if word_prior is not None else None)


def fold_in(doc, model: TopicModel, sweeps: int = 100, seed: int = 0) -> np.ndarray:
    """Infer theta for one document against frozen model counts."""
    ids = np.asarray(_token_ids(doc), dtype=np.int32)
    K = model.n_topics
    alpha = model.config.effective_alpha if model.config is not None else 50.0 / K
    if ids.size == 0:
        return np.full(K, 1.0 / K)
    if int(ids.max()) >= model.n_words:
        raise TopicsError("token id out of vocabulary range")
    beta = model.config.beta if model.config is not None else 0.01
    prior = (model.word_prior if model.word_prior is not None
             else np.full((K, model.n_words), beta, dtype=np.float64))
    prior_sum = prior.sum(axis=1)
    z = CounterRng(seed, "foldin-init").integers(ids.size, K).astype(np.int32)
    n_dk = np.bincount(z, minlength=K).astype(np.int64)
    uniforms = CounterRng(seed, "foldin-gibbs").uniforms(sweeps * ids.size) \
        .reshape(sweeps, ids.size)
    fold_in_sweeps(ids, z, model.n_kw, model.n_k, n_dk, prior, prior_sum,
                   alpha, uniforms)
    return (n_dk + alpha) / (ids.size + K * alpha)


def _doc_sets(docs) -> list:
    return [set(_token_ids(d)) for d in docs]


def top_words(model: TopicModel, m: int = 10) -> list:
    """Per-topic (word_id, phi) lists, descending phi, ties to the lower id."""
    out = []
    V = model.n_words
    m = min(m, V)
    ids = np.arange(V)
    for k in range(model.n_topics):
        order = np.lexsort((ids, -model.phi[k]))[:m]
        out.append([(int(w), float(model.phi[k, w])) for w in order])
    return out


def umass_coherence(model: TopicModel, docs, top_m: int = 10):
    """UMass topic coherence from co-document frequencies.

    For each topic's top-m words (by descending phi) the score is the mean
    over ordered pairs i < j of log((D(w_i, w_j) + 1) / D(w_j)).  Pairs whose
    conditioning word never occurs are skipped; a topic without at least
    2 usable top words scores 0 with a warning.  Returns (per-topic array,
    mean).
    """
    sets = _doc_sets(docs)
    ranked = top_words(model, top_m)
    scores = np.zeros(model.n_topics)
    for k, words in enumerate(ranked):
        ids = [w for w, p in words if p > 0.0]
        if len(ids) < 2:
            warnings.warn(f"topic {k}: fewer than 2 usable top words, coherence 0")
            continue
        df = {w: sum(1 for s in sets if w in s) for w in ids}
        vals = []
        for j in range(1, len(ids)):
            wj = ids[j]
            if df[wj] == 0:
                warnings.warn(f"topic {k}: word {wj} absent from scoring docs, pair skipped")
                continue
            for i in range(j):
                wi = ids[i]
                co = sum(1 for s in sets if wi in s and wj in s)
                vals.append(np.log((co + 1.0) / df[wj]))
        if not vals:
            warnings.warn(f"topic {k}: no scorable word pairs, coherence 0")
            continue
        scores[k] = float(np.mean(vals))
    return scores, float(np.mean(scores))


def npmi_coherence(model: TopicModel, docs, top_m: int = 10, window: int = 20):
    """Sliding-window NPMI coherence (window 20 by default).

    Probabilities are virtual-document frequencies over all windows; a pair
    that never co-occurs scores -1 (the NPMI limit).  Returns (per-topic
    array, mean).
    """
    windows = []
    for doc in docs:
        ids = _token_ids(doc)
        if not ids:
            continue
        if len(ids) <= window:
            windows.append(set(ids))
        else:
            for s in range(len(ids) - window + 1):
                windows.append(set(ids[s:s + window]))
    n_win = len(windows)
    if n_win == 0:
        raise TopicsError("no windows to score coherence on")
    ranked = top_words(model, top_m)
    scores = np.zeros(model.n_topics)
    for k, words in enumerate(ranked):
        ids = [w for w, p in words if p > 0.0]
        if len(ids) < 2:
            warnings.warn(f"topic {k}: fewer than 2 usable top words, coherence 0")
            continue
        cnt = {w: sum(1 for s in windows if w in s) for w in ids}
        vals = []
        for j in range(1, len(ids)):
            for i in range(j):
                wi, wj = ids[i], ids[j]
                if cnt[wi] == 0 or cnt[wj] == 0:
                    continue
                co = sum(1 for s in windows if wi in s and wj in s)
                if co == 0:
                    vals.append(-1.0)
                    continue
                p_ij = co / n_win
                pmi = np.log(p_ij / (cnt[wi] / n_win * cnt[wj] / n_win))
                vals.append(float(pmi / -np.log(p_ij)))
        if not vals:
            warnings.warn(f"topic {k}: no scorable word pairs, coherence 0")
            continue
        scores[k] = float(np.mean(vals))
    return scores, float(np.mean(scores))


def coherence(model: TopicModel, docs, top_m: int = 10,
              metric: str = "umass", window: int = 20):
    if metric == "umass":
        return umass_coherence(model, docs, top_m)
    if metric == "npmi":
        return npmi_coherence(model, docs, top_m, window)
    raise ValueError(f"unknown coherence metric {metric!r}")


def log_perplexity(model: TopicModel, docs, sweeps: int = 100, seed: int = 0) -> float:
    """Per-word held-out log-likelihood (natural log, negative).

    L = sum_d sum_w log(theta_d . phi[:, w]) / N_total with theta from
    fold-in.  Out-of-vocabulary tokens must already be dropped; if nothing
    remains the call errors.
    """
    total, n_tokens = 0.0, 0
    for d, doc in enumerate(docs):
        ids = np.asarray(_token_ids(doc), dtype=np.int64)
        if ids.size == 0:
            continue
        theta = fold_in(ids, model, sweeps=sweeps, seed=derive_seed(seed, "ppl", d))
        word_probs = theta @ model.phi[:, ids]
        total += float(np.log(word_probs).sum())
        n_tokens += ids.size
    if n_tokens == 0:
        raise TopicsError("all held-out tokens are out of vocabulary")
    return total / n_tokens


@dataclass(frozen=True)
class SelectionReport:
    ks: tuple
    coherences: tuple
    log_perplexities: tuple
    chosen_k: int
    rule: str = "max-coherence"

    def __post_init__(self):
        best = max(self.coherences)
        first = min(k for k, c in zip(self.ks, self.coherences) if c == best)
        if self.chosen_k != first:
            raise ValueError("chosen_k must attain the max coherence (ties -> smallest K)")


def sweep_k(docs, k_values: Iterable[int], template: LdaConfig,
            heldout=None, top_m: int = 10, fold_sweeps: int = 100) -> SelectionReport:
    """Fit each K (seeded per K off the template seed), score coherence and
    log-perplexity, and select the K with maximal coherence (ties -> smallest).

    Perplexity is scored on `heldout` when given, else in-sample on `docs`.
    """
    ks = sorted(set(int(k) for k in k_values))
    if not ks:
        raise TopicsError("empty K range")
    docs = list(docs)
    score_docs = list(heldout) if heldout is not None else docs
    cohs, ppls = [], []
    for k in ks:
        cfg = replace(template, n_topics=k, seed=derive_seed(template.seed, "sweep-k", k))
        model = fit_lda(docs, cfg)
        _, coh = umass_coherence(model, docs, top_m)
        ppl = log_perplexity(model, score_docs, sweeps=fold_sweeps,
                             seed=derive_seed(template.seed, "sweep-ppl", k))
        cohs.append(coh)
        ppls.append(ppl)
    best = max(cohs)
    chosen = ks[cohs.index(best)]
    return SelectionReport(tuple(ks), tuple(cohs), tuple(ppls), chosen)


def tv_distance(p, q) -> float:
    """Total-variation distance between two distributions."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    return 0.5 * float(np.abs(p - q).sum())
