"""Dynamic topic modeling over weekly slices.

Slice 0 is a plain LDA fit; every later slice is fitted with word-prior
pseudo-counts beta + kappa * phi_prev, which carries topic identity forward
(no re-matching) and smooths evolution.  Coupling is forward-only: a new
week never rewrites earlier slices.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .corpus import Corpus
from .rng import derive_seed
from .textprep import PreparedCorpus, week_index
from .topics import LdaConfig, TopicsError, fit_lda, tv_distance


@dataclass(frozen=True)
class DtmConfig:
    n_topics: int
    alpha: Optional[float] = None
    beta: float = 0.01
    kappa: float = 50.0
    iterations: int = 300
    burn_in: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.kappa < 0:
            raise ValueError("kappa must be >= 0")
        # remaining bounds are enforced by the per-slice LdaConfig
        self.static_config(0)


    def static_config(self, t: int) -> LdaConfig:
        """The exact LdaConfig used for slice t (public so independent
        static fits can reproduce a slice bit-for-bit at kappa = 0)."""
        return LdaConfig(n_topics=self.n_topics, alpha=self.alpha, beta=self.beta,
                         iterations=self.iterations, burn_in=self.burn_in,
                         seed=slice_seed(self.seed, t))


def slice_seed(seed: int, t: int) -> int:
    """Deterministic per-slice seed."""
    return derive_seed(seed, "dtm-slice", t)


@dataclass(frozen=True)
class DtmModel:
    phis: np.ndarray         # (T, K, V)
    prevalence: np.ndarray   # (T, K); NaN rows mark empty slices
    slice_sizes: tuple       # token count per slice
    config: Optional[DtmConfig] = None

    @property
    def n_slices(self) -> int:
        return self.phis.shape[0]

    @property
    def n_topics(self) -> int:
        return self.phis.shape[1]


def slice_by_week(corpus) -> list:
    """Group a Corpus (articles) or PreparedCorpus (tokenized docs) into
    calendar-week slices; week 0 starts at the corpus minimum date and empty
    interior weeks are kept as empty groups."""
    if isinstance(corpus, PreparedCorpus):
        groups = [[] for _ in range(corpus.n_weeks)]
        for doc in corpus.docs:
            groups[doc.week_index].append(doc)
        return groups
    if isinstance(corpus, Corpus):
        origin = corpus.start_date
        n = week_index(corpus.end_date, origin) + 1
        groups = [[] for _ in range(n)]
        for art in corpus:
            groups[week_index(art.published_date, origin)].append(art)
        return groups
    raise TypeError("expected Corpus or PreparedCorpus")


def fit_dtm(slices: Sequence, config: DtmConfig, n_words: int) -> DtmModel:
    """Fit the slice-coupled model.

    Empty slices copy the previous phi and get NaN prevalence.  Leading
    empty slices (before anything has been fitted) copy the first fitted phi
    backward so trajectories stay aligned to calendar weeks.
    """
    slices = [list(s) for s in slices]
    if not slices or all(len(s) == 0 for s in slices):
        raise TopicsError("need at least one non-empty slice")
    K = config.n_topics
    first = next(t for t, s in enumerate(slices) if s)
    distinct = set()
    for doc in slices[first]:
        distinct.update(getattr(doc, "token_ids", doc))
    if K > len(distinct):
        raise TopicsError(
            f"n_topics={K} exceeds the {len(distinct)} distinct words in the first non-empty slice")

    phis = np.empty((len(slices), K, n_words))
    prevalence = np.full((len(slices), K), np.nan)
    sizes = []
    phi_prev = None
    for t, docs in enumerate(slices):
        n_tokens = sum(len(getattr(d, "token_ids", d)) for d in docs)
        sizes.append(n_tokens)
        if n_tokens == 0:
            if phi_prev is not None:
                phis[t] = phi_prev
            continue
        word_prior = None if phi_prev is None else config.beta + config.kappa * phi_prev
        model = fit_lda(docs, config.static_config(t), n_words=n_words,
                        word_prior=word_prior)
        phis[t] = model.phi
        prevalence[t] = model.n_k / n_tokens
        phi_prev = model.phi
    # leading empty slices inherit the first fitted phi
    for t in range(first):
        phis[t] = phis[first]
    return DtmModel(phis=phis, prevalence=prevalence, slice_sizes=tuple(sizes),
                    config=config)


def topic_trajectory(model: DtmModel, k: int) -> np.ndarray:
    """Prevalence of topic k per slice; NaN marks empty slices."""
    if not (0 <= k < model.n_topics):
        raise IndexError(f"topic {k} out of range")
    return model.prevalence[:, k].copy()


def slice_top_words(model: DtmModel, m: int = 10) -> list:
    """Per (slice, topic) ranked (word_id, phi) lists, ties to the lower id."""
    T, K, V = model.phis.shape
    m = min(m, V)
    ids = np.arange(V)
    out = []
    for t in range(T):
        per_topic = []
        for k in range(K):
            order = np.lexsort((ids, -model.phis[t, k]))[:m]
            per_topic.append([(int(w), float(model.phis[t, k, w])) for w in order])
        out.append(per_topic)
    return out


def consecutive_tv(model: DtmModel) -> np.ndarray:
    """(T-1, K) matrix of TV distances between consecutive slice phis."""
    T, K, _ = model.phis.shape
    out = np.empty((T - 1, K))
    for t in range(1, T):
        for k in range(K):
            out[t - 1, k] = tv_distance(model.phis[t, k], model.phis[t - 1, k])
    return out
