"""Spatio-temporal aggregation: volume, topic mass, and sentiment counts per
district, division, and region-week cell.

Every aggregation conserves its input total: articles that cannot be placed
land in the explicit UNRESOLVED bucket, and foreign locations roll up to the
synthetic INTERNATIONAL region.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .corpus import Corpus, Gazetteer, INTERNATIONAL, UNRESOLVED
from .textprep import PreparedCorpus, resolve_article_region, week_index
from .topics import TopicModel, fold_in
from .rng import derive_seed


class GeoError(Exception):
    pass


def region_order(gazetteer: Gazetteer) -> tuple:
    """Fixed row order for grids: the 8 divisions, INTERNATIONAL, UNRESOLVED."""
    return tuple(gazetteer.divisions) + (INTERNATIONAL, UNRESOLVED)


def _division_of(article, gazetteer) -> str:
    region = resolve_article_region(article, gazetteer)
    return region[1] if isinstance(region, tuple) else UNRESOLVED


def _district_of(article, gazetteer) -> str:
    region = resolve_article_region(article, gazetteer)
    return region[0] if isinstance(region, tuple) else UNRESOLVED


def aggregate_volume(corpus: Corpus, gazetteer: Gazetteer,
                     level: str = "division") -> dict:
    """region -> article count; counts always sum to len(corpus)."""
    if level not in ("district", "division"):
        raise GeoError(f"unknown level {level!r}")
    pick = _division_of if level == "division" else _district_of
    out = {}
    for art in corpus:
        key = pick(art, gazetteer)
        out[key] = out.get(key, 0) + 1
    return out


def rollup_districts(district_counts: dict, gazetteer: Gazetteer) -> dict:
    """district counts -> division counts via the gazetteer (exact)."""
    out = {}
    for district, count in district_counts.items():
        if district == UNRESOLVED:
            division = UNRESOLVED
        else:
            division = gazetteer.district_to_division[district]
        out[division] = out.get(division, 0) + count
    return out


@dataclass(frozen=True)
class RegionWeekGrid:
    measure: str
    regions: tuple
    matrix: np.ndarray  # (n_regions, n_weeks)

    @property
    def n_weeks(self) -> int:
        return self.matrix.shape[1]

    def row(self, region: str) -> np.ndarray:
        return self.matrix[self.regions.index(region)]

    def total(self) -> float:
        return float(self.matrix.sum())


def volume_grid(corpus: Corpus, gazetteer: Gazetteer) -> RegionWeekGrid:
    """Article counts per (region, week); cells sum to the corpus size."""
    regions = region_order(gazetteer)
    origin = corpus.start_date
    n_weeks = week_index(corpus.end_date, origin) + 1
    mat = np.zeros((len(regions), n_weeks))
    index = {r: i for i, r in enumerate(regions)}
    for art in corpus:
        r = index[_division_of(art, gazetteer)]
        mat[r, week_index(art.published_date, origin)] += 1
    return RegionWeekGrid("volume", regions, mat)


def topic_by_region(prepared: PreparedCorpus, model: TopicModel,
                    level: str = "division", fold_sweeps: int = 50,
                    seed: int = 0, hard_assign: bool = False) -> dict:
    """region -> topic distribution (normalized mean of member theta rows).

    Documents present in the model reuse their fitted theta; anything else
    is folded in.  With hard_assign=True each document contributes its
    argmax topic as a one-hot row instead of its full theta (flag variant).
    Regions with zero documents are omitted.
    """
    if level not in ("district", "division"):
        raise GeoError(f"unknown level {level!r}")
    by_id = {}
    if model.doc_ids is not None:
        by_id = {doc_id: i for i, doc_id in enumerate(model.doc_ids)}
    sums, counts = {}, {}
    for d, doc in enumerate(prepared.docs):
        if doc.region is None:
            raise GeoError("prepared corpus lacks regions; pass a gazetteer to prepare_corpus")
        if isinstance(doc.region, tuple):
            key = doc.region[0] if level == "district" else doc.region[1]
        else:
            key = UNRESOLVED
        if doc.article_id in by_id:
            theta = model.theta[by_id[doc.article_id]]
        else:
            theta = fold_in(doc, model, sweeps=fold_sweeps,
                            seed=derive_seed(seed, "geo-fold", d))
        if hard_assign:
            row = np.zeros(model.n_topics)
            row[int(np.argmax(theta))] = 1.0
            theta = row
        sums[key] = sums.get(key, 0.0) + theta
        counts[key] = counts.get(key, 0) + 1
    return {r: sums[r] / sums[r].sum() for r in sums}


def sentiment_grid(corpus: Corpus, gazetteer: Gazetteer,
                   predictions: Optional[dict] = None):
    """(positive grid, negative grid) per (region, week).

    Gold labels are used where present; `predictions` (article id -> label)
    fills the rest.  Any article left without a sentiment is an error: the
    two grids must add up cellwise to the volume grid.
    """
    predictions = predictions or {}
    regions = region_order(gazetteer)
    origin = corpus.start_date
    n_weeks = week_index(corpus.end_date, origin) + 1
    pos = np.zeros((len(regions), n_weeks))
    neg = np.zeros((len(regions), n_weeks))
    index = {r: i for i, r in enumerate(regions)}
    missing = []
    for art in corpus:
        label = art.sentiment_label or predictions.get(art.id)
        if label not in ("positive", "negative"):
            missing.append(art.id)
            continue
        r = index[_division_of(art, gazetteer)]
        w = week_index(art.published_date, origin)
        (pos if label == "positive" else neg)[r, w] += 1
    if missing:
        shown = ", ".join(missing[:20])
        more = f" (+{len(missing) - 20} more)" if len(missing) > 20 else ""
        raise GeoError(f"articles without sentiment: {shown}{more}")
    return (RegionWeekGrid("sentiment_pos", regions, pos),
            RegionWeekGrid("sentiment_neg", regions, neg))
