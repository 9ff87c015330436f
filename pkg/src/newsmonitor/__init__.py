"""News-corpus monitoring toolkit.

Ingests a dated, region-tagged news corpus and derives monitoring views:
topic models (static and week-coupled), classical time-series
decomposition of article volume, region/week aggregation grids, and
from-scratch neural classifiers for article class and sentiment, all
seeded and deterministic end to end.
"""

from .corpus import (CLASS_LABELS, INTERNATIONAL, SENTIMENT_LABELS,
                     UNRESOLVED, Article, Corpus, CorpusError, Gazetteer,
                     default_gazetteer, load_corpus, load_gazetteer,
                     resolve_region, save_corpus, split_dataset)
from .dtm import (DtmConfig, DtmModel, consecutive_tv, fit_dtm,
                  slice_by_week, slice_top_words, topic_trajectory)
from .geo import (RegionWeekGrid, aggregate_volume, region_order,
                  rollup_districts, sentiment_grid, topic_by_region,
                  volume_grid)
from .metrics import ConfusionMatrix, EvalReport, confusion_matrix, evaluate
from .pipeline import RunConfig, StageError, load_run_config, run_pipeline
from .rng import CounterRng, derive_seed
from .textprep import (PrepConfig, PreparedCorpus, TokenizedDoc, Vocabulary,
                       load_prep_config, normalize, prep_tokens,
                       prepare_corpus, strip_suffix, tokenize, week_index)
from .topics import (LdaConfig, SelectionReport, TopicModel, coherence,
                     fit_lda, fold_in, log_perplexity, sweep_k, top_words,
                     tv_distance, umass_coherence)
from .tsdecomp import (Decomposition, VolumeSeries, build_volume_series,
                       decompose, reconstruct)

__version__ = "1.0.0"

__all__ = [
    "Article", "CLASS_LABELS", "ConfusionMatrix", "Corpus", "CorpusError",
    "CounterRng", "Decomposition", "DtmConfig", "DtmModel", "EvalReport",
    "Gazetteer", "INTERNATIONAL", "LdaConfig", "PrepConfig",
    "PreparedCorpus", "RegionWeekGrid", "RunConfig", "SENTIMENT_LABELS",
    "SelectionReport", "StageError", "TokenizedDoc", "TopicModel",
    "UNRESOLVED", "Vocabulary", "VolumeSeries", "aggregate_volume",
    "build_volume_series", "coherence", "confusion_matrix", "consecutive_tv",
    "decompose", "default_gazetteer", "derive_seed", "evaluate", "fit_dtm",
    "fit_lda", "fold_in", "load_corpus", "load_gazetteer", "load_prep_config",
    "load_run_config", "log_perplexity", "normalize", "prep_tokens",
    "prepare_corpus", "reconstruct", "region_order", "resolve_region",
    "rollup_districts", "run_pipeline", "save_corpus", "sentiment_grid",
    "slice_by_week", "slice_top_words", "split_dataset", "strip_suffix",
    "sweep_k", "tokenize", "top_words", "topic_by_region", "topic_trajectory",
    "tv_distance", "umass_coherence", "volume_grid", "week_index",
]
