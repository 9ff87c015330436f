"""End-to-end orchestration: ingest through reports in one call.

The pipeline runs the stages in a fixed order (ingest, preprocess, volume,
decomposition, topic-count sweep, topic fit, slice-coupled topics over
weeks, classifier/sentiment training, geographic aggregation), writing each
stage's artifacts into the output directory as it goes. Stages can be
switched off individually; later stages that depend on a skipped one are
skipped with a notice rather than failing.

Every random decision derives from the single run seed, and every writer
is deterministic, so rerunning a config reproduces all data files byte for
byte. Wall-clock timestamps appear only in manifest.json, which also lists
a content hash for every emitted file.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

import numpy as np

from . import report
from .corpus import (CLASS_LABELS, SENTIMENT_LABELS, Corpus,
                     default_gazetteer, load_corpus, load_gazetteer,
                     split_dataset)
from .dtm import DtmConfig, fit_dtm, slice_by_week, slice_top_words
from .geo import (aggregate_volume, region_order, sentiment_grid,
                  topic_by_region, volume_grid)
from .metrics import evaluate
from .neural.models import (ClassifierSpec, SentimentSpec, build_classifier,
                            build_sentiment)
from .neural.train import NetVocab, pad_batch, train
from .rng import derive_seed
from .textprep import load_prep_config, prepare_corpus
from .topics import LdaConfig, fit_lda, sweep_k, top_words, umass_coherence
from .tsdecomp import build_volume_series, decompose


class StageError(Exception):
    """Wraps a failure with the pipeline stage it happened in."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass
class RunConfig:
    """Flat run settings; field names mirror the dotted config-file keys."""
    io_corpus: str = ""
    io_out_dir: str = "monitor_out"
    io_resources: Optional[str] = None
    io_gazetteer: Optional[str] = None
    seed: int = 7

    prep_min_letters: int = 6
    prep_max_vocab: Optional[int] = None

    decompose_model: str = "multiplicative"
    decompose_period: int = 7
    decompose_offset: Optional[float] = None

    topics_k: int = 9
    topics_alpha: Optional[float] = None
    topics_beta: float = 0.01
    topics_iterations: int = 400
    topics_burn_in: int = 150
    topics_top_words: int = 10
    topics_sweep: str = "5,7,9,11"

    dtm_kappa: float = 50.0
    dtm_iterations: int = 250
    dtm_burn_in: int = 100

    split_train: float = 0.8
    split_validation: float = 0.1
    split_test: float = 0.1

    classifier_embed_dim: int = 32
    classifier_hidden: int = 16
    classifier_seq_cap: int = 64
    classifier_vocab_cap: int = 2000
    classifier_batch_size: int = 16
    classifier_epochs: int = 3
    classifier_lr: float = 1e-3

    sentiment_embed_dim: int = 32
    sentiment_seq_cap: int = 64
    sentiment_vocab_cap: int = 2000
    sentiment_conv_filters: int = 16
    sentiment_lstm_hidden: int = 12
    sentiment_dense_hidden: int = 16
    sentiment_batch_size: int = 16
    sentiment_epochs: int = 3
    sentiment_lr: float = 1e-3
    sentiment_dropout: float = 0.5

    stages_volume: bool = True
    stages_decompose: bool = True
    stages_sweep: bool = True
    stages_topics: bool = True
    stages_dtm: bool = True
    stages_train: bool = True
    stages_geo: bool = True


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_optional(parser):
    def parse(text: str):
        t = text.strip()
        if t == "" or t.lower() == "none":
            return None
        return parser(t)
    return parse


_FIELD_PARSERS = {
    "io_corpus": str, "io_out_dir": str,
    "io_resources": _parse_optional(str), "io_gazetteer": _parse_optional(str),
    "seed": int,
    "prep_min_letters": int, "prep_max_vocab": _parse_optional(int),
    "decompose_model": str, "decompose_period": int,
    "decompose_offset": _parse_optional(float),
    "topics_k": int, "topics_alpha": _parse_optional(float),
    "topics_beta": float, "topics_iterations": int, "topics_burn_in": int,
    "topics_top_words": int, "topics_sweep": str,
    "dtm_kappa": float, "dtm_iterations": int, "dtm_burn_in": int,
    "split_train": float, "split_validation": float, "split_test": float,
    "classifier_embed_dim": int, "classifier_hidden": int,
    "classifier_seq_cap": int, "classifier_vocab_cap": int,
    "classifier_batch_size": int, "classifier_epochs": int,
    "classifier_lr": float,
    "sentiment_embed_dim": int, "sentiment_seq_cap": int,
    "sentiment_vocab_cap": int, "sentiment_conv_filters": int,
    "sentiment_lstm_hidden": int, "sentiment_dense_hidden": int,
    "sentiment_batch_size": int, "sentiment_epochs": int,
    "sentiment_lr": float, "sentiment_dropout": float,
    "stages_volume": _parse_bool, "stages_decompose": _parse_bool,
    "stages_sweep": _parse_bool, "stages_topics": _parse_bool,
    "stages_dtm": _parse_bool, "stages_train": _parse_bool,
    "stages_geo": _parse_bool,
}

CONFIG_KEYS = tuple(f.name.replace("_", ".", 1) for f in fields(RunConfig))


def _field_for_key(key: str) -> str:
    name = key.strip().replace(".", "_")
    if name not in _FIELD_PARSERS:
        raise ValueError(f"unknown config key {key.strip()!r}")
    return name


def parse_config_text(text: str) -> dict:
    """key = value lines (# comments, blank lines ignored) -> {field: value}."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        name = _field_for_key(key)
        try:
            out[name] = _FIELD_PARSERS[name](value.strip())
        except ValueError as exc:
            raise ValueError(f"line {lineno}: bad value for {key.strip()!r}: {exc}")
    return out


def load_run_config(path=None, overrides: Optional[dict] = None) -> RunConfig:
    """Config file first, then dotted-key overrides (e.g. from CLI flags)."""
    values = {}
    if path is not None:
        values.update(parse_config_text(Path(path).read_text(encoding="utf-8")))
    for key, value in (overrides or {}).items():
        name = _field_for_key(key)
        values[name] = (_FIELD_PARSERS[name](value)
                        if isinstance(value, str) else value)
    return RunConfig(**values)


def config_snapshot(config: RunConfig) -> dict:
    """Dotted-key view of the config for the manifest."""
    return {f.name.replace("_", ".", 1): getattr(config, f.name)
            for f in fields(RunConfig)}


@dataclass(frozen=True)
class PipelineResult:
    out_dir: Path
    artifacts: tuple
    notices: tuple
    manifest: Path


class _Run:
    """Mutable state threaded through the stages of one pipeline run."""

    def __init__(self, config: RunConfig):
        if not config.io_corpus:
            raise ValueError("io.corpus is required")
        self.config = config
        self.out = Path(config.io_out_dir)
        self.out.mkdir(parents=True, exist_ok=True)
        self.artifacts = []
        self.notices = []
        self.corpus = None
        self.gazetteer = None
        self.prepared = None
        self.series = None
        self.topic_model = None
        self.sentiment_net = None
        self.sentiment_vocab = None
        self.sentiment_spec = None

    def path(self, name: str) -> Path:
        return self.out / name

    def emit_csv(self, name, rows, header=None):
        target = self.path(name)
        report.write_csv(target, rows, header=header)
        self.artifacts.append(target)
        return target

    def emit_svg(self, name, svg):
        target = self.path(name)
        report.write_svg(target, svg)
        self.artifacts.append(target)
        return target

    def emit_text(self, name, text):
        target = self.path(name)
        target.write_text(text, encoding="utf-8", newline="\n")
        self.artifacts.append(target)
        return target

    def notice(self, message: str):
        self.notices.append(message)


def _stage_ingest(run: _Run):
    cfg = run.config
    run.corpus = load_corpus(cfg.io_corpus)
    run.gazetteer = (load_gazetteer(cfg.io_gazetteer)
                     if cfg.io_gazetteer else default_gazetteer())
    corpus = run.corpus
    rows = [("articles", len(corpus)),
            ("rejected_records", len(corpus.rejects)),
            ("start_date", corpus.start_date),
            ("end_date", corpus.end_date)]
    for attr in ("language", "class_label", "sentiment_label", "source"):
        for value, count in sorted(corpus.counts_by(attr).items(),
                                   key=lambda kv: str(kv[0])):
            rows.append((f"{attr}:{value}", count))
    run.emit_csv("corpus_summary.csv", rows, header=["metric", "value"])
    if corpus.rejects:
        run.emit_csv("rejected_records.csv",
                     [(r.line, r.message) for r in corpus.rejects],
                     header=["line", "message"])
        run.notice(f"{len(corpus.rejects)} records rejected at ingest")


def _stage_prep(run: _Run):
    cfg = run.config
    prep_cfg = load_prep_config(
        resource_dir=Path(cfg.io_resources) if cfg.io_resources else None,
        min_letters=cfg.prep_min_letters, max_vocab=cfg.prep_max_vocab)
    run.prepared = prepare_corpus(run.corpus, prep_cfg, gazetteer=run.gazetteer)
    vocab = run.prepared.vocab
    run.emit_csv("vocabulary.csv",
                 [(i, w, vocab.doc_freq[i], vocab.term_freq[i])
                  for i, w in enumerate(vocab.id_to_word)],
                 header=["id", "word", "doc_freq", "term_freq"])
    run.emit_csv("prepared_docs.csv",
                 [(d.article_id, d.week_index, d.region, len(d.token_ids))
                  for d in run.prepared.docs],
                 header=["article_id", "week", "region", "token_count"])


def _stage_volume(run: _Run):
    run.series = build_volume_series(run.corpus)
    dates = run.series.dates()
    values = run.series.values
    run.emit_csv("volume.csv", zip(dates, values), header=["date", "count"])
    labels = [d.isoformat() for d in dates]
    run.emit_svg("volume.svg", report.svg_line_chart(
        {"articles per day": list(values)}, "Daily article volume",
        x_labels=labels))


def _stage_decompose(run: _Run):
    cfg = run.config
    if run.series is None:
        run.notice("decompose skipped: volume stage did not run")
        return
    offset = cfg.decompose_offset
    if (cfg.decompose_model == "multiplicative" and offset is None
            and float(np.min(run.series.values)) <= 0.0):
        offset = 1.0
        run.notice("decompose: zero counts present, applied offset=1.0")
    dec = decompose(run.series, model=cfg.decompose_model,
                    period=cfg.decompose_period, offset=offset)
    dates = dec.dates()
    rows = [(dates[i], dec.observed[i], dec.trend[i], dec.seasonal[i],
             dec.residual[i]) for i in range(len(dec.observed))]
    run.emit_csv("decomposition.csv", rows,
                 header=["date", "observed", "trend", "seasonal", "residual"])
    run.emit_csv("seasonal_indices.csv",
                 [(i, v) for i, v in enumerate(dec.seasonal_indices)],
                 header=["phase", "index"])
    run.emit_svg("decomposition.svg", report.svg_decomposition(
        dec, title=f"Volume decomposition ({dec.model}, period {dec.period})"))


def _lda_template(run: _Run, seed_tag: str) -> LdaConfig:
    cfg = run.config
    return LdaConfig(n_topics=max(cfg.topics_k, 2), alpha=cfg.topics_alpha,
                     beta=cfg.topics_beta, iterations=cfg.topics_iterations,
                     burn_in=cfg.topics_burn_in,
                     seed=derive_seed(cfg.seed, seed_tag))


def _stage_sweep(run: _Run):
    cfg = run.config
    ks = [int(k) for k in cfg.topics_sweep.split(",") if k.strip()]
    if not ks:
        run.notice("sweep skipped: empty topics.sweep list")
        return None
    rep = sweep_k(run.prepared.docs, ks, _lda_template(run, "topics"))
    run.emit_csv("topic_sweep.csv",
                 [(k, c, p) for k, c, p in
                  zip(rep.ks, rep.coherences, rep.log_perplexities)],
                 header=["k", "umass_coherence", "log_perplexity"])
    run.emit_svg("topic_sweep.svg", report.svg_line_chart(
        {"UMass coherence": list(rep.coherences)},
        f"Topic-count sweep (chosen K={rep.chosen_k})",
        x_labels=[str(k) for k in rep.ks]))
    run.notice(f"sweep selected K={rep.chosen_k}")
    return rep.chosen_k


def _stage_topics(run: _Run, k: int):
    cfg = run.config
    prepared = run.prepared
    lda_cfg = replace(_lda_template(run, "topics"), n_topics=k)
    model = fit_lda(prepared.docs, lda_cfg, n_words=len(prepared.vocab),
                    vocab_hash=prepared.vocab.content_hash())
    run.topic_model = model
    words = prepared.vocab.id_to_word
    rows = []
    for topic, ranked in enumerate(top_words(model, cfg.topics_top_words)):
        for rank, (w, phi) in enumerate(ranked):
            rows.append((topic, rank, words[w], phi))
    run.emit_csv("topic_top_words.csv", rows,
                 header=["topic", "rank", "word", "phi"])
    per_topic, mean_coh = umass_coherence(model, prepared.docs,
                                          cfg.topics_top_words)
    run.emit_csv("topic_coherence.csv",
                 [(t, c) for t, c in enumerate(per_topic)]
                 + [("mean", mean_coh)],
                 header=["topic", "umass_coherence"])
    run.emit_csv("doc_topics.csv",
                 [(doc_id,) + tuple(model.theta[i])
                  for i, doc_id in enumerate(model.doc_ids)],
                 header=["article_id"] + [f"topic_{t}" for t in range(k)])
    share = model.n_k / max(model.n_k.sum(), 1)
    run.emit_svg("topic_share.svg", report.svg_bar_chart(
        [f"topic {t}" for t in range(k)], list(share),
        "Corpus-wide topic share"))
    target = run.path("topic_model.npz")
    report.save_topic_model(target, model)
    run.artifacts.append(target)


def _stage_dtm(run: _Run, k: int):
    cfg = run.config
    slices = slice_by_week(run.prepared)
    dtm_cfg = DtmConfig(n_topics=k, alpha=cfg.topics_alpha,
                        beta=cfg.topics_beta, kappa=cfg.dtm_kappa,
                        iterations=cfg.dtm_iterations,
                        burn_in=cfg.dtm_burn_in,
                        seed=derive_seed(cfg.seed, "dtm"))
    model = fit_dtm(slices, dtm_cfg, n_words=len(run.prepared.vocab))
    T = model.phis.shape[0]
    rows = [(t, w, model.prevalence[w, t])
            for t in range(k) for w in range(T)]
    run.emit_csv("dtm_prevalence.csv", rows,
                 header=["topic", "week", "prevalence"])
    words = run.prepared.vocab.id_to_word
    word_rows = []
    for w, per_topic in enumerate(slice_top_words(model, cfg.topics_top_words)):
        for t, ranked in enumerate(per_topic):
            for rank, (wid, phi) in enumerate(ranked):
                word_rows.append((t, w, rank, words[wid], phi))
    run.emit_csv("dtm_top_words.csv", word_rows,
                 header=["topic", "week", "rank", "word", "phi"])
    series = {f"topic {t}": [model.prevalence[w, t] for w in range(T)]
              for t in range(k)}
    run.emit_svg("dtm_trajectories.svg", report.svg_line_chart(
        series, f"Weekly topic prevalence (kappa={cfg.dtm_kappa:g})",
        x_labels=[f"w{w}" for w in range(T)]))
    target = run.path("dtm_model.npz")
    report.save_dtm_model(target, model)
    run.artifacts.append(target)


def _net_docs(run: _Run, ids, vocab: NetVocab, seq_cap: int, label_field):
    """Encoded docs plus label indices for the given article ids."""
    order = {d.article_id: d for d in run.prepared.docs}
    words = run.prepared.vocab
    docs, labels = [], []
    label_names = (CLASS_LABELS if label_field == "class_label"
                   else SENTIMENT_LABELS)
    for art_id in sorted(ids):
        doc = order[art_id]
        tokens = words.decode(doc.token_ids)
        docs.append(vocab.encode(tokens, seq_cap))
        art = run.corpus.by_id[art_id]
        labels.append(label_names.index(getattr(art, label_field)))
    return docs, labels


def _train_one(run: _Run, label_field: str, kind: str):
    cfg = run.config
    labeled = run.corpus.labeled(label_field)
    if not labeled:
        run.notice(f"{kind} training skipped: no {label_field} labels")
        return
    split = split_dataset(run.corpus,
                          (cfg.split_train, cfg.split_validation,
                           cfg.split_test),
                          seed=derive_seed(cfg.seed, "split", label_field),
                          label_field=label_field)
    if kind == "classifier":
        spec = ClassifierSpec(
            embed_dim=cfg.classifier_embed_dim, hidden=cfg.classifier_hidden,
            seq_cap=cfg.classifier_seq_cap, vocab_cap=cfg.classifier_vocab_cap,
            batch_size=cfg.classifier_batch_size, epochs=cfg.classifier_epochs,
            lr=cfg.classifier_lr, n_classes=len(CLASS_LABELS))
        label_names = CLASS_LABELS
    else:
        spec = SentimentSpec(
            embed_dim=cfg.sentiment_embed_dim, seq_cap=cfg.sentiment_seq_cap,
            vocab_cap=cfg.sentiment_vocab_cap,
            conv_filters=cfg.sentiment_conv_filters,
            lstm_hidden=cfg.sentiment_lstm_hidden,
            dense_hidden=cfg.sentiment_dense_hidden,
            batch_size=cfg.sentiment_batch_size, epochs=cfg.sentiment_epochs,
            lr=cfg.sentiment_lr, dropout=cfg.sentiment_dropout,
            n_classes=len(SENTIMENT_LABELS))
        label_names = SENTIMENT_LABELS

    net_vocab = NetVocab.from_vocabulary(run.prepared.vocab, spec.vocab_cap)
    tr_docs, tr_labels = _net_docs(run, split.train, net_vocab,
                                   spec.seq_cap, label_field)
    va_docs, va_labels = _net_docs(run, split.validation, net_vocab,
                                   spec.seq_cap, label_field)
    te_docs, te_labels = _net_docs(run, split.test, net_vocab,
                                   spec.seq_cap, label_field)

    builder = build_classifier if kind == "classifier" else build_sentiment
    net = builder(spec, vocab_size=len(net_vocab),
                  seed=derive_seed(cfg.seed, kind, "init"))
    result = train(net, spec, tr_docs, tr_labels, va_docs, va_labels,
                   seed=derive_seed(cfg.seed, kind, "train"))
    run.emit_csv(f"{kind}_training_log.csv", result.history_rows())

    target = run.path(f"{kind}.npz")
    report.save_net(target, net, spec, kind,
                    vocab_words=net_vocab.words, labels=label_names)
    run.artifacts.append(target)

    if te_docs:
        pred_idx, _ = net.predict(pad_batch(te_docs, spec.seq_cap))
        gold = [label_names[i] for i in te_labels]
        predicted = [label_names[int(i)] for i in pred_idx]
        rep = evaluate(gold, predicted, label_names)
        run.emit_text(f"{kind}_eval.json", rep.to_json() + "\n")
        run.emit_csv(f"{kind}_confusion.csv", rep.confusion.to_rows())
        run.notice(f"{kind} test accuracy {rep.accuracy:.3f} "
                   f"on {len(te_docs)} articles")
    if kind == "sentiment":
        run.sentiment_net = net
        run.sentiment_vocab = net_vocab
        run.sentiment_spec = spec


def _stage_geo(run: _Run):
    cfg = run.config
    corpus, gaz = run.corpus, run.gazetteer
    grid = volume_grid(corpus, gaz)
    week_header = ["region"] + [f"week_{w}" for w in range(grid.matrix.shape[1])]
    run.emit_csv("region_week_volume.csv",
                 [(r,) + tuple(int(v) for v in grid.matrix[i])
                  for i, r in enumerate(grid.regions)],
                 header=week_header)
    division_totals = aggregate_volume(corpus, gaz, "division")
    ordered = [r for r in region_order(gaz)]
    run.emit_csv("region_totals.csv",
                 [(r, division_totals.get(r, 0)) for r in ordered],
                 header=["region", "value"])
    district_totals = aggregate_volume(corpus, gaz, "district")
    run.emit_csv("district_totals.csv",
                 sorted(district_totals.items(), key=lambda kv: kv[0]),
                 header=["region", "value"])
    run.emit_svg("region_volume.svg", report.svg_bar_chart(
        ordered, [division_totals.get(r, 0) for r in ordered],
        "Article volume by division"))

    if run.topic_model is not None:
        mix = topic_by_region(run.prepared, run.topic_model,
                              seed=derive_seed(cfg.seed, "geo"))
        k = run.topic_model.n_topics
        run.emit_csv("region_topic_mix.csv",
                     [(r,) + tuple(mix[r]) for r in ordered if r in mix],
                     header=["region"] + [f"topic_{t}" for t in range(k)])

    missing = [a.id for a in corpus if a.sentiment_label is None]
    predictions = {}
    if missing and run.sentiment_net is not None:
        words = run.prepared.vocab
        docs = {d.article_id: d for d in run.prepared.docs}
        spec = run.sentiment_spec
        enc = [run.sentiment_vocab.encode(words.decode(docs[a].token_ids),
                                          spec.seq_cap) for a in missing]
        idx, _ = run.sentiment_net.predict(pad_batch(enc, spec.seq_cap))
        predictions = {a: SENTIMENT_LABELS[int(i)]
                       for a, i in zip(missing, idx)}
        run.notice(f"geo: predicted sentiment for {len(missing)} "
                   f"unlabeled articles")
    elif missing:
        run.notice(f"geo: sentiment grid skipped "
                   f"({len(missing)} articles lack sentiment labels)")
        return
    pos, neg = sentiment_grid(corpus, gaz, predictions)
    run.emit_csv("region_week_sentiment_positive.csv",
                 [(r,) + tuple(int(v) for v in pos.matrix[i])
                  for i, r in enumerate(pos.regions)], header=week_header)
    run.emit_csv("region_week_sentiment_negative.csv",
                 [(r,) + tuple(int(v) for v in neg.matrix[i])
                  for i, r in enumerate(neg.regions)], header=week_header)


def run_pipeline(config: RunConfig, include=None) -> PipelineResult:
    """Execute every enabled stage; artifacts land in config.io_out_dir.

    `include` restricts the run to the named stages (ingest always runs;
    "prep" is added automatically when a requested stage needs it). A
    failing stage raises StageError after the manifest is written, so
    artifacts from completed stages stay on disk and accounted for.
    """
    run = _Run(config)
    started = datetime.now(timezone.utc).isoformat()
    stages = [("ingest", _stage_ingest), ("prep", _stage_prep)]
    if config.stages_volume:
        stages.append(("volume", _stage_volume))
    if config.stages_decompose:
        stages.append(("decompose", _stage_decompose))

    chosen_k = {"k": max(config.topics_k, 2)}

    def sweep_stage(r):
        k = _stage_sweep(r)
        if k is not None:
            chosen_k["k"] = k

    if config.stages_sweep:
        stages.append(("sweep", sweep_stage))
    if config.stages_topics:
        stages.append(("topics", lambda r: _stage_topics(r, chosen_k["k"])))
    if config.stages_dtm:
        stages.append(("dtm", lambda r: _stage_dtm(r, chosen_k["k"])))
    if config.stages_train:
        stages.append(("train-classifier",
                       lambda r: _train_one(r, "class_label", "classifier")))
        stages.append(("train-sentiment",
                       lambda r: _train_one(r, "sentiment_label", "sentiment")))
    if config.stages_geo:
        stages.append(("geo", _stage_geo))

    if include is not None:
        wanted = set(include) | {"ingest"}
        needs_prep = wanted & {"prep", "sweep", "topics", "dtm",
                               "train-classifier", "train-sentiment", "geo"}
        if needs_prep:
            wanted.add("prep")
        stages = [(n, f) for n, f in stages if n in wanted]

    failure = None
    for name, fn in stages:
        try:
            fn(run)
        except Exception as exc:
            failure = StageError(name, exc)
            failure.__cause__ = exc
            break

    finished = datetime.now(timezone.utc).isoformat()
    manifest = report.write_manifest(
        run.out, run.artifacts, seed=config.seed,
        config_snapshot=config_snapshot(config),
        started=started, finished=finished)
    if failure is not None:
        raise failure
    return PipelineResult(run.out, tuple(str(p) for p in run.artifacts),
                          tuple(run.notices), manifest)
