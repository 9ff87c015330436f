"""Command-line front end.

One subcommand per analysis stage plus `report` for the whole bundle:

    ingest, prep, volume, decompose, topics {sweep,fit,top-words},
    dtm {fit,export}, train {classify,sentiment}, eval, predict, geo, report

Configuration comes from an optional `key = value` file (--config) plus a
flag per config key (e.g. --topics.k 9); flags win over the file. The
MONITOR_SEED environment variable outranks both.

Exit codes: 0 success, 1 usage error, 2 data error, 3 stage failure.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from pathlib import Path

from .corpus import CorpusError, load_corpus
from .metrics import MetricsError, evaluate
from .neural.train import NetVocab, pad_batch
from .pipeline import (CONFIG_KEYS, StageError, load_run_config,
                       run_pipeline)
from .report import (ReportError, load_dtm_model, load_net,
                     load_topic_model, write_csv)
from .serialize import SerializeError
from .textprep import load_prep_config, prep_tokens
from .topics import top_words as model_top_words

USAGE_ERROR, DATA_ERROR, STAGE_FAILURE = 1, 2, 3

_DATA_ERRORS = (CorpusError, MetricsError, ReportError, SerializeError,
                FileNotFoundError)


class Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage problems; this project's contract is 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE_ERROR, f"{self.prog}: error: {message}\n")


_ALIASES = {
    "--corpus": "io.corpus",
    "--out": "io.out_dir",
    "--seed": "seed",
    "--k": "topics.k",
    "--kappa": "dtm.kappa",
}


def _add_config_flags(p: Parser):
    p.add_argument("--config", metavar="FILE",
                   help="key = value settings file")
    for flag, key in _ALIASES.items():
        note = "random seed" if flag == "--seed" else f"shorthand for --{key}"
        p.add_argument(flag, dest=f"cfg::{key}", metavar="VALUE", help=note)
    for key in CONFIG_KEYS:
        if f"--{key}" in _ALIASES:
            continue
        p.add_argument(f"--{key}", dest=f"cfg::{key}", metavar="VALUE",
                       help=argparse.SUPPRESS)


def _collect_config(ns) -> "RunConfig":
    overrides = {}
    for attr, value in vars(ns).items():
        if attr.startswith("cfg::") and value is not None:
            overrides[attr.split("::", 1)[1]] = value
    env_seed = os.environ.get("MONITOR_SEED")
    if env_seed is not None:
        overrides["seed"] = env_seed
    return load_run_config(getattr(ns, "config", None), overrides)


def _run(ns, include) -> int:
    config = _collect_config(ns)
    result = run_pipeline(config, include=include)
    for note in result.notices:
        print(f"note: {note}")
    print(f"wrote {len(result.artifacts)} artifacts to {result.out_dir}")
    return 0


def _read_vocabulary_words(path) -> list:
    words = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or "word" not in header:
            raise ReportError(f"{path}: expected a vocabulary CSV "
                              f"with a 'word' column")
        col = header.index("word")
        for row in reader:
            words.append(row[col])
    return words


def _cmd_topics_top_words(ns) -> int:
    model = load_topic_model(ns.model)
    words = _read_vocabulary_words(ns.vocabulary)
    if model.phi.shape[1] != len(words):
        raise ReportError(f"vocabulary has {len(words)} words, model "
                          f"expects {model.phi.shape[1]}")
    rows = [("topic", "rank", "word", "phi")]
    for topic, ranked in enumerate(model_top_words(model, ns.m)):
        for rank, (wid, phi) in enumerate(ranked):
            rows.append((topic, rank, words[wid], phi))
    if ns.out_file:
        write_csv(ns.out_file, rows[1:], header=rows[0])
        print(f"wrote {ns.out_file}")
    else:
        for row in rows:
            print(",".join(str(c) for c in row))
    return 0


def _cmd_dtm_export(ns) -> int:
    model = load_dtm_model(ns.model)
    words = _read_vocabulary_words(ns.vocabulary)
    T, K, V = model.phis.shape
    if V != len(words):
        raise ReportError(f"vocabulary has {len(words)} words, model "
                          f"expects {V}")
    out = Path(ns.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_csv(out / "dtm_prevalence.csv",
              [(k, t, model.prevalence[t, k])
               for k in range(K) for t in range(T)],
              header=["topic", "week", "prevalence"])
    from .dtm import slice_top_words
    rows = []
    for t, per_topic in enumerate(slice_top_words(model, ns.m)):
        for k, ranked in enumerate(per_topic):
            for rank, (wid, phi) in enumerate(ranked):
                rows.append((k, t, rank, words[wid], phi))
    write_csv(out / "dtm_top_words.csv", rows,
              header=["topic", "week", "rank", "word", "phi"])
    print(f"wrote dtm_prevalence.csv and dtm_top_words.csv to {out}")
    return 0


def _cmd_predict(ns) -> int:
    net, spec, meta = load_net(ns.model)
    if meta.get("vocab") is None:
        raise ReportError(f"{ns.model}: checkpoint carries no vocabulary, "
                          f"cannot encode raw text")
    vocab = NetVocab(meta["vocab"])
    labels = meta.get("labels") or [str(i) for i in range(net.n_classes)]
    prep_cfg = load_prep_config(
        resource_dir=Path(ns.resources) if ns.resources else None)
    corpus = load_corpus(ns.corpus)
    ids, encoded = [], []
    for art in corpus:
        ids.append(art.id)
        encoded.append(vocab.encode(prep_tokens(art.text, prep_cfg),
                                    spec.seq_cap))
    pred, probs = net.predict(pad_batch(encoded, spec.seq_cap))
    rows = [(art_id, labels[int(p)]) + tuple(prob)
            for art_id, p, prob in zip(ids, pred, probs)]
    header = ["article_id", "label"] + [f"p_{name}" for name in labels]
    if ns.out_file:
        write_csv(ns.out_file, rows, header=header)
        print(f"wrote predictions for {len(rows)} articles to {ns.out_file}")
    else:
        print(",".join(header))
        for row in rows:
            print(",".join(str(c) for c in row))
    return 0


def _read_label_csv(path) -> dict:
    out = {}
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or len(header) < 2:
            raise MetricsError(f"{path}: expected CSV with id,label columns")
        for row in reader:
            if len(row) < 2:
                raise MetricsError(f"{path}: short row {row!r}")
            out[row[0]] = row[1]
    if not out:
        raise MetricsError(f"{path}: no rows")
    return out


def _cmd_eval(ns) -> int:
    gold = _read_label_csv(ns.gold)
    pred = _read_label_csv(ns.predicted)
    missing = sorted(set(gold) - set(pred))
    if missing:
        raise MetricsError(f"{len(missing)} ids missing from predictions, "
                           f"first: {missing[:5]}")
    ids = sorted(gold)
    classes = (tuple(c.strip() for c in ns.classes.split(","))
               if ns.classes else tuple(sorted(set(gold.values()))))
    rep = evaluate([gold[i] for i in ids], [pred[i] for i in ids], classes)
    if ns.out_dir:
        out = Path(ns.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "eval.json").write_text(rep.to_json() + "\n", encoding="utf-8")
        write_csv(out / "confusion.csv", rep.confusion.to_rows())
        print(f"wrote eval.json and confusion.csv to {out}")
    else:
        print(rep.to_json())
    return 0


def build_parser() -> Parser:
    parser = Parser(prog="newsmonitor",
                    description="News-corpus monitoring pipeline: ingest, "
                                "text preparation, topic models, time-series "
                                "decomposition, neural classifiers and "
                                "region aggregation.")
    sub = parser.add_subparsers(dest="command", required=True,
                                metavar="COMMAND")

    def stage_cmd(name, help_text, include):
        p = sub.add_parser(name, help=help_text)
        _add_config_flags(p)
        p.set_defaults(func=lambda ns: _run(ns, include))
        return p

    stage_cmd("ingest", "load and validate a corpus; write a summary",
              {"ingest"})
    stage_cmd("prep", "tokenize, normalize and build the vocabulary",
              {"prep"})
    stage_cmd("volume", "daily article-count series", {"volume"})
    stage_cmd("decompose", "trend/seasonal/residual split of the volume "
              "series", {"volume", "decompose"})

    topics = sub.add_parser("topics", help="topic-model stages")
    tsub = topics.add_subparsers(dest="subcommand", required=True,
                                 metavar="SUBCOMMAND")
    p = tsub.add_parser("sweep", help="fit several topic counts and score")
    _add_config_flags(p)
    p.set_defaults(func=lambda ns: _run(ns, {"sweep"}))
    p = tsub.add_parser("fit", help="fit the topic model at a fixed K")
    _add_config_flags(p)
    p.set_defaults(func=lambda ns: _run(ns, {"topics"}))
    p = tsub.add_parser("top-words", help="rank words from a saved model")
    p.add_argument("--model", required=True, help="topic_model.npz path")
    p.add_argument("--vocabulary", required=True, help="vocabulary.csv path")
    p.add_argument("--m", type=int, default=10, help="words per topic")
    p.add_argument("--out-file", help="write CSV here instead of stdout")
    p.set_defaults(func=_cmd_topics_top_words)

    dtm = sub.add_parser("dtm", help="week-coupled topic-model stages")
    dsub = dtm.add_subparsers(dest="subcommand", required=True,
                              metavar="SUBCOMMAND")
    p = dsub.add_parser("fit", help="fit weekly coupled topics")
    _add_config_flags(p)
    p.set_defaults(func=lambda ns: _run(ns, {"dtm"}))
    p = dsub.add_parser("export", help="CSV tables from a saved weekly model")
    p.add_argument("--model", required=True, help="dtm_model.npz path")
    p.add_argument("--vocabulary", required=True, help="vocabulary.csv path")
    p.add_argument("--m", type=int, default=10, help="words per topic")
    p.add_argument("--out-dir", default=".", help="directory for the CSVs")
    p.set_defaults(func=_cmd_dtm_export)

    tr = sub.add_parser("train", help="train the neural models")
    trsub = tr.add_subparsers(dest="subcommand", required=True,
                              metavar="SUBCOMMAND")
    p = trsub.add_parser("classify", help="article-class network")
    _add_config_flags(p)
    p.set_defaults(func=lambda ns: _run(ns, {"train-classifier"}))
    p = trsub.add_parser("sentiment", help="sentiment network")
    _add_config_flags(p)
    p.set_defaults(func=lambda ns: _run(ns, {"train-sentiment"}))

    p = sub.add_parser("eval", help="score predictions against gold labels")
    p.add_argument("--gold", required=True, help="CSV with id,label")
    p.add_argument("--predicted", required=True, help="CSV with id,label")
    p.add_argument("--classes", help="comma-separated class order")
    p.add_argument("--out-dir", help="write eval.json/confusion.csv here")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("predict", help="label a corpus with a checkpoint")
    p.add_argument("--model", required=True, help="net checkpoint (.npz)")
    p.add_argument("--corpus", required=True, help="corpus file to label")
    p.add_argument("--resources", help="directory with prep resource files")
    p.add_argument("--out-file", help="write CSV here instead of stdout")
    p.set_defaults(func=_cmd_predict)

    stage_cmd("geo", "region/week aggregation tables", {"geo"})
    stage_cmd("report", "run every enabled stage and emit the full bundle",
              None)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        return ns.func(ns)
    except StageError as exc:
        cause = exc.cause
        print(f"error: {exc}", file=sys.stderr)
        if isinstance(cause, _DATA_ERRORS):
            return DATA_ERROR
        return STAGE_FAILURE
    except _DATA_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DATA_ERROR
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DATA_ERROR


if __name__ == "__main__":
    sys.exit(main())
