"""Run-config parsing and end-to-end orchestration on the bundled sample."""

import json

import pytest

from newsmonitor.pipeline import (CONFIG_KEYS, PipelineResult, RunConfig,
                                  StageError, config_snapshot,
                                  load_run_config, parse_config_text,
                                  run_pipeline)


class TestConfigText:
    def test_key_value_lines(self):
        text = """
        # a comment
        topics.k = 4

        seed = 11
        io.corpus = /data/c.jsonl
        stages.dtm = off
        prep.max_vocab = none
        """
        out = parse_config_text(text)
        assert out == {"topics_k": 4, "seed": 11,
                       "io_corpus": "/data/c.jsonl", "stages_dtm": False,
                       "prep_max_vocab": None}

    def test_boolean_spellings(self):
        for raw, want in (("1", True), ("true", True), ("YES", True),
                          ("on", True), ("0", False), ("false", False),
                          ("No", False), ("off", False)):
            assert parse_config_text(f"stages.geo = {raw}") == \
                {"stages_geo": want}

    def test_unknown_key_named_in_error(self):
        with pytest.raises(ValueError, match="topics.q"):
            parse_config_text("topics.q = 3")

    def test_missing_equals_reports_line(self):
        with pytest.raises(ValueError, match="line 2"):
            parse_config_text("seed = 1\njust words\n")

    def test_bad_value_reports_line_and_key(self):
        with pytest.raises(ValueError, match="line 1.*seed"):
            parse_config_text("seed = lots")


class TestConfigKeys:
    def test_every_field_has_a_dotted_key(self):
        import dataclasses
        assert len(CONFIG_KEYS) == len(dataclasses.fields(RunConfig))
        assert "io.corpus" in CONFIG_KEYS
        assert "topics.k" in CONFIG_KEYS
        assert "seed" in CONFIG_KEYS

    def test_snapshot_round_trips_defaults(self):
        snap = config_snapshot(RunConfig(io_corpus="x"))
        assert snap["io.corpus"] == "x"
        assert snap["decompose.period"] == 7
        assert set(snap) == set(CONFIG_KEYS)


class TestLoadRunConfig:
    def test_overrides_beat_file(self, tmp_path):
        cfg_file = tmp_path / "run.cfg"
        cfg_file.write_text("seed = 3\ntopics.k = 5\n")
        cfg = load_run_config(cfg_file, overrides={"seed": "9"})
        assert cfg.seed == 9
        assert cfg.topics_k == 5

    def test_typed_overrides_pass_through(self):
        cfg = load_run_config(overrides={"seed": 4, "dtm.kappa": "2.5"})
        assert cfg.seed == 4
        assert cfg.dtm_kappa == 2.5

    def test_unknown_override_rejected(self):
        with pytest.raises(ValueError, match="unknown config key"):
            load_run_config(overrides={"nope": "1"})


def _fast_config(corpus_path, out_dir, **extra):
    base = dict(io_corpus=str(corpus_path), io_out_dir=str(out_dir),
                seed=5, topics_k=3, topics_sweep="2,3",
                topics_iterations=40, topics_burn_in=10,
                dtm_iterations=30, dtm_burn_in=10,
                classifier_embed_dim=8, classifier_hidden=6,
                classifier_seq_cap=24, classifier_epochs=1,
                sentiment_embed_dim=8, sentiment_conv_filters=4,
                sentiment_lstm_hidden=4, sentiment_dense_hidden=6,
                sentiment_seq_cap=24, sentiment_epochs=1)
    base.update(extra)
    return RunConfig(**base)


@pytest.fixture(scope="module")
def full_run(mini_corpus_path, tmp_path_factory):
    out = tmp_path_factory.mktemp("run")
    config = _fast_config(mini_corpus_path, out)
    return run_pipeline(config), out


class TestRunPipeline:
    def test_artifacts_exist_and_manifest_accounts_for_them(self, full_run):
        result, out = full_run
        assert isinstance(result, PipelineResult)
        assert result.manifest == out / "manifest.json"
        payload = json.loads(result.manifest.read_text())
        listed = {e["path"] for e in payload["files"]}
        for artifact in result.artifacts:
            rel = str(artifact).replace(str(out) + "/", "")
            assert rel in listed
            assert (out / rel).exists()
        assert payload["seed"] == 5
        assert payload["config"]["topics.sweep"] == "2,3"

    def test_expected_stage_outputs(self, full_run):
        _, out = full_run
        for name in ("corpus_summary.csv", "vocabulary.csv", "volume.csv",
                     "decomposition.csv", "topic_sweep.csv",
                     "topic_top_words.csv", "topic_model.npz",
                     "dtm_prevalence.csv", "dtm_model.npz",
                     "classifier_training_log.csv", "sentiment.npz",
                     "region_week_volume.csv",
                     "region_week_sentiment_positive.csv"):
            assert (out / name).exists(), name

    def test_notices_mention_sweep_choice(self, full_run):
        result, _ = full_run
        assert any("sweep selected K=" in n for n in result.notices)

    def test_include_limits_stages(self, mini_corpus_path, tmp_path):
        config = _fast_config(mini_corpus_path, tmp_path / "o")
        result = run_pipeline(config, include=["volume"])
        names = {p.rsplit("/", 1)[-1] for p in result.artifacts}
        assert "volume.csv" in names
        assert "corpus_summary.csv" in names  # ingest always runs
        assert "vocabulary.csv" not in names  # prep not needed for volume
        assert "topic_model.npz" not in names

    def test_include_pulls_in_prep_when_needed(self, mini_corpus_path,
                                               tmp_path):
        config = _fast_config(mini_corpus_path, tmp_path / "o")
        result = run_pipeline(config, include=["topics"])
        names = {p.rsplit("/", 1)[-1] for p in result.artifacts}
        assert "vocabulary.csv" in names
        assert "topic_top_words.csv" in names
        assert "volume.csv" not in names

    def test_dependent_stage_skips_with_notice(self, mini_corpus_path,
                                               tmp_path):
        config = _fast_config(mini_corpus_path, tmp_path / "o")
        result = run_pipeline(config, include=["decompose"])
        assert any("volume stage did not run" in n for n in result.notices)
        names = {p.rsplit("/", 1)[-1] for p in result.artifacts}
        assert "decomposition.csv" not in names

    def test_corpus_required(self, tmp_path):
        with pytest.raises(ValueError, match="io.corpus"):
            run_pipeline(RunConfig(io_out_dir=str(tmp_path)))

    def test_stage_failure_wraps_and_keeps_manifest(self, tmp_path,
                                                    mini_corpus_path):
        short = tmp_path / "short.jsonl"
        lines = mini_corpus_path.read_text(encoding="utf-8").splitlines()
        picked = []
        for line in lines:
            rec = json.loads(line)
            if rec["published_date"] <= "2020-01-23":
                picked.append(line)
        short.write_text("\n".join(picked) + "\n", encoding="utf-8")
        out = tmp_path / "o"
        config = _fast_config(short, out)
        with pytest.raises(StageError, match="decompose") as err:
            run_pipeline(config, include=["volume", "decompose"])
        assert err.value.stage == "decompose"
        manifest = json.loads((out / "manifest.json").read_text())
        assert any(e["path"] == "volume.csv" for e in manifest["files"])

    def test_unlabeled_corpus_skips_training_with_notices(self, tmp_path,
                                                          mini_corpus_path):
        bare = tmp_path / "bare.jsonl"
        out_lines = []
        for line in mini_corpus_path.read_text(encoding="utf-8").splitlines():
            rec = json.loads(line)
            for field in ("class", "subclass", "sentiment", "topic"):
                rec.pop(field, None)
            out_lines.append(json.dumps(rec, ensure_ascii=False))
        bare.write_text("\n".join(out_lines) + "\n", encoding="utf-8")
        config = _fast_config(bare, tmp_path / "o",
                              stages_volume=False, stages_decompose=False,
                              stages_sweep=False, stages_topics=False,
                              stages_dtm=False)
        result = run_pipeline(config)
        notices = " | ".join(result.notices)
        assert "classifier training skipped" in notices
        assert "sentiment training skipped" in notices
        assert "sentiment grid skipped" in notices
        names = {p.rsplit("/", 1)[-1] for p in result.artifacts}
        assert "region_week_volume.csv" in names
        assert "region_week_sentiment_positive.csv" not in names
