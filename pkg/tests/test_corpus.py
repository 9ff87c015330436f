"""Corpus loading, validation, splitting, and the gazetteer."""

import json
from datetime import date

import pytest

from newsmonitor.corpus import (INTERNATIONAL, Article, Corpus, CorpusError,
                                Gazetteer, load_corpus, normalize_place,
                                resolve_region, save_corpus, split_dataset)


def write_jsonl(path, records):
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")


def record(i, **extra):
    rec = {"id": f"a{i}", "body": f"body text {i}",
           "published_date": "2020-03-01", "source": "Outlet"}
    rec.update(extra)
    return rec


class TestLoading:
    def test_loads_valid_jsonl(self, tmp_path):
        path = tmp_path / "c.jsonl"
        write_jsonl(path, [record(i) for i in range(3)])
        corpus = load_corpus(path)
        assert len(corpus) == 3
        assert corpus["a1"].body == "body text 1"
        assert corpus.rejects == ()

    def test_rejects_carry_line_numbers(self, tmp_path):
        path = tmp_path / "c.jsonl"
        write_jsonl(path, [record(0),
                           {"id": "bad", "body": "x"},          # no date
                           record(1, published_date="03/2020"),  # bad date
                           record(2)])
        corpus = load_corpus(path)
        assert len(corpus) == 2
        assert [r.line for r in corpus.rejects] == [2, 3]

    def test_duplicate_ids_rejected(self, tmp_path):
        path = tmp_path / "c.jsonl"
        write_jsonl(path, [record(0), record(0), record(1)])
        corpus = load_corpus(path)
        assert len(corpus) == 2
        assert "duplicate" in corpus.rejects[0].message

    def test_bad_json_line_rejected_not_fatal(self, tmp_path):
        path = tmp_path / "c.jsonl"
        path.write_text(json.dumps(record(0)) + "\n{oops\n", encoding="utf-8")
        corpus = load_corpus(path)
        assert len(corpus) == 1
        assert "JSON" in corpus.rejects[0].message

    def test_empty_file_is_fatal(self, tmp_path):
        path = tmp_path / "c.jsonl"
        path.write_text("", encoding="utf-8")
        with pytest.raises(CorpusError):
            load_corpus(path)

    def test_all_rejected_is_fatal(self, tmp_path):
        path = tmp_path / "c.jsonl"
        write_jsonl(path, [{"id": "x", "body": ""}])
        with pytest.raises(CorpusError):
            load_corpus(path)

    def test_missing_file_is_fatal(self, tmp_path):
        with pytest.raises(CorpusError):
            load_corpus(tmp_path / "absent.jsonl")

    def test_unknown_class_label_rejected(self, tmp_path):
        path = tmp_path / "c.jsonl"
        write_jsonl(path, [record(0, **{"class": "Statistics"}),
                           record(1, **{"class": "Nonsense"})])
        corpus = load_corpus(path)
        assert len(corpus) == 1
        assert corpus["a0"].class_label == "Statistics"

    def test_bad_sentiment_rejected(self, tmp_path):
        path = tmp_path / "c.jsonl"
        write_jsonl(path, [record(0, sentiment="meh"), record(1)])
        corpus = load_corpus(path)
        assert len(corpus) == 1

    def test_csv_format(self, tmp_path):
        path = tmp_path / "c.csv"
        path.write_text("id,body,published_date,source\n"
                        "a0,text zero,2020-03-01,Outlet\n"
                        "a1,text one,2020-03-02,Outlet\n", encoding="utf-8")
        corpus = load_corpus(path)
        assert len(corpus) == 2
        assert corpus["a1"].published_date == date(2020, 3, 2)

    def test_save_load_round_trip(self, tmp_path):
        path = tmp_path / "c.jsonl"
        write_jsonl(path, [record(0, **{"class": "Statistics",
                                        "sentiment": "positive",
                                        "topic": 4}),
                           record(1, language="en",
                                  translated_body="translated")])
        corpus = load_corpus(path)
        out = tmp_path / "copy.jsonl"
        save_corpus(corpus, out)
        again = load_corpus(out)
        assert len(again) == len(corpus)
        assert again["a0"].class_label == "Statistics"
        assert again["a0"].topic_label == 4
        assert again["a1"].translated_body == "translated"

    def test_translated_body_wins_text(self):
        art = Article(id="x", body="original", translated_body="english",
                      published_date=date(2020, 1, 1))
        assert art.text == "english"
        bare = Article(id="y", body="original", published_date=date(2020, 1, 1))
        assert bare.text == "original"


class TestSplit:
    def corpus_of(self, n):
        return Corpus([Article(id=f"a{i:02d}", body="b",
                               published_date=date(2020, 1, 1),
                               class_label="Statistics")
                       for i in range(n)])

    def test_13_docs_split_11_1_1(self):
        # floors are 10/1/1 and the leftover goes to the largest
        # remainder (train: 0.4 vs 0.3 / 0.3)
        split = split_dataset(self.corpus_of(13), seed=0)
        assert (len(split.train), len(split.validation), len(split.test)) == (11, 1, 1)

    def test_split_partitions_labeled_set(self):
        corpus = self.corpus_of(29)
        split = split_dataset(corpus, seed=3)
        union = split.train | split.validation | split.test
        assert union == {a.id for a in corpus}
        assert not (split.train & split.validation)
        assert not (split.train & split.test)
        assert not (split.validation & split.test)

    def test_same_seed_same_split(self):
        corpus = self.corpus_of(40)
        assert split_dataset(corpus, seed=5) == split_dataset(corpus, seed=5)
        assert split_dataset(corpus, seed=5) != split_dataset(corpus, seed=6)

    def test_unlabeled_articles_excluded(self):
        arts = [Article(id="l0", body="b", published_date=date(2020, 1, 1),
                        class_label="Statistics"),
                Article(id="u0", body="b", published_date=date(2020, 1, 1))]
        split = split_dataset(Corpus(arts), ratios=(1.0, 0.0, 0.0), seed=0)
        assert split.train == {"l0"}

    def test_bad_ratios_rejected(self):
        with pytest.raises(ValueError):
            split_dataset(self.corpus_of(10), ratios=(0.5, 0.2, 0.2), seed=0)

    def test_no_labels_rejected(self):
        arts = [Article(id="u0", body="b", published_date=date(2020, 1, 1))]
        with pytest.raises(ValueError):
            split_dataset(Corpus(arts), seed=0)


class TestGazetteer:
    def test_default_covers_64_districts(self, gazetteer):
        assert len(gazetteer.divisions) == 8
        domestic = {d: v for d, v in gazetteer.district_to_division.items()
                    if v != INTERNATIONAL}
        assert len(domestic) == 64
        assert gazetteer.district_to_division["Dhaka"] == "Dhaka"
        assert gazetteer.district_to_division["Dinajpur"] == "Rangpur"

    def test_resolution_normalizes_case_and_spacing(self, gazetteer):
        assert resolve_region("  dhaka ", gazetteer) == ("Dhaka", "Dhaka")
        assert resolve_region("COX'S BAZAR", gazetteer) == ("Cox's Bazar", "Chittagong")

    def test_unknown_place_is_none_for_callers_to_bucket(self, gazetteer):
        assert resolve_region("Atlantis", gazetteer) is None
        assert resolve_region("", gazetteer) is None
        assert resolve_region(None, gazetteer) is None

    def test_foreign_places_map_international(self, gazetteer):
        region = resolve_region("Wuhan", gazetteer)
        assert region == ("Wuhan", INTERNATIONAL)

    def test_normalize_place(self):
        assert normalize_place("  Cox's   Bazar ") == "cox's bazar"

    def test_gazetteer_validates_division_count(self):
        with pytest.raises(CorpusError):
            Gazetteer({"X": "Nowhere"}, ("OnlyOne",))


class TestMiniCorpus:
    def test_bundled_corpus_clean(self, mini_corpus):
        assert len(mini_corpus) == 200
        assert mini_corpus.rejects == ()
        assert mini_corpus.start_date == date(2020, 1, 21)
        assert mini_corpus.end_date == date(2020, 5, 19)

    def test_both_languages_present(self, mini_corpus):
        langs = mini_corpus.counts_by("language")
        assert set(langs) == {"bn", "en"}
        assert langs["bn"] > langs["en"]

    def test_all_eight_classes_present(self, mini_corpus):
        labeled = mini_corpus.labeled("class_label")
        assert len({a.class_label for a in labeled}) == 8
