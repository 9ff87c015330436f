"""Confusion matrix and classification metrics against hand tallies."""

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from newsmonitor.metrics import (ConfusionMatrix, MetricsError,
                                 confusion_matrix, evaluate)


class TestConfusion:
    def test_hand_tally(self):
        gold = ["a", "a", "b", "b", "b", "c"]
        pred = ["a", "b", "b", "b", "c", "c"]
        cm = confusion_matrix(gold, pred, ["a", "b", "c"])
        assert cm.counts.tolist() == [[1, 1, 0], [0, 2, 1], [0, 0, 1]]
        assert cm.total == 6

    def test_rows_for_csv(self):
        cm = confusion_matrix(["a"], ["b"], ["a", "b"])
        rows = cm.to_rows()
        assert rows[0][0] == "gold\\predicted"
        assert rows[1] == ["a", 0, 1]

    def test_length_mismatch(self):
        with pytest.raises(MetricsError):
            confusion_matrix(["a"], ["a", "b"], ["a", "b"])

    def test_unseen_labels_rejected(self):
        with pytest.raises(MetricsError):
            confusion_matrix(["a"], ["x"], ["a", "b"])
        with pytest.raises(MetricsError):
            confusion_matrix(["x"], ["a"], ["a", "b"])


class TestEvaluate:
    def test_binary_hand_oracle(self):
        # positive class: TP=3 FP=1 FN=2 TN=4
        gold = ["p"] * 5 + ["n"] * 5
        pred = ["p", "p", "p", "n", "n", "p", "n", "n", "n", "n"]
        rep = evaluate(gold, pred, ["p", "n"])
        pos = rep.per_class["p"]
        assert pos["precision"] == 0.75
        assert pos["recall"] == 0.6
        assert pos["f1"] == pytest.approx(2 * 0.75 * 0.6 / 1.35, abs=1e-12)
        assert pos["support"] == 5
        assert rep.accuracy == 0.7

    def test_macro_is_unweighted_mean(self):
        gold = ["a"] * 8 + ["b"] * 2
        pred = ["a"] * 8 + ["a", "b"]
        rep = evaluate(gold, pred, ["a", "b"])
        a, b = rep.per_class["a"], rep.per_class["b"]
        assert rep.macro_precision == pytest.approx(
            (a["precision"] + b["precision"]) / 2)
        assert rep.macro_recall == pytest.approx((a["recall"] + b["recall"]) / 2)
        assert rep.macro_f1 == pytest.approx((a["f1"] + b["f1"]) / 2)

    def test_micro_equals_accuracy_single_label(self):
        gold = ["a", "b", "c", "a"]
        pred = ["a", "c", "c", "b"]
        rep = evaluate(gold, pred, ["a", "b", "c"])
        assert rep.micro_precision == pytest.approx(rep.accuracy)
        assert rep.micro_recall == pytest.approx(rep.accuracy)
        assert rep.micro_f1 == pytest.approx(rep.accuracy)

    def test_zero_division_flagged_not_nan(self):
        gold = ["a", "a"]
        pred = ["a", "a"]
        rep = evaluate(gold, pred, ["a", "ghost"])
        ghost = rep.per_class["ghost"]
        assert ghost["precision"] == 0.0 and ghost["recall"] == 0.0
        assert "ghost" in rep.zero_division_classes

    def test_perfect_prediction(self):
        gold = ["a", "b", "a"]
        rep = evaluate(gold, gold, ["a", "b"])
        assert rep.accuracy == 1.0
        assert rep.macro_f1 == 1.0

    def test_json_payload_complete(self):
        rep = evaluate(["a", "b"], ["a", "a"], ["a", "b"])
        payload = json.loads(rep.to_json())
        assert set(payload) >= {"classes", "accuracy", "macro", "micro",
                                "per_class", "confusion"}
        assert payload["confusion"] == [[1, 0], [1, 0]]

    @given(st.lists(st.sampled_from("abc"), min_size=1, max_size=40).flatmap(
        lambda gold: st.tuples(
            st.just(gold),
            st.lists(st.sampled_from("abc"), min_size=len(gold),
                     max_size=len(gold)))))
    @settings(max_examples=60, deadline=None)
    def test_property_metrics_bounded_and_consistent(self, pair):
        gold, pred = pair
        rep = evaluate(gold, pred, ["a", "b", "c"])
        for stats in rep.per_class.values():
            for key in ("precision", "recall", "f1"):
                assert 0.0 <= stats[key] <= 1.0
        assert 0.0 <= rep.accuracy <= 1.0
        assert rep.confusion.total == len(gold)
        assert sum(s["support"] for s in rep.per_class.values()) == len(gold)
        expected_acc = np.trace(rep.confusion.counts) / len(gold)
        assert rep.accuracy == pytest.approx(expected_acc)


class TestConfusionMatrixType:
    def test_total_and_classes(self):
        cm = ConfusionMatrix(("x", "y"), np.array([[2, 0], [1, 3]]))
        assert cm.total == 6
