"""Vocabulary encoding, batching, the Adam loop, determinism."""

import numpy as np
import pytest

from newsmonitor.neural.layers import Dense, NeuralError
from newsmonitor.neural.models import (ClassifierSpec, build_sentiment,
                                       tiny_sentiment_spec)
from newsmonitor.neural.optim import Adam
from newsmonitor.neural.train import (PAD_ID, UNK_ID, NetVocab, evaluate_net,
                                      pad_batch, predict, train)
from newsmonitor.synthetic import keyword_toy
from newsmonitor.textprep import Vocabulary


class TestNetVocab:
    def test_reserved_ids(self):
        assert PAD_ID == 0 and UNK_ID == 1
        nv = NetVocab(["apple", "pear"])
        assert len(nv) == 4
        assert nv.encode(["apple", "pear"]) == [2, 3]

    def test_from_token_lists_keeps_most_frequent(self):
        lists = [["a", "b", "a"], ["b", "c"]]
        nv = NetVocab.from_token_lists(lists, cap=2)
        assert nv.words == ("a", "b")  # c dropped, a/b tie -> lexicographic
        assert nv.encode(["a", "c", "b"]) == [2, UNK_ID, 3]

    def test_encode_truncates_at_seq_cap(self):
        nv = NetVocab(["x"])
        assert nv.encode(["x"] * 5, seq_cap=3) == [2, 2, 2]

    def test_from_vocabulary_orders_by_frequency(self):
        vocab = Vocabulary.from_token_lists([["zz", "zz", "aa", "mm"],
                                             ["zz", "mm"]])
        nv = NetVocab.from_vocabulary(vocab, cap=2)
        assert nv.words == ("zz", "mm")


class TestPadBatch:
    def test_right_pad_and_truncate(self):
        out = pad_batch([[2, 3], [4], [5, 6, 7, 8]], seq_cap=3)
        assert out.dtype == np.int64
        assert out.tolist() == [[2, 3, 0], [4, 0, 0], [5, 6, 7]]

    def test_empty_doc_is_all_pad(self):
        assert pad_batch([[]], seq_cap=2).tolist() == [[0, 0]]


class TestKeywordToy:
    def test_classes_are_keyword_separable(self):
        docs, labels = keyword_toy(30, seed=1)
        assert sorted(set(labels)) == [0, 1]
        pos_vocab = set(w for d, l in zip(docs, labels) if l == 1 for w in d)
        neg_vocab = set(w for d, l in zip(docs, labels) if l == 0 for w in d)
        only_pos = pos_vocab - neg_vocab
        only_neg = neg_vocab - pos_vocab
        assert only_pos and only_neg
        for doc, label in zip(docs, labels):
            marker = only_pos if label == 1 else only_neg
            banned = only_neg if label == 1 else only_pos
            assert not set(doc) & banned


def _toy_setup(n_docs=40, seed=3, **spec_overrides):
    docs, labels = keyword_toy(n_docs, seed=seed)
    spec = tiny_sentiment_spec(**spec_overrides)
    nv = NetVocab.from_token_lists(docs, cap=spec.vocab_cap)
    encoded = [nv.encode(d, spec.seq_cap) for d in docs]
    return spec, nv, encoded, labels


class TestTrainLoop:
    def test_history_layout_and_learning(self):
        spec, nv, encoded, labels = _toy_setup(n_docs=160, epochs=3, lr=0.01)
        net = build_sentiment(spec, vocab_size=len(nv), seed=5)
        result = train(net, spec, encoded[:128], labels[:128],
                       val_docs=encoded[128:], val_labels=labels[128:], seed=7)
        assert len(result.history) == 6  # train + validation per epoch
        splits = [h["split"] for h in result.history]
        assert splits == ["train", "validation"] * 3
        assert [h["epoch"] for h in result.history] == [0, 0, 1, 1, 2, 2]
        train_rows = [h for h in result.history if h["split"] == "train"]
        assert train_rows[-1]["loss"] < train_rows[0]["loss"]
        _, final_acc = evaluate_net(net, encoded[:128], labels[:128], spec)
        assert final_acc >= 0.95

        rows = result.history_rows()
        assert rows[0] == ["epoch", "split", "loss", "accuracy"]
        assert len(rows) == 7

    def test_bitwise_deterministic(self):
        spec, nv, encoded, labels = _toy_setup(n_docs=24, epochs=2)

        def run():
            net = build_sentiment(spec, vocab_size=len(nv), seed=5)
            train(net, spec, encoded, labels, seed=11)
            return [p.value.copy() for p in net.params()]

        a, b = run(), run()
        for pa, pb in zip(a, b):
            assert np.array_equal(pa, pb)

    def test_seed_changes_trajectory(self):
        spec, nv, encoded, labels = _toy_setup(n_docs=24, epochs=1)
        nets = []
        for seed in (11, 12):
            net = build_sentiment(spec, vocab_size=len(nv), seed=5)
            train(net, spec, encoded, labels, seed=seed)
            nets.append(net)
        same = all(np.array_equal(p.value, q.value)
                   for p, q in zip(nets[0].params(), nets[1].params()))
        assert not same

    def test_missing_class_rejected(self):
        spec, nv, encoded, labels = _toy_setup(n_docs=10, epochs=1)
        only_pos = [d for d, l in zip(encoded, labels) if l == 1]
        net = build_sentiment(spec, vocab_size=len(nv), seed=5)
        with pytest.raises(NeuralError, match="classes absent"):
            train(net, spec, only_pos, [1] * len(only_pos), seed=1)

    def test_predict_single_document(self):
        spec, nv, encoded, labels = _toy_setup(epochs=3)
        net = build_sentiment(spec, vocab_size=len(nv), seed=5)
        train(net, spec, encoded, labels, seed=7)
        label, probs = predict(net, encoded[0], spec.seq_cap)
        assert label in (0, 1)
        assert probs.shape == (2,)
        assert probs.sum() == pytest.approx(1.0)
        assert label == int(probs.argmax())

    def test_evaluate_matches_manual_forward(self):
        spec, nv, encoded, labels = _toy_setup(n_docs=12, epochs=1)
        net = build_sentiment(spec, vocab_size=len(nv), seed=5)
        loss, acc = evaluate_net(net, encoded, labels, spec)
        logits = net.forward(pad_batch(encoded, spec.seq_cap), train=False)
        manual_acc = float((logits.argmax(axis=1) == np.array(labels)).mean())
        assert acc == pytest.approx(manual_acc)
        assert np.isfinite(loss) and loss > 0


class TestAdam:
    def test_validation(self):
        p = Dense(2, 2, seed=0).params()
        with pytest.raises(ValueError):
            Adam(p, lr=-1.0)
        with pytest.raises(ValueError):
            Adam(p, beta1=1.0)

    def test_l2_skips_biases(self):
        dense = Dense(2, 2, seed=1)
        w_before = dense.W.value.copy()
        b_before = dense.b.value.copy()
        opt = Adam(dense.params(), lr=0.1, l2=1.0)
        opt.zero_grads()
        opt.step()  # zero grads: only the decay term can move anything
        assert not np.array_equal(dense.W.value, w_before)
        assert np.array_equal(dense.b.value, b_before)

    def test_zero_lr_is_inert(self):
        dense = Dense(2, 2, seed=1)
        w_before = dense.W.value.copy()
        opt = Adam(dense.params(), lr=0.0, l2=1.0)
        dense.W.grad[:] = 1.0
        opt.step()
        assert np.array_equal(dense.W.value, w_before)
        assert opt.t == 0

    def test_descends_a_quadratic(self):
        dense = Dense(1, 1, seed=0)
        opt = Adam(dense.params(), lr=0.05)
        for _ in range(200):
            opt.zero_grads()
            # d/dw of (w - 3)^2
            dense.W.grad[:] = 2.0 * (dense.W.value - 3.0)
            opt.step()
        assert abs(dense.W.value[0, 0] - 3.0) < 0.05


class TestSpecValidation:
    def test_classifier_output_sizes(self):
        for ok in (8, 19, 9):
            ClassifierSpec(n_classes=ok)
        with pytest.raises(NeuralError):
            ClassifierSpec(n_classes=5)

    def test_sentiment_dropout_range(self):
        with pytest.raises(NeuralError):
            tiny_sentiment_spec(dropout=1.0)
