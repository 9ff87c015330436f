"""Layer-level forward semantics against hand computations and an
independent LSTM reference."""

import numpy as np
import pytest

from newsmonitor.neural.layers import (LSTM, BiLSTM, Conv1D, Dense, Dropout,
                                       Embedding, MaskedReadout, MaxPool1D,
                                       NeuralError, cross_entropy,
                                       glorot_uniform, sigmoid, softmax)
from newsmonitor.neural.models import (build_classifier, build_sentiment,
                                       tiny_classifier_spec,
                                       tiny_sentiment_spec)
from newsmonitor.rng import CounterRng


class TestActivations:
    def test_softmax_uniform_and_shift_invariant(self):
        assert np.allclose(softmax(np.zeros((1, 4))), 0.25)
        logits = np.array([[1.0, 3.0, -2.0]])
        assert np.allclose(softmax(logits), softmax(logits + 100.0))

    def test_softmax_rows_sum_to_one(self):
        rng = CounterRng(1)
        logits = rng.uniform(-5, 5, 12).reshape(3, 4)
        assert np.allclose(softmax(logits).sum(axis=1), 1.0)

    def test_cross_entropy_uniform_is_log_k(self):
        loss, grad, probs = cross_entropy(np.zeros((2, 4)), np.array([0, 3]))
        assert loss == pytest.approx(np.log(4.0))
        assert np.allclose(probs, 0.25)
        # gradient of mean CE: (p - onehot) / batch
        expected = (np.full((2, 4), 0.25)
                    - np.eye(4)[[0, 3]]) / 2
        assert np.allclose(grad, expected)

    def test_sigmoid_stable_at_extremes(self):
        y = sigmoid(np.array([-1000.0, 0.0, 1000.0]))
        assert y[0] == 0.0 or y[0] < 1e-300
        assert y[1] == 0.5
        assert y[2] == 1.0


class TestEmbedding:
    def test_lookup_and_pad_row_zero(self):
        emb = Embedding(5, 3, seed=1)
        assert np.array_equal(emb.W.value[0], np.zeros(3))
        ids = np.array([[2, 4, 0]])
        y, mask = emb.forward(ids, None)
        assert mask.tolist() == [[True, True, False]]
        assert np.array_equal(y[0, 0], emb.W.value[2])
        assert np.array_equal(y[0, 2], np.zeros(3))

    def test_out_of_range_rejected(self):
        emb = Embedding(5, 3)
        with pytest.raises(NeuralError):
            emb.forward(np.array([[7]]), None)

    def test_backward_routes_to_rows(self):
        emb = Embedding(5, 2, seed=1)
        ids = np.array([[3, 3, 0]])
        emb.forward(ids, None)
        emb.W.zero_grad()
        emb.backward(np.ones((1, 3, 2)))
        assert np.array_equal(emb.W.grad[3], [2.0, 2.0])  # two occurrences
        assert np.array_equal(emb.W.grad[0], [0.0, 0.0])  # pad frozen

    def test_explicit_weights_validated(self):
        with pytest.raises(NeuralError):
            Embedding(4, 3, weights=np.zeros((2, 2)))


class TestConv1D:
    def test_hand_computed_valid_windows(self):
        conv = Conv1D(1, 1, width=2, activation=None, seed=0)
        conv.W.value[:] = np.array([[[2.0]], [[-1.0]]])
        conv.b.value[:] = 0.5
        x = np.array([[[1.0], [2.0], [3.0], [4.0]]])
        mask = np.ones((1, 4), dtype=bool)
        y, out_mask = conv.forward(x, mask)
        # pre_t = 2 x_t - x_{t+1} + 0.5
        assert y[0, :, 0].tolist() == [0.5, 1.5, 2.5]
        assert out_mask.shape == (1, 3)

    def test_window_valid_only_when_all_inputs_valid(self):
        conv = Conv1D(1, 1, width=2, activation=None, seed=0)
        conv.W.value[:] = 1.0
        x = np.ones((1, 4, 1))
        mask = np.array([[True, True, True, False]])
        y, out_mask = conv.forward(x, mask)
        assert out_mask.tolist() == [[True, True, False]]
        assert y[0, 2, 0] == 0.0

    def test_relu_applied(self):
        conv = Conv1D(1, 1, width=1, activation="relu", seed=0)
        conv.W.value[:] = np.array([[[1.0]]])
        x = np.array([[[-2.0], [3.0]]])
        y, _ = conv.forward(x, np.ones((1, 2), bool))
        assert y[0, :, 0].tolist() == [0.0, 3.0]

    def test_too_short_sequence_rejected(self):
        conv = Conv1D(1, 1, width=3)
        with pytest.raises(NeuralError):
            conv.forward(np.ones((1, 2, 1)), np.ones((1, 2), bool))


class TestMaxPool1D:
    def test_hand_computed_with_partial_tail(self):
        pool = MaxPool1D(window=2)
        x = np.array([[[3.0], [1.0], [2.0], [5.0], [4.0]]])
        y, mask = pool.forward(x, np.ones((1, 5), bool))
        assert y[0, :, 0].tolist() == [3.0, 5.0, 4.0]
        assert mask.all()

    def test_masked_elements_excluded(self):
        pool = MaxPool1D(window=2)
        x = np.array([[[3.0], [9.0]]])
        mask = np.array([[True, False]])
        y, out_mask = pool.forward(x, mask)
        assert y[0, 0, 0] == 3.0
        assert out_mask.tolist() == [[True]]

    def test_all_invalid_window_reads_zero(self):
        pool = MaxPool1D(window=2)
        x = np.full((1, 4, 1), 7.0)
        mask = np.array([[True, True, False, False]])
        y, out_mask = pool.forward(x, mask)
        assert out_mask.tolist() == [[True, False]]
        assert y[0, 1, 0] == 0.0

    def test_backward_routes_to_argmax(self):
        pool = MaxPool1D(window=2)
        x = np.array([[[3.0], [1.0], [2.0], [5.0]]])
        pool.forward(x, np.ones((1, 4), bool))
        dx = pool.backward(np.array([[[1.0], [1.0]]]))
        assert dx[0, :, 0].tolist() == [1.0, 0.0, 0.0, 1.0]


def reference_lstm(x, mask, Wx, Wh, b):
    """Plain-loop LSTM with [i, f, o, g] gate stacking and pad passthrough."""
    B, T, _ = x.shape
    H = Wh.shape[0]
    h = np.zeros((B, H))
    c = np.zeros((B, H))
    out = np.zeros((B, T, H))
    for t in range(T):
        a = x[:, t, :] @ Wx + h @ Wh + b
        i = 1.0 / (1.0 + np.exp(-a[:, :H]))
        f = 1.0 / (1.0 + np.exp(-a[:, H:2 * H]))
        o = 1.0 / (1.0 + np.exp(-a[:, 2 * H:3 * H]))
        g = np.tanh(a[:, 3 * H:])
        c_new = f * c + i * g
        h_new = o * np.tanh(c_new)
        m = mask[:, t:t + 1]
        h = np.where(m, h_new, h)
        c = np.where(m, c_new, c)
        out[:, t, :] = h
    return out


class TestLSTM:
    def setup_method(self):
        rng = CounterRng(8, "lstm-test")
        self.x = rng.uniform(-1, 1, 2 * 5 * 3).reshape(2, 5, 3)
        self.mask = np.array([[True] * 5, [True, True, True, False, False]])

    def test_matches_reference_recurrence(self):
        lstm = LSTM(3, 4, seed=2)
        y, _ = lstm.forward(self.x, self.mask)
        expected = reference_lstm(self.x, self.mask,
                                  lstm.Wx.value, lstm.Wh.value, lstm.b.value)
        assert np.allclose(y, expected, atol=1e-12)

    def test_pad_steps_hold_state(self):
        lstm = LSTM(3, 4, seed=2)
        y, _ = lstm.forward(self.x, self.mask)
        # row 1 is padded from t=3 on: the output freezes at the last valid h
        assert np.array_equal(y[1, 3], y[1, 2])
        assert np.array_equal(y[1, 4], y[1, 2])

    def test_backward_direction_is_reversed_forward(self):
        fwd = LSTM(3, 4, direction="forward", seed=2)
        bwd = LSTM(3, 4, direction="backward", seed=2)
        for p_f, p_b in zip(fwd.params(), bwd.params()):
            p_b.value[:] = p_f.value
        y_b, _ = bwd.forward(self.x, self.mask)
        y_f, _ = fwd.forward(self.x[:, ::-1, :], self.mask[:, ::-1])
        assert np.allclose(y_b, y_f[:, ::-1, :], atol=1e-12)

    def test_bilstm_concatenates_both_directions(self):
        bi = BiLSTM(3, 4, seed=2)
        y, _ = bi.forward(self.x, self.mask)
        assert y.shape == (2, 5, 8)
        yf = reference_lstm(self.x, self.mask, bi.fwd.Wx.value,
                            bi.fwd.Wh.value, bi.fwd.b.value)
        assert np.allclose(y[:, :, :4], yf, atol=1e-12)
        rev = reference_lstm(self.x[:, ::-1, :], self.mask[:, ::-1],
                             bi.bwd.Wx.value, bi.bwd.Wh.value, bi.bwd.b.value)
        assert np.allclose(y[:, :, 4:], rev[:, ::-1, :], atol=1e-12)


class TestDropout:
    def test_identity_at_inference(self):
        drop = Dropout(0.5)
        x = np.ones((2, 3, 4))
        y, _ = drop.forward(x, None, train=False)
        assert np.array_equal(y, x)

    def test_identity_at_rate_zero(self):
        drop = Dropout(0.0)
        x = np.ones((2, 3))
        y, _ = drop.forward(x, None, train=True, rng=CounterRng(0))
        assert np.array_equal(y, x)

    def test_inverted_scaling(self):
        drop = Dropout(0.25)
        x = np.ones((40, 50))
        y, _ = drop.forward(x, None, train=True, rng=CounterRng(3, "d"))
        kept = y[y != 0]
        assert np.allclose(kept, 1.0 / 0.75)
        assert abs((y == 0).mean() - 0.25) < 0.03

    def test_training_without_rng_rejected(self):
        with pytest.raises(NeuralError):
            Dropout(0.5).forward(np.ones((1, 2)), None, train=True)

    def test_rate_validated(self):
        with pytest.raises(NeuralError):
            Dropout(1.0)


class TestMaskedReadout:
    def test_unidirectional_takes_last_valid(self):
        x = np.arange(24, dtype=np.float64).reshape(1, 6, 4)
        mask = np.array([[True, True, True, False, False, False]])
        read = MaskedReadout()
        y, _ = read.forward(x, mask)
        assert np.array_equal(y[0], x[0, 2])

    def test_bidirectional_splits_halves(self):
        x = np.arange(24, dtype=np.float64).reshape(1, 3, 8)
        mask = np.array([[False, True, True]])
        read = MaskedReadout(bidirectional=True)
        y, _ = read.forward(x, mask)
        assert np.array_equal(y[0, :4], x[0, 2, :4])  # last valid, fwd half
        assert np.array_equal(y[0, 4:], x[0, 1, 4:])  # first valid, bwd half

    def test_all_pad_row_reads_zero(self):
        x = np.ones((2, 3, 4))
        mask = np.array([[True, False, False], [False, False, False]])
        y, _ = MaskedReadout().forward(x, mask)
        assert np.array_equal(y[1], np.zeros(4))

    def test_odd_features_rejected_bidirectional(self):
        with pytest.raises(NeuralError):
            MaskedReadout(bidirectional=True).forward(
                np.ones((1, 2, 3)), np.ones((1, 2), bool))


class TestGlorot:
    def test_bounds(self):
        rng = CounterRng(0, "g")
        w = glorot_uniform((50, 60), 50, 60, rng)
        limit = np.sqrt(6.0 / 110)
        assert np.abs(w).max() <= limit
        assert w.shape == (50, 60)


class TestMaskingInvariance:
    def test_extra_padding_never_changes_logits(self):
        ids = np.array([[3, 7, 2, 0, 0, 0],
                        [9, 4, 4, 6, 1, 5]])
        padded = np.concatenate([ids, np.zeros((2, 4), dtype=ids.dtype)], axis=1)

        sent = build_sentiment(tiny_sentiment_spec(), vocab_size=12, seed=5)
        assert np.array_equal(sent.forward(ids), sent.forward(padded))

        clf = build_classifier(tiny_classifier_spec(), vocab_size=12, seed=5)
        assert np.array_equal(clf.forward(ids), clf.forward(padded))
