"""Network presets and the sequential container.

Two presets mirror the production configurations: a recurrent article
classifier (300-dim embeddings, LSTM with 100 hidden units, vocabulary cap
50k, sequence cap 1000, batch 32, 5 epochs, output size 8, 19, or 9) and a
convolutional-recurrent sentiment model (vocabulary cap 60k, sequence cap
200, Conv1D with 200 filters, two stacked BiLSTMs with dropout 0.5, dense
stack, batch 256, Adam with L2).  `tiny_*` variants shrink every dimension
for tests and demos without changing the architecture.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .layers import (BiLSTM, Conv1D, Dense, Dropout, Embedding, LSTM,
                     MaskedReadout, MaxPool1D, NeuralError, cross_entropy,
                     softmax)


@dataclass(frozen=True)
class ClassifierSpec:
    embed_dim: int = 300
    vocab_cap: int = 50_000
    seq_cap: int = 1_000
    hidden: int = 100
    n_classes: int = 8
    batch_size: int = 32
    epochs: int = 5
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    l2: float = 1e-4

    def __post_init__(self):
        if self.n_classes not in (8, 19, 9):
            raise NeuralError("classifier output size must be 8 (classes), "
                              "19 (sub-classes) or 9 (topics)")


@dataclass(frozen=True)
class SentimentSpec:
    embed_dim: int = 300
    vocab_cap: int = 60_000
    seq_cap: int = 200
    conv_filters: int = 200
    conv_width: int = 3
    pool_window: int = 2
    lstm_hidden: int = 100
    dense_hidden: int = 64
    dropout: float = 0.5
    n_classes: int = 2
    batch_size: int = 256
    epochs: int = 5
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    l2: float = 1e-4

    def __post_init__(self):
        if not (0.0 <= self.dropout < 1.0):
            raise NeuralError("dropout must be in [0, 1)")
        if self.n_classes < 2:
            raise NeuralError("need at least 2 classes")


def tiny_classifier_spec(**overrides) -> ClassifierSpec:
    """Same architecture at test scale."""
    base = dict(embed_dim=16, vocab_cap=200, seq_cap=32, hidden=8,
                n_classes=8, batch_size=8, epochs=5)
    base.update(overrides)
    return ClassifierSpec(**base)


def tiny_sentiment_spec(**overrides) -> SentimentSpec:
    base = dict(embed_dim=12, vocab_cap=200, seq_cap=24, conv_filters=10,
                conv_width=3, pool_window=2, lstm_hidden=6, dense_hidden=8,
                dropout=0.5, n_classes=2, batch_size=8, epochs=5)
    base.update(overrides)
    return SentimentSpec(**base)


class Net:
    """Ordered layers threaded over (x, mask), ending in logits.

    The first layer consumes integer token ids; MaskedReadout collapses the
    sequence axis, after which layers see plain (B, D) vectors.  The
    reported loss is the plain cross-entropy (L2 lives in the optimizer).
    """

    def __init__(self, layers, n_classes: int, pad_id: int = 0):
        self.layers = list(layers)
        self.n_classes = n_classes
        self.pad_id = pad_id

    def params(self):
        return [p for layer in self.layers for p in layer.params()]

    def zero_grads(self):
        for p in self.params():
            p.zero_grad()

    def forward(self, ids, train: bool = False, rng=None) -> np.ndarray:
        ids = np.asarray(ids)
        if ids.ndim != 2:
            raise NeuralError("expected (batch, time) token ids")
        x, mask = ids, None
        for layer in self.layers:
            x, mask = layer.forward(x, mask, train=train, rng=rng)
        return x

    def predict_proba(self, ids) -> np.ndarray:
        return softmax(self.forward(ids, train=False))

    def predict(self, ids):
        probs = self.predict_proba(ids)
        return probs.argmax(axis=1), probs

    def loss_only(self, ids, labels, train: bool = False, rng=None) -> float:
        logits = self.forward(ids, train=train, rng=rng)
        loss, _, _ = cross_entropy(logits, np.asarray(labels))
        return loss

    def loss_and_backward(self, ids, labels, train: bool = False, rng=None):
        """Forward, cross-entropy, full backprop; returns (loss, probs)."""
        logits = self.forward(ids, train=train, rng=rng)
        loss, dlogits, probs = cross_entropy(logits, np.asarray(labels))
        grad = dlogits
        for layer in reversed(self.layers):
            grad = layer.backward(grad)
        return loss, probs


def build_classifier(spec: ClassifierSpec, vocab_size: int, seed: int = 0,
                     embedding_weights: Optional[np.ndarray] = None) -> Net:
    """Embedding -> LSTM -> last-valid readout -> dense softmax output."""
    layers = [
        Embedding(vocab_size, spec.embed_dim, name="embed", seed=seed,
                  weights=embedding_weights),
        LSTM(spec.embed_dim, spec.hidden, name="lstm", seed=seed),
        MaskedReadout(bidirectional=False, name="readout"),
        Dense(spec.hidden, spec.n_classes, name="out", seed=seed),
    ]
    return Net(layers, spec.n_classes)


def build_sentiment(spec: SentimentSpec, vocab_size: int, seed: int = 0,
                    embedding_weights: Optional[np.ndarray] = None) -> Net:
    """Embedding -> Conv1D(ReLU) -> MaxPool -> BiLSTM -> dropout -> BiLSTM
    -> dropout -> readout -> Dense(ReLU) -> dense softmax output."""
    H = spec.lstm_hidden
    layers = [
        Embedding(vocab_size, spec.embed_dim, name="embed", seed=seed,
                  weights=embedding_weights),
        Conv1D(spec.embed_dim, spec.conv_filters, spec.conv_width,
               activation="relu", name="conv", seed=seed),
        MaxPool1D(spec.pool_window, name="pool"),
        BiLSTM(spec.conv_filters, H, name="bilstm1", seed=seed),
        Dropout(spec.dropout, name="drop1"),
        BiLSTM(2 * H, H, name="bilstm2", seed=seed),
        Dropout(spec.dropout, name="drop2"),
        MaskedReadout(bidirectional=True, name="readout"),
        Dense(2 * H, spec.dense_hidden, activation="relu", name="hidden", seed=seed),
        Dense(spec.dense_hidden, spec.n_classes, name="out", seed=seed),
    ]
    return Net(layers, spec.n_classes)
