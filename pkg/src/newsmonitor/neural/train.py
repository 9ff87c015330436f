"""Seeded mini-batch training loop and the net-side vocabulary.

Everything stochastic (shuffling, dropout) draws from counter-mode streams
derived from the training seed, so a run is reproducible bit-for-bit in
single-threaded execution.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ..rng import CounterRng, derive_seed
from .layers import NeuralError
from .models import Net
from .optim import Adam

PAD_ID = 0
UNK_ID = 1


class NetVocab:
    """Frequency-capped word -> id map for the networks (0 = pad, 1 = unk)."""

    def __init__(self, words: Sequence):
        self.words = tuple(words)
        self._ids = {w: i + 2 for i, w in enumerate(self.words)}

    def __len__(self):
        return len(self.words) + 2

    @classmethod
    def from_token_lists(cls, token_lists, cap: int) -> "NetVocab":
        """Keep the `cap` most frequent words (ties break lexicographically)."""
        tf = {}
        for tokens in token_lists:
            for t in tokens:
                tf[t] = tf.get(t, 0) + 1
        keep = sorted(tf, key=lambda w: (-tf[w], w))[:cap]
        return cls(keep)

    @classmethod
    def from_vocabulary(cls, vocab, cap: int) -> "NetVocab":
        order = sorted(vocab.id_to_word,
                       key=lambda w: (-vocab.term_freq[vocab.word_to_id[w]], w))
        return cls(order[:cap])

    def encode(self, tokens, seq_cap: Optional[int] = None) -> list:
        ids = [self._ids.get(t, UNK_ID) for t in tokens]
        if seq_cap is not None:
            ids = ids[:seq_cap]
        return ids


def pad_batch(docs, seq_cap: int, pad_id: int = PAD_ID) -> np.ndarray:
    """Right-pad / truncate to a (B, seq_cap) id matrix (keeps the first
    seq_cap tokens)."""
    out = np.full((len(docs), seq_cap), pad_id, dtype=np.int64)
    for i, doc in enumerate(docs):
        ids = list(doc)[:seq_cap]
        out[i, :len(ids)] = ids
    return out


@dataclass
class TrainResult:
    net: Net
    history: list  # dicts: epoch, split, loss, accuracy

    def history_rows(self):
        rows = [["epoch", "split", "loss", "accuracy"]]
        for h in self.history:
            rows.append([h["epoch"], h["split"], h["loss"], h["accuracy"]])
        return rows


def evaluate_net(net: Net, docs, labels, spec) -> tuple:
    """(mean loss, accuracy) with dropout off."""
    ids = pad_batch(docs, spec.seq_cap)
    labels = np.asarray(labels)
    losses, correct = [], 0
    for s in range(0, len(docs), spec.batch_size):
        batch = ids[s:s + spec.batch_size]
        lab = labels[s:s + spec.batch_size]
        logits = net.forward(batch, train=False)
        shifted = logits - logits.max(axis=1, keepdims=True)
        logp = shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))
        losses.append(float(-logp[np.arange(len(lab)), lab].mean()) * len(lab))
        correct += int((logits.argmax(axis=1) == lab).sum())
    return sum(losses) / len(docs), correct / len(docs)


def train(net: Net, spec, train_docs, train_labels,
          val_docs=None, val_labels=None, seed: int = 0) -> TrainResult:
    """Mini-batch Adam with L2; dropout active in training passes only.

    Errors out when any class id in [0, n_classes) has no training example.
    Per-epoch rows log train and validation loss/accuracy; train metrics are
    the running average over the epoch's batches (computed pre-update, as
    logged by everyday training loops).
    """
    train_labels = np.asarray(train_labels)
    present = set(int(v) for v in train_labels)
    missing = sorted(set(range(net.n_classes)) - present)
    if missing:
        raise NeuralError(f"classes absent from training set: {missing}")
    ids_all = pad_batch(train_docs, spec.seq_cap)
    n = len(train_docs)
    opt = Adam(net.params(), lr=spec.lr, beta1=spec.beta1, beta2=spec.beta2,
               eps=spec.eps, l2=spec.l2)
    history = []
    for epoch in range(spec.epochs):
        order = CounterRng(seed, "shuffle", epoch).permutation(n)
        total_loss, total_correct = 0.0, 0
        for b, start in enumerate(range(0, n, spec.batch_size)):
            pick = order[start:start + spec.batch_size]
            batch = ids_all[pick]
            labels = train_labels[pick]
            rng = CounterRng(derive_seed(seed, "dropout", epoch, b))
            net.zero_grads()
            loss, probs = net.loss_and_backward(batch, labels, train=True, rng=rng)
            opt.step()
            total_loss += loss * len(pick)
            total_correct += int((probs.argmax(axis=1) == labels).sum())
        history.append({"epoch": epoch, "split": "train",
                        "loss": total_loss / n, "accuracy": total_correct / n})
        if val_docs is not None and len(val_docs):
            vloss, vacc = evaluate_net(net, val_docs, val_labels, spec)
            history.append({"epoch": epoch, "split": "validation",
                            "loss": vloss, "accuracy": vacc})
    return TrainResult(net, history)


def predict(net: Net, doc, seq_cap: int):
    """(label index, probability vector) for one encoded document."""
    ids = pad_batch([doc], seq_cap)
    labels, probs = net.predict(ids)
    return int(labels[0]), probs[0]
