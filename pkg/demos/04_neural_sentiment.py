"""
A sentiment network from bare numpy
===================================

Builds the embedding -> convolution -> max-pool -> BiLSTM -> dense stack,
checks its gradients against finite differences, trains it on a small
keyword-separable corpus, and inspects a few predictions.
"""

import numpy as np

from newsmonitor.neural.gradcheck import grad_check
from newsmonitor.neural.models import build_sentiment, tiny_sentiment_spec
from newsmonitor.neural.train import (NetVocab, evaluate_net, pad_batch,
                                      predict, train)
from newsmonitor.synthetic import keyword_toy

# A toy corpus where the label is decidable from any single keyword:
# label 1 documents use optimistic vocabulary, label 0 gloomy vocabulary,
# both mixed with shared neutral filler.
docs, labels = keyword_toy(n_docs=200, seed=2)
print(f"{len(docs)} documents; example: {docs[0][:6]} -> label {labels[0]}")

spec = tiny_sentiment_spec(epochs=4, lr=0.01)
vocab = NetVocab.from_token_lists(docs, cap=spec.vocab_cap)
encoded = [vocab.encode(d, spec.seq_cap) for d in docs]
print(f"vocabulary {len(vocab)} ids (0 = padding, 1 = unknown)")

# Every gradient in the stack is hand-derived, so verify the whole thing
# against central differences before trusting the training loop. The probe
# batch uses distinct ids: repeated tokens can make two ReLU-clamped zeros
# share a pooling window, and at such an exact tie the loss has a kink
# where finite differences legitimately disagree with the subgradient.
net = build_sentiment(spec, vocab_size=len(vocab), seed=9)
probe = np.array([np.arange(2, 14), np.arange(14, 26)])
err = grad_check(net, probe, [0, 1])
print(f"max relative gradient error: {err:.2e}")

ids = pad_batch(encoded[:2], spec.seq_cap)

# Padding must be invisible: the same batch padded longer gives the same
# logits, because masks thread through every layer.
wider = np.concatenate([ids, np.zeros((2, 8), dtype=ids.dtype)], axis=1)
same = np.array_equal(net.forward(ids), net.forward(wider))
print(f"padding-invariant forward pass: {same}")

# Train on 160 documents, validate on the held-out 40.
result = train(net, spec, encoded[:160], labels[:160],
               val_docs=encoded[160:], val_labels=labels[160:], seed=21)
for h in result.history:
    print(f"  epoch {h['epoch']} {h['split']:<10} "
          f"loss {h['loss']:.4f}  acc {h['accuracy']:.3f}")

loss, acc = evaluate_net(net, encoded[160:], labels[160:], spec)
print(f"\nheld-out accuracy {acc:.3f}")

# Single-document predictions with per-class probabilities.
for i in (160, 161, 162):
    label, probs = predict(net, encoded[i], spec.seq_cap)
    print(f"  doc {i} {docs[i][:4]}... -> class {label} "
          f"(p = {np.round(probs, 3)}), gold {labels[i]}")
