"""Finite-difference verification of every analytic gradient.

Central differences with eps = 1e-5 on 64-bit parameters, dropout disabled.
Relative error per entry is |analytic - numeric| / max(|analytic|,
|numeric|, 1e-6); the maximum over all checked entries is returned.

The 1e-6 floor makes the metric well defined for near-zero entries: the
central difference itself carries round-off noise of roughly
machine_eps * |loss| / eps ~ 1e-11, which would swamp a pure ratio on
gradients that small. Entries below the floor are therefore compared on
an absolute scale; genuine backward bugs show up at the size of the
gradient itself, orders of magnitude above it.
"""

from __future__ import annotations

import numpy as np

from .layers import cross_entropy


def _max_rel_err(model, ids, labels, params, eps: float) -> float:
    for p in params:
        p.zero_grad()
    model.loss_and_backward(ids, labels, train=False)
    worst = 0.0
    for p in params:
        analytic = p.grad.copy()
        flat = p.value.ravel()
        grad_flat = analytic.ravel()
        for idx in range(flat.size):
            orig = flat[idx]
            flat[idx] = orig + eps
            up = model.loss_only(ids, labels, train=False)
            flat[idx] = orig - eps
            down = model.loss_only(ids, labels, train=False)
            flat[idx] = orig
            numeric = (up - down) / (2.0 * eps)
            a = grad_flat[idx]
            rel = abs(a - numeric) / max(abs(a), abs(numeric), 1e-6)
            worst = max(worst, rel)
    return worst


def grad_check(net, ids, labels, eps: float = 1e-5) -> float:
    """Max relative error over every parameter entry of a Net."""
    return _max_rel_err(net, np.asarray(ids), np.asarray(labels),
                        net.params(), eps)


class LayerHarness:
    """Wraps a layer stack taking float input so single layers can be
    finite-difference checked: mean-pools the output (flattening any
    sequence axis), applies a fixed projection to class logits, and scores
    cross-entropy."""

    def __init__(self, layers, feature_dim: int, n_classes: int = 3, seed: int = 7):
        from ..rng import CounterRng
        self.layers = list(layers)
        rng = CounterRng(seed, "harness")
        self.proj = rng.uniform(-0.5, 0.5, feature_dim * n_classes) \
            .reshape(feature_dim, n_classes)
        self.x = None
        self.mask = None

    def params(self):
        return [p for layer in self.layers for p in layer.params()]

    def set_input(self, x, mask=None):
        self.x = np.asarray(x, dtype=np.float64)
        if mask is None and self.x.ndim == 3:
            mask = np.ones(self.x.shape[:2], dtype=bool)
        self.mask = mask

    def _logits(self, train):
        x, mask = self.x, self.mask
        for layer in self.layers:
            x, mask = layer.forward(x, mask, train=train, rng=None)
        self._out_shape = x.shape
        if x.ndim == 3:
            x = x.mean(axis=1)
        return x @ self.proj

    def loss_only(self, ids, labels, train=False, rng=None) -> float:
        loss, _, _ = cross_entropy(self._logits(train), np.asarray(labels))
        return loss

    def loss_and_backward(self, ids, labels, train=False, rng=None) -> float:
        logits = self._logits(train)
        loss, dlogits, _ = cross_entropy(logits, np.asarray(labels))
        grad = dlogits @ self.proj.T
        if len(self._out_shape) == 3:
            T = self._out_shape[1]
            grad = np.repeat(grad[:, None, :], T, axis=1) / T
        for layer in reversed(self.layers):
            grad = layer.backward(grad)
        return loss

    def check(self, x, labels, mask=None, eps: float = 1e-5) -> float:
        self.set_input(x, mask)
        return _max_rel_err(self, None, np.asarray(labels), self.params(), eps)
