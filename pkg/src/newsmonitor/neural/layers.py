"""Batched layers with explicit padding masks.

Conventions:
  - sequences are right-padded; mask is (B, T) bool with True = real token
  - every sequence layer's forward returns (output, output_mask)
  - forward caches what backward needs; layers are single-use per step
    (forward then backward) and train single-threaded
  - float64 throughout so finite-difference checks are meaningful

Masking semantics: a Conv1D output is valid only when its whole input
window is valid; MaxPool1D keeps a window with any valid element; LSTM
passes state through unchanged on invalid steps.  Invalid outputs are
forced to zero, so appending pad tokens can never change a prediction.
"""

from __future__ import annotations

import numpy as np

from ..rng import CounterRng

PAD_ROW_ID = 0


class NeuralError(Exception):
    pass


class Parameter:
    """A named weight array and its gradient accumulator."""

    def __init__(self, name: str, value: np.ndarray, weight_decay: bool = True):
        self.name = name
        self.value = np.asarray(value, dtype=np.float64)
        self.grad = np.zeros_like(self.value)
        self.weight_decay = weight_decay

    def zero_grad(self):
        self.grad[...] = 0.0


def sigmoid(x):
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def cross_entropy(logits: np.ndarray, labels: np.ndarray):
    """Mean categorical cross-entropy and its gradient wrt logits."""
    probs = softmax(logits)
    n = logits.shape[0]
    picked = probs[np.arange(n), labels]
    loss = float(-np.log(np.maximum(picked, 1e-300)).mean())
    dlogits = probs.copy()
    dlogits[np.arange(n), labels] -= 1.0
    return loss, dlogits / n, probs


def glorot_uniform(shape, fan_in, fan_out, rng: CounterRng) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, int(np.prod(shape))).reshape(shape)


class Layer:
    name = "layer"

    def params(self):
        return []

    def forward(self, x, mask, train=False, rng=None):
        raise NotImplementedError

    def backward(self, dy):
        raise NotImplementedError


class Embedding(Layer):
    """Token-id lookup; the pad row is pinned to zero."""

    def __init__(self, vocab_size: int, dim: int, name: str = "embed",
                 seed: int = 0, pad_id: int = 0, weights=None):
        self.name = name
        self.vocab_size = vocab_size
        self.dim = dim
        self.pad_id = pad_id
        if weights is None:
            rng = CounterRng(seed, "init", name, "W")
            weights = rng.uniform(-0.05, 0.05, vocab_size * dim).reshape(vocab_size, dim)
        weights = np.array(weights, dtype=np.float64)
        if weights.shape != (vocab_size, dim):
            raise NeuralError(f"embedding shape {weights.shape} != {(vocab_size, dim)}")
        weights[pad_id] = 0.0
        self.W = Parameter(f"{name}.W", weights)

    def params(self):
        return [self.W]

    def forward(self, ids, mask, train=False, rng=None):
        ids = np.asarray(ids)
        if ids.min() < 0 or ids.max() >= self.vocab_size:
            raise NeuralError("token id out of embedding range")
        if mask is None:
            mask = ids != self.pad_id
        y = self.W.value[ids]
        y = y * mask[:, :, None]
        self._cache = (ids, mask)
        return y, mask

    def backward(self, dy):
        ids, mask = self._cache
        dy = dy * mask[:, :, None]
        np.add.at(self.W.grad, ids, dy)
        self.W.grad[self.pad_id] = 0.0
        return None  # ids have no gradient


class Conv1D(Layer):
    """Valid-mode cross-correlation along time, then optional ReLU.

    Output position t is valid only when input positions t .. t+width-1 are
    all valid; invalid outputs are zeroed.
    """

    def __init__(self, in_dim: int, filters: int, width: int = 3,
                 activation: str = "relu", name: str = "conv", seed: int = 0):
        if width < 1:
            raise NeuralError("kernel width must be >= 1")
        if activation not in ("relu", None):
            raise NeuralError(f"unknown activation {activation!r}")
        self.name = name
        self.width = width
        self.activation = activation
        rng = CounterRng(seed, "init", name, "W")
        self.W = Parameter(f"{name}.W",
                           glorot_uniform((width, in_dim, filters),
                                          width * in_dim, width * filters, rng))
        self.b = Parameter(f"{name}.b", np.zeros(filters), weight_decay=False)

    def params(self):
        return [self.W, self.b]

    def forward(self, x, mask, train=False, rng=None):
        B, T, D = x.shape
        w = self.width
        if T < w:
            raise NeuralError(f"sequence length {T} shorter than kernel width {w}")
        T_out = T - w + 1
        pre = np.tile(self.b.value, (B, T_out, 1))
        for j in range(w):
            pre += x[:, j:j + T_out, :] @ self.W.value[j]
        out_mask = mask[:, :T_out].copy()
        for j in range(1, w):
            out_mask &= mask[:, j:j + T_out]
        y = np.maximum(pre, 0.0) if self.activation == "relu" else pre
        y = y * out_mask[:, :, None]
        self._cache = (x, pre, out_mask)
        return y, out_mask

    def backward(self, dy):
        x, pre, out_mask = self._cache
        B, T, D = x.shape
        T_out = pre.shape[1]
        dpre = dy * out_mask[:, :, None]
        if self.activation == "relu":
            dpre = dpre * (pre > 0.0)
        self.b.grad += dpre.sum(axis=(0, 1))
        dx = np.zeros_like(x)
        for j in range(self.width):
            self.W.grad[j] += np.einsum("btd,btf->df", x[:, j:j + T_out, :], dpre)
            dx[:, j:j + T_out, :] += dpre @ self.W.value[j].T
        return dx


class MaxPool1D(Layer):
    """Non-overlapping temporal max pooling with a partial tail window.

    A window is valid when any element is valid; the max runs over the valid
    elements only (ties break to the earliest position).
    """

    def __init__(self, window: int = 2, name: str = "pool"):
        if window < 1:
            raise NeuralError("pool window must be >= 1")
        self.name = name
        self.window = window

    def forward(self, x, mask, train=False, rng=None):
        B, T, D = x.shape
        w = self.window
        T_out = -(-T // w)  # ceil
        pad = T_out * w - T
        xp = np.concatenate([x, np.full((B, pad, D), -np.inf)], axis=1) if pad else x
        mp = np.concatenate([mask, np.zeros((B, pad), bool)], axis=1) if pad else mask
        xw = xp.reshape(B, T_out, w, D)
        mw = mp.reshape(B, T_out, w)
        vals = np.where(mw[:, :, :, None], xw, -np.inf)
        arg = vals.argmax(axis=2)
        y = np.take_along_axis(vals, arg[:, :, None, :], axis=2)[:, :, 0, :]
        out_mask = mw.any(axis=2)
        y = np.where(out_mask[:, :, None], y, 0.0)
        self._cache = (arg, out_mask, B, T, D, pad)
        return y, out_mask

    def backward(self, dy):
        arg, out_mask, B, T, D, pad = self._cache
        w = self.window
        T_out = arg.shape[1]
        dy = dy * out_mask[:, :, None]
        dxw = np.zeros((B, T_out, w, D))
        np.put_along_axis(dxw, arg[:, :, None, :], dy[:, :, None, :], axis=2)
        dx = dxw.reshape(B, T_out * w, D)
        return dx[:, :T, :]


class LSTM(Layer):
    """Single-direction LSTM returning the full hidden sequence.

    Gate order in the stacked weight matrices is [input, forget, output,
    candidate]; i, f, o use sigmoid and the candidate uses tanh:

        c_t = f * c_{t-1} + i * g        h_t = o * tanh(c_t)

    Invalid (pad) steps pass h and c through unchanged.  direction
    "backward" runs the same recurrence on the reversed sequence and
    reverses the output back.
    """

    def __init__(self, in_dim: int, hidden: int, direction: str = "forward",
                 name: str = "lstm", seed: int = 0):
        if direction not in ("forward", "backward"):
            raise NeuralError(f"unknown direction {direction!r}")
        self.name = name
        self.hidden = hidden
        self.direction = direction
        rng_x = CounterRng(seed, "init", name, "Wx")
        rng_h = CounterRng(seed, "init", name, "Wh")
        self.Wx = Parameter(f"{name}.Wx", glorot_uniform((in_dim, 4 * hidden),
                                                         in_dim, 4 * hidden, rng_x))
        scale = 1.0 / np.sqrt(hidden)
        self.Wh = Parameter(f"{name}.Wh",
                            rng_h.uniform(-scale, scale, hidden * 4 * hidden)
                            .reshape(hidden, 4 * hidden))
        self.b = Parameter(f"{name}.b", np.zeros(4 * hidden), weight_decay=False)

    def params(self):
        return [self.Wx, self.Wh, self.b]

    def forward(self, x, mask, train=False, rng=None):
        if x.shape[2] != self.Wx.value.shape[0]:
            raise NeuralError(f"input dim {x.shape[2]} != {self.Wx.value.shape[0]}")
        flip = self.direction == "backward"
        if flip:
            x = x[:, ::-1, :]
            mask = mask[:, ::-1]
        B, T, D = x.shape
        H = self.hidden
        h = np.zeros((B, H))
        c = np.zeros((B, H))
        outs = np.empty((B, T, H))
        steps = []
        for t in range(T):
            xt = x[:, t, :]
            a = xt @ self.Wx.value + h @ self.Wh.value + self.b.value
            i = sigmoid(a[:, :H])
            f = sigmoid(a[:, H:2 * H])
            o = sigmoid(a[:, 2 * H:3 * H])
            g = np.tanh(a[:, 3 * H:])
            c_new = f * c + i * g
            tanh_c = np.tanh(c_new)
            h_new = o * tanh_c
            m = mask[:, t:t + 1].astype(np.float64)
            steps.append((xt, h, c, i, f, o, g, tanh_c, m))
            h = m * h_new + (1 - m) * h
            c = m * c_new + (1 - m) * c
            outs[:, t, :] = h
        self._cache = (steps, mask, flip, B, T, D)
        if flip:
            return outs[:, ::-1, :], mask[:, ::-1]
        return outs, mask

    def backward(self, dy):
        steps, mask, flip, B, T, D = self._cache
        if flip:
            dy = dy[:, ::-1, :]
        H = self.hidden
        dh = np.zeros((B, H))
        dc = np.zeros((B, H))
        dx = np.empty((B, T, D))
        for t in range(T - 1, -1, -1):
            xt, h_prev, c_prev, i, f, o, g, tanh_c, m = steps[t]
            dh = dh + dy[:, t, :]
            # valid rows update the state; invalid rows pass gradients through
            dh_v = dh * m
            dc_v = dc * m
            do = dh_v * tanh_c
            dct = dc_v + dh_v * o * (1.0 - tanh_c ** 2)
            di = dct * g
            dg = dct * i
            df = dct * c_prev
            da = np.concatenate([di * i * (1 - i), df * f * (1 - f),
                                 do * o * (1 - o), dg * (1 - g ** 2)], axis=1)
            self.Wx.grad += xt.T @ da
            self.Wh.grad += h_prev.T @ da
            self.b.grad += da.sum(axis=0)
            dx[:, t, :] = da @ self.Wx.value.T
            dh = da @ self.Wh.value.T + dh * (1 - m)
            dc = dct * f + dc * (1 - m)
        if flip:
            dx = dx[:, ::-1, :]
        return dx


class BiLSTM(Layer):
    """Forward and backward LSTMs concatenated per step (2 x hidden)."""

    def __init__(self, in_dim: int, hidden: int, name: str = "bilstm", seed: int = 0):
        self.name = name
        self.hidden = hidden
        self.fwd = LSTM(in_dim, hidden, "forward", name=f"{name}.fwd", seed=seed)
        self.bwd = LSTM(in_dim, hidden, "backward", name=f"{name}.bwd", seed=seed)

    def params(self):
        return self.fwd.params() + self.bwd.params()

    def forward(self, x, mask, train=False, rng=None):
        yf, _ = self.fwd.forward(x, mask, train, rng)
        yb, _ = self.bwd.forward(x, mask, train, rng)
        return np.concatenate([yf, yb], axis=2), mask

    def backward(self, dy):
        H = self.hidden
        dxf = self.fwd.backward(dy[:, :, :H])
        dxb = self.bwd.backward(dy[:, :, H:])
        return dxf + dxb


class Dropout(Layer):
    """Inverted dropout; active only in training, identity at inference."""

    def __init__(self, rate: float, name: str = "dropout"):
        if not (0.0 <= rate < 1.0):
            raise NeuralError("dropout rate must be in [0, 1)")
        self.name = name
        self.rate = rate

    def forward(self, x, mask, train=False, rng=None):
        if not train or self.rate == 0.0:
            self._keep = None
            return x, mask
        if rng is None:
            raise NeuralError("training-mode dropout needs an rng")
        u = rng.uniforms(x.size).reshape(x.shape)
        self._keep = (u >= self.rate) / (1.0 - self.rate)
        return x * self._keep, mask

    def backward(self, dy):
        if self._keep is None:
            return dy
        return dy * self._keep


class MaskedReadout(Layer):
    """Sequence -> vector: last-valid step (unidirectional) or last-valid
    forward half plus first-valid backward half (bidirectional).  Rows with
    no valid step read zeros, which makes the downstream output bias-driven.
    """

    def __init__(self, bidirectional: bool = False, name: str = "readout"):
        self.name = name
        self.bidirectional = bidirectional

    def forward(self, x, mask, train=False, rng=None):
        B, T, F = x.shape
        any_valid = mask.any(axis=1)
        # argmax finds the first True; reversed search finds the last
        first = mask.argmax(axis=1)
        last = T - 1 - mask[:, ::-1].argmax(axis=1)
        rows = np.arange(B)
        if self.bidirectional:
            if F % 2:
                raise NeuralError("bidirectional readout needs an even feature dim")
            H = F // 2
            y = np.concatenate([x[rows, last, :H], x[rows, first, H:]], axis=1)
        else:
            y = x[rows, last, :]
        y = y * any_valid[:, None]
        self._cache = (first, last, any_valid, B, T, F)
        return y, None

    def backward(self, dy):
        first, last, any_valid, B, T, F = self._cache
        dy = dy * any_valid[:, None]
        dx = np.zeros((B, T, F))
        rows = np.arange(B)
        if self.bidirectional:
            H = F // 2
            dx[rows, last, :H] = dy[:, :H]
            dx[rows, first, H:] += dy[:, H:]
        else:
            dx[rows, last, :] = dy
        return dx


class Dense(Layer):
    """Affine layer on (..., D) inputs with optional ReLU."""

    def __init__(self, in_dim: int, out_dim: int, activation=None,
                 name: str = "dense", seed: int = 0):
        if activation not in ("relu", None):
            raise NeuralError(f"unknown activation {activation!r}")
        self.name = name
        self.activation = activation
        rng = CounterRng(seed, "init", name, "W")
        self.W = Parameter(f"{name}.W", glorot_uniform((in_dim, out_dim),
                                                       in_dim, out_dim, rng))
        self.b = Parameter(f"{name}.b", np.zeros(out_dim), weight_decay=False)

    def params(self):
        return [self.W, self.b]

    def forward(self, x, mask, train=False, rng=None):
        pre = x @ self.W.value + self.b.value
        y = np.maximum(pre, 0.0) if self.activation == "relu" else pre
        self._cache = (x, pre)
        return y, mask

    def backward(self, dy):
        x, pre = self._cache
        if self.activation == "relu":
            dy = dy * (pre > 0.0)
        flat_x = x.reshape(-1, x.shape[-1])
        flat_dy = dy.reshape(-1, dy.shape[-1])
        self.W.grad += flat_x.T @ flat_dy
        self.b.grad += flat_dy.sum(axis=0)
        return dy @ self.W.value.T
