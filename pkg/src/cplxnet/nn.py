"""Layers, initialization, Adam, and the training loop.

Only what the three architectures need: real conv, the complex-conv layer,
dense layers, ReLU, inverted dropout, softmax cross-entropy and Adam with
the standard defaults (lr 1e-3, beta1 0.9, beta2 0.999, eps 1e-8).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import tensor as T
from .errors import ContractError, NumericError
from .tensor import Tensor

__all__ = [
    "glorot_init",
    "Dense",
    "Conv2D",
    "ComplexConv",
    "Adam",
    "TrainConfig",
    "train_model",
]


def glorot_init(shape, rng: np.random.Generator, fan_in=None, fan_out=None) -> Tensor:
    """Glorot-uniform weights: U(+-sqrt(6/(fan_in+fan_out)))."""
    if fan_in is None or fan_out is None:
        if len(shape) == 2:                       # dense (in, out)
            fan_in, fan_out = shape
        elif len(shape) == 4:                     # conv (Co, Ci, kH, kW)
            rf = shape[2] * shape[3]
            fan_in, fan_out = shape[1] * rf, shape[0] * rf
        else:
            raise ContractError(f"cannot derive fans from shape {shape}")
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return Tensor(rng.uniform(-limit, limit, size=shape), requires_grad=True)


class Dense:
    def __init__(self, n_in, n_out, rng):
        self.w = glorot_init((n_in, n_out), rng)
        self.b = Tensor(np.zeros(n_out), requires_grad=True)

    def __call__(self, x: Tensor) -> Tensor:
        return T.matmul(x, self.w) + self.b

    def params(self):
        return [self.w, self.b]


class Conv2D:
    """Valid-mode cross-correlation layer with per-filter bias."""

    def __init__(self, c_out, c_in, kernel, rng):
        self.f = glorot_init((c_out, c_in, *kernel), rng)
        self.b = Tensor(np.zeros(c_out), requires_grad=True)

    def __call__(self, x: Tensor) -> Tensor:
        out = T.xcorr2d_valid(x, self.f)
        return out + T.reshape(self.b, (1, -1, 1, 1))

    def params(self):
        return [self.f, self.b]


class ComplexConv:
    """First layer of the Complex architecture.

    ``n_filters`` complex filters of ``n_taps`` taps each slide along a
    (B, 2, N) I/Q batch.  Per filter the three-column trick recombines into
    an (I, Q) output pair, so the layer emits (B, n_filters, 2, N-M+1): one
    two-row complex feature map per filter, which is exactly the shape the
    downstream real conv of the CNN2 tail expects.

    Taps live in a (n_filters, n_taps, 2) tensor with [..., 0] = h' and
    [..., 1] = h''; bias is one complex value (b', b'') per filter.
    """

    def __init__(self, n_filters, n_taps, rng):
        # fans counted in complex multiplies: 1 input channel, taps window
        self.taps = glorot_init(
            (n_filters, n_taps, 2), rng, fan_in=n_taps, fan_out=n_filters * n_taps
        )
        self.b = Tensor(np.zeros((n_filters, 2)), requires_grad=True)
        self.n_filters = n_filters
        self.n_taps = n_taps

    def __call__(self, x: Tensor) -> Tensor:
        b, two, n = x.shape
        m = self.n_taps
        z = T.pad_last(T.transpose_last2(x), 1, 1)            # (B, N, 4)
        z = T.reshape(z, (b, 1, n, 4))
        kernel = T.stack([self.taps[:, :, 1], self.taps[:, :, 0]], axis=2)
        kernel = T.reshape(kernel, (self.n_filters, 1, m, 2))
        cols = T.xcorr2d_valid(z, kernel)                     # (B, F, N-M+1, 3)
        i_out = cols[:, :, :, 0] - cols[:, :, :, 2]
        q_out = cols[:, :, :, 1]
        out = T.stack([i_out, q_out], axis=2)                 # (B, F, 2, N-M+1)
        return out + T.reshape(self.b, (1, self.n_filters, 2, 1))

    def params(self):
        return [self.taps, self.b]


class Adam:
    """Bias-corrected Adam over a fixed parameter list, updating in place."""

    def __init__(self, params, lr=1e-3, beta1=0.9, beta2=0.999, eps=1e-8):
        self.params = list(params)
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.t = 0
        self.m = [np.zeros_like(p.data) for p in self.params]
        self.v = [np.zeros_like(p.data) for p in self.params]

    def zero_grad(self):
        for p in self.params:
            p.zero_grad()

    def step(self):
        self.t += 1
        b1, b2 = self.beta1, self.beta2
        bc1 = 1.0 - b1 ** self.t
        bc2 = 1.0 - b2 ** self.t
        for p, m, v in zip(self.params, self.m, self.v):
            if p.grad is None:
                raise ContractError("parameter has no gradient buffer")
            g = p.grad
            m += (1.0 - b1) * (g - m)
            v += (1.0 - b2) * (g * g - v)
            p.data -= (self.lr * (m / bc1) / (np.sqrt(v / bc2) + self.eps)).astype(np.float32)


@dataclass
class TrainConfig:
    epochs: int = 100
    batch_size: int = 1024
    lr: float = 1e-3
    val_frac: float = 0.05
    patience: int = 5
    seed: int = 0
    verbose: bool = False


@dataclass
class TrainHistory:
    train_loss: list = field(default_factory=list)
    val_loss: list = field(default_factory=list)
    epochs_run: int = 0
    stopped_early: bool = False


def _one_hot(labels: np.ndarray, k: int) -> np.ndarray:
    out = np.zeros((labels.shape[0], k), np.float32)
    out[np.arange(labels.shape[0]), labels] = 1.0
    return out


def train_model(model, x: np.ndarray, y: np.ndarray, cfg: TrainConfig) -> TrainHistory:
    """Adam + early stopping on a held-out validation slice.

    ``x`` is (n, 2, 128) float32, ``y`` integer class labels.  Batch order,
    validation split and dropout masks all derive from ``cfg.seed``, so a
    run is reproducible end to end.
    """
    rng = np.random.default_rng(cfg.seed)
    n = x.shape[0]
    k = model.spec.num_classes
    order = rng.permutation(n)
    n_val = max(1, int(round(n * cfg.val_frac))) if cfg.val_frac > 0 else 0
    val_idx, tr_idx = order[:n_val], order[n_val:]
    if len(tr_idx) == 0:
        raise ContractError(
            f"no training samples left ({n} total, {n_val} held out for validation)"
        )
    xtr, ytr = x[tr_idx], _one_hot(y[tr_idx], k)
    xval, yval = x[val_idx], _one_hot(y[val_idx], k)

    opt = Adam(model.params(), lr=cfg.lr)
    hist = TrainHistory()
    best_val = np.inf
    best_state = None
    bad_epochs = 0

    for epoch in range(cfg.epochs):
        perm = rng.permutation(xtr.shape[0])
        losses = []
        for start in range(0, xtr.shape[0], cfg.batch_size):
            idx = perm[start:start + cfg.batch_size]
            logits = model.forward(Tensor(xtr[idx]), training=True)
            loss = T.softmax_xent(logits, ytr[idx])
            if not np.isfinite(loss.item()):
                raise NumericError(f"NaN/Inf loss at epoch {epoch}")
            opt.zero_grad()
            loss.backward()
            opt.step()
            losses.append(loss.item())
        hist.train_loss.append(float(np.mean(losses)))

        if n_val:
            with T.no_grad():
                logits = model.forward(Tensor(xval), training=False)
                vloss = T.softmax_xent(logits, yval).item()
            hist.val_loss.append(vloss)
            if cfg.verbose:
                print(f"epoch {epoch}: train {hist.train_loss[-1]:.4f} val {vloss:.4f}")
            if vloss < best_val - 1e-5:
                best_val = vloss
                best_state = [p.data.copy() for p in model.params()]
                bad_epochs = 0
            else:
                bad_epochs += 1
                if bad_epochs >= cfg.patience:
                    hist.stopped_early = True
                    hist.epochs_run = epoch + 1
                    break
        hist.epochs_run = epoch + 1

    if best_state is not None:
        for p, d in zip(model.params(), best_state):
            p.data[...] = d
    return hist
