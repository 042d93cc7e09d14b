"""Dense float32 tensors with reverse-mode automatic differentiation.

A Tensor wraps a contiguous row-major numpy array.  Every differentiable
operation records its parents and a local backward closure on the produced
tensor; calling :meth:`Tensor.backward` on a scalar loss walks the graph in
reverse topological order (a tape replay) and accumulates ``grad`` buffers
on every tensor with ``requires_grad``.  The graph is freed once backward
has run, so memory is bounded by a single forward pass.

Parameters and activations are float32; reductions, matmuls and the
convolution kernels accumulate in float64 (see :mod:`cplxnet.kernels`).
"""

from __future__ import annotations

from contextlib import contextmanager

import numpy as np

from . import kernels
from .errors import ContractError, DimensionError, NumericError

__all__ = [
    "Tensor",
    "no_grad",
    "stack",
    "relu",
    "dropout",
    "matmul",
    "xcorr2d_valid",
    "softmax_xent",
    "softmax",
]

_grad_enabled = True


@contextmanager
def no_grad():
    """Disable graph recording inside the block (inference / evaluation)."""
    global _grad_enabled
    saved = _grad_enabled
    _grad_enabled = False
    try:
        yield
    finally:
        _grad_enabled = saved


class Tensor:
    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward")

    def __init__(self, data, requires_grad=False):
        arr = np.ascontiguousarray(data, dtype=np.float32)
        self.data = arr
        self.requires_grad = bool(requires_grad)
        self.grad = np.zeros_like(arr) if self.requires_grad else None
        self._parents = ()
        self._backward = None

    # -- introspection ----------------------------------------------------
    @property
    def shape(self):
        return self.data.shape

    @property
    def ndim(self):
        return self.data.ndim

    @property
    def size(self):
        return self.data.size

    def __repr__(self):
        return f"Tensor(shape={self.data.shape}, requires_grad={self.requires_grad})"

    def item(self):
        return float(self.data.reshape(-1)[0])

    def zero_grad(self):
        if self.grad is not None:
            self.grad.fill(0.0)

    # -- graph bookkeeping ------------------------------------------------
    def _record(self, parents, backward):
        if _grad_enabled and any(p.requires_grad for p in parents):
            self.requires_grad = True
            self.grad = np.zeros_like(self.data)
            self._parents = tuple(parents)
            self._backward = backward
        return self

    def backward(self):
        """Reverse sweep from a scalar loss; accumulates into ``grad``."""
        if self.size != 1:
            raise ContractError("backward() requires a scalar tensor")
        if not self.requires_grad:
            raise ContractError("backward() on a tensor with no graph")

        topo: list[Tensor] = []
        seen = set()
        stack_ = [self]
        while stack_:
            t = stack_[-1]
            if id(t) in seen:
                stack_.pop()
                continue
            pending = [p for p in t._parents if id(p) not in seen]
            if pending:
                stack_.extend(pending)
            else:
                seen.add(id(t))
                topo.append(stack_.pop())

        self.grad += np.ones_like(self.data)
        for t in reversed(topo):
            if t._backward is not None:
                t._backward(t.grad)
            # free the tape as we go; no higher-order grads
            t._parents = ()
            t._backward = None
        if not np.isfinite(self.data).all():
            raise NumericError("non-finite loss value")

    # -- operator sugar ---------------------------------------------------
    def __add__(self, other):
        return add(self, _as_tensor(other))

    def __sub__(self, other):
        return add(self, mul(_as_tensor(other), -1.0))

    def __mul__(self, other):
        return mul(self, other)

    __rmul__ = __mul__

    def __neg__(self):
        return mul(self, -1.0)

    def __matmul__(self, other):
        return matmul(self, other)

    def __getitem__(self, idx):
        return take(self, idx)

    def reshape(self, *shape):
        return reshape(self, shape)

    def transpose_last2(self):
        return transpose_last2(self)

    def pad_last(self, before, after):
        return pad_last(self, before, after)

    def sum(self):
        return tsum(self)


def _as_tensor(x):
    return x if isinstance(x, Tensor) else Tensor(np.asarray(x, np.float32))


def _unbroadcast(grad, shape):
    """Sum `grad` down to `shape` (reverse of numpy broadcasting)."""
    extra = grad.ndim - len(shape)
    if extra:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, s in enumerate(shape) if s == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad.astype(np.float32)


# ---------------------------------------------------------------------------
# elementwise / shape ops
# ---------------------------------------------------------------------------

def add(a: Tensor, b: Tensor) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    out = Tensor(a.data + b.data)

    def backward(g):
        if a.requires_grad:
            a.grad += _unbroadcast(g, a.shape)
        if b.requires_grad:
            b.grad += _unbroadcast(g, b.shape)

    return out._record((a, b), backward)


def mul(a: Tensor, b) -> Tensor:
    if isinstance(b, (int, float, np.floating)):
        s = float(b)
        out = Tensor(a.data * np.float32(s))

        def backward(g):
            if a.requires_grad:
                a.grad += (g * np.float32(s))

        return out._record((a,), backward)

    b = _as_tensor(b)
    out = Tensor(a.data * b.data)

    def backward(g):
        if a.requires_grad:
            a.grad += _unbroadcast(g * b.data, a.shape)
        if b.requires_grad:
            b.grad += _unbroadcast(g * a.data, b.shape)

    return out._record((a, b), backward)


def scale_mask(a: Tensor, mask: np.ndarray) -> Tensor:
    """Multiply by a constant (non-differentiated) mask; used by dropout."""
    m = mask.astype(np.float32)
    out = Tensor(a.data * m)

    def backward(g):
        if a.requires_grad:
            a.grad += g * m

    return out._record((a,), backward)


def reshape(a: Tensor, shape) -> Tensor:
    out = Tensor(a.data.reshape(shape))

    def backward(g):
        if a.requires_grad:
            a.grad += g.reshape(a.shape)

    return out._record((a,), backward)


def transpose_last2(a: Tensor) -> Tensor:
    out = Tensor(np.swapaxes(a.data, -1, -2))

    def backward(g):
        if a.requires_grad:
            a.grad += np.swapaxes(g, -1, -2)

    return out._record((a,), backward)


def pad_last(a: Tensor, before: int, after: int) -> Tensor:
    width = [(0, 0)] * (a.ndim - 1) + [(before, after)]
    out = Tensor(np.pad(a.data, width))

    def backward(g):
        if a.requires_grad:
            sl = (slice(None),) * (a.ndim - 1) + (slice(before, before + a.shape[-1]),)
            a.grad += g[sl]

    return out._record((a,), backward)


def take(a: Tensor, idx) -> Tensor:
    """Basic (view-style) indexing with gradient scatter-add."""
    out = Tensor(a.data[idx])

    def backward(g):
        if a.requires_grad:
            np.add.at(a.grad, idx, g)

    return out._record((a,), backward)


def stack(tensors, axis: int = 0) -> Tensor:
    tensors = [_as_tensor(t) for t in tensors]
    out = Tensor(np.stack([t.data for t in tensors], axis=axis))

    def backward(g):
        parts = np.moveaxis(g, axis, 0)
        for t, gp in zip(tensors, parts):
            if t.requires_grad:
                t.grad += gp

    return out._record(tuple(tensors), backward)


def tsum(a: Tensor) -> Tensor:
    out = Tensor(np.float32(a.data.sum(dtype=np.float64)))

    def backward(g):
        if a.requires_grad:
            a.grad += np.float32(g)

    return out._record((a,), backward)


def relu(a: Tensor) -> Tensor:
    out = Tensor(np.maximum(a.data, 0.0))

    def backward(g):
        if a.requires_grad:
            a.grad += g * (a.data > 0)

    return out._record((a,), backward)


def dropout(a: Tensor, p: float, training: bool, rng: np.random.Generator) -> Tensor:
    """Inverted dropout: zero with probability p, scale survivors by 1/(1-p)."""
    if not 0.0 <= p < 1.0:
        raise ContractError(f"dropout probability must be in [0, 1), got {p}")
    if not training or p == 0.0:
        return a
    keep = (rng.random(a.shape) >= p).astype(np.float32) / np.float32(1.0 - p)
    return scale_mask(a, keep)


# ---------------------------------------------------------------------------
# matmul and convolution
# ---------------------------------------------------------------------------

def matmul(a: Tensor, b: Tensor) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise DimensionError(f"matmul shapes {a.shape} x {b.shape}")
    out = Tensor((a.data.astype(np.float64) @ b.data.astype(np.float64)).astype(np.float32))

    def backward(g):
        g64 = g.astype(np.float64)
        if a.requires_grad:
            a.grad += (g64 @ b.data.astype(np.float64).T).astype(np.float32)
        if b.requires_grad:
            b.grad += (a.data.astype(np.float64).T @ g64).astype(np.float32)

    return out._record((a, b), backward)


def xcorr2d_valid(x: Tensor, f: Tensor) -> Tensor:
    """Valid-mode cross-correlation (no kernel flip), summed over C_in.

    ``x`` is ``(C_in, H, W)`` or batched ``(B, C_in, H, W)``; ``f`` is
    ``(C_out, C_in, kH, kW)``.  Output drops the batch axis iff the input
    had none.
    """
    x, f = _as_tensor(x), _as_tensor(f)
    unbatched = x.ndim == 3
    xb = reshape(x, (1,) + x.shape) if unbatched else x
    if xb.ndim != 4 or f.ndim != 4:
        raise DimensionError(f"xcorr2d_valid shapes {x.shape}, {f.shape}")
    b, ci, h, w = xb.shape
    co, fci, kh, kw = f.shape
    if fci != ci:
        raise DimensionError(f"channel mismatch: input {ci}, filters {fci}")
    if kh > h or kw > w:
        raise DimensionError(f"kernel {kh}x{kw} larger than input {h}x{w}")

    out = Tensor(kernels.xcorr2d_forward(xb.data, f.data))

    def backward(g):
        g = np.ascontiguousarray(g)
        if xb.requires_grad:
            xb.grad += kernels.xcorr2d_backward_input(g, f.data)
        if f.requires_grad:
            f.grad += kernels.xcorr2d_backward_filters(g, xb.data, kh, kw)

    out._record((xb, f), backward)
    return reshape(out, out.shape[1:]) if unbatched else out


# ---------------------------------------------------------------------------
# softmax + categorical cross-entropy
# ---------------------------------------------------------------------------

def softmax(logits: np.ndarray) -> np.ndarray:
    """Row softmax in float64 with max subtraction (plain array helper)."""
    z = np.asarray(logits, np.float64)
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def softmax_xent(logits: Tensor, labels: np.ndarray) -> Tensor:
    """Mean categorical cross-entropy of row-softmaxed logits.

    ``labels`` is a constant one-hot (B, K) array; each row must sum to 1.
    Gradient wrt logits is (softmax - labels) / B.
    """
    logits = _as_tensor(logits)
    y = np.asarray(labels, np.float64)
    if logits.ndim != 2 or y.shape != logits.shape:
        raise DimensionError(f"softmax_xent shapes {logits.shape} vs {y.shape}")
    if not np.allclose(y.sum(axis=1), 1.0, atol=1e-6):
        raise ContractError("each label row must sum to 1")

    z = logits.data.astype(np.float64)
    zmax = z.max(axis=1, keepdims=True)
    logsum = np.log(np.exp(z - zmax).sum(axis=1, keepdims=True)) + zmax
    logp = z - logsum
    bsz = z.shape[0]
    loss = -(y * logp).sum() / bsz
    out = Tensor(np.float32(loss))

    def backward(g):
        if logits.requires_grad:
            grad = (np.exp(logp) - y) / bsz
            logits.grad += (float(np.asarray(g).reshape(-1)[0]) * grad).astype(np.float32)

    return out._record((logits,), backward)
