"""Hot inner kernels for valid-mode 2-D cross-correlation.

Two interchangeable backends compute the same forward and backward maps:

* ``numba``  -- JIT-compiled loops with float64 accumulators and the width
  axis vectorized (default when numba is importable).
* ``numpy``  -- pure-numpy im2col + float64 BLAS matmul fallback.

Select with the environment variable ``CPLX_BACKEND`` (``numba`` or
``numpy``), read once at import time.  ``benchmarks/bench_kernels.py``
times both on the layer shapes used by the models.

All kernels take float32 arrays and return float32; accumulation happens
in float64 either way, so the backends agree to float32 rounding.
"""

from __future__ import annotations

import os

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import ConfigError

__all__ = [
    "active_backend",
    "xcorr2d_forward",
    "xcorr2d_backward_input",
    "xcorr2d_backward_filters",
]


# ---------------------------------------------------------------------------
# numpy fallback (im2col + BLAS)
# ---------------------------------------------------------------------------

def _np_forward(x: np.ndarray, f: np.ndarray) -> np.ndarray:
    b, ci, h, w = x.shape
    co, _, kh, kw = f.shape
    patches = sliding_window_view(x, (kh, kw), axis=(2, 3))
    ho, wo = patches.shape[2], patches.shape[3]
    cols = patches.transpose(0, 2, 3, 1, 4, 5).reshape(b * ho * wo, ci * kh * kw)
    out = cols.astype(np.float64) @ f.reshape(co, -1).T.astype(np.float64)
    return np.ascontiguousarray(
        out.reshape(b, ho, wo, co).transpose(0, 3, 1, 2)
    ).astype(np.float32)


def _np_backward_filters(g: np.ndarray, x: np.ndarray, kh: int, kw: int) -> np.ndarray:
    b, co, ho, wo = g.shape
    ci = x.shape[1]
    patches = sliding_window_view(x, (kh, kw), axis=(2, 3))
    cols = patches.transpose(0, 2, 3, 1, 4, 5).reshape(b * ho * wo, ci * kh * kw)
    grows = g.transpose(0, 2, 3, 1).reshape(b * ho * wo, co)
    gf = grows.T.astype(np.float64) @ cols.astype(np.float64)
    return gf.reshape(co, ci, kh, kw).astype(np.float32)


def _np_backward_input(g: np.ndarray, f: np.ndarray) -> np.ndarray:
    # grad wrt the input of a cross-correlation == full-mode correlation of
    # the output grad with the spatially flipped filters, channels swapped.
    co, ci, kh, kw = f.shape
    gpad = np.pad(g, ((0, 0), (0, 0), (kh - 1, kh - 1), (kw - 1, kw - 1)))
    fswap = np.ascontiguousarray(f[:, :, ::-1, ::-1].transpose(1, 0, 2, 3))
    return _np_forward(gpad, fswap)


# ---------------------------------------------------------------------------
# numba backend
# ---------------------------------------------------------------------------

def _build_numba():
    from numba import njit

    @njit(cache=True, fastmath=True)
    def nb_forward(x, f, out):
        b, ci, h, w = x.shape
        co, _, kh, kw = f.shape
        ho = h - kh + 1
        wo = w - kw + 1
        for n in range(b):
            for o in range(co):
                for i in range(ho):
                    acc = np.zeros(wo, np.float64)
                    for c in range(ci):
                        for u in range(kh):
                            row = x[n, c, i + u]
                            for v in range(kw):
                                t = np.float64(f[o, c, u, v])
                                for j in range(wo):
                                    acc[j] += t * row[j + v]
                    for j in range(wo):
                        out[n, o, i, j] = acc[j]

    @njit(cache=True, fastmath=True)
    def nb_backward_filters(g, x, gf):
        b, co, ho, wo = g.shape
        ci = x.shape[1]
        kh = gf.shape[2]
        kw = gf.shape[3]
        for o in range(co):
            for c in range(ci):
                for u in range(kh):
                    for v in range(kw):
                        acc = 0.0
                        for n in range(b):
                            for i in range(ho):
                                grow = g[n, o, i]
                                xrow = x[n, c, i + u]
                                for j in range(wo):
                                    acc += grow[j] * xrow[j + v]
                        gf[o, c, u, v] = acc

    @njit(cache=True, fastmath=True)
    def nb_backward_input(g, f, gx):
        b, co, ho, wo = g.shape
        ci = f.shape[1]
        kh = f.shape[2]
        kw = f.shape[3]
        for n in range(b):
            for o in range(co):
                for i in range(ho):
                    grow = g[n, o, i]
                    for c in range(ci):
                        for u in range(kh):
                            xrow = gx[n, c, i + u]
                            for v in range(kw):
                                t = f[o, c, u, v]
                                for j in range(wo):
                                    xrow[j + v] += t * grow[j]

    def forward(x, f):
        b, ci, h, w = x.shape
        co, _, kh, kw = f.shape
        out = np.empty((b, co, h - kh + 1, w - kw + 1), np.float32)
        nb_forward(x, f, out)
        return out

    def backward_filters(g, x, kh, kw):
        co = g.shape[1]
        ci = x.shape[1]
        gf = np.empty((co, ci, kh, kw), np.float64)
        nb_backward_filters(g, x, gf)
        return gf.astype(np.float32)

    def backward_input(g, f):
        b = g.shape[0]
        ci = f.shape[1]
        h = g.shape[2] + f.shape[2] - 1
        w = g.shape[3] + f.shape[3] - 1
        gx = np.zeros((b, ci, h, w), np.float64)
        nb_backward_input(g, f, gx)
        return gx.astype(np.float32)

    return forward, backward_input, backward_filters


_requested = os.environ.get("CPLX_BACKEND", "numba").lower()
if _requested not in ("numba", "numpy"):
    raise ConfigError(f"CPLX_BACKEND must be 'numba' or 'numpy', got {_requested!r}")

_backend = _requested
if _backend == "numba":
    try:
        xcorr2d_forward, xcorr2d_backward_input, xcorr2d_backward_filters = _build_numba()
    except ImportError:
        _backend = "numpy"

if _backend == "numpy":
    xcorr2d_forward = _np_forward
    xcorr2d_backward_input = _np_backward_input
    xcorr2d_backward_filters = _np_backward_filters


def active_backend() -> str:
    """Name of the backend selected at import time."""
    return _backend


def numpy_kernels():
    """The pure-numpy kernel triple, regardless of the active backend."""
    return _np_forward, _np_backward_input, _np_backward_filters


def numba_kernels():
    """The numba kernel triple; raises ImportError when numba is missing."""
    return _build_numba()
