"""Complex cross-correlation via one real 2-D cross-correlation.

An I/Q sequence is an Nx2 array (I column, Q column).  Sliding an Mx2
complex-filter kernel across both axes of that array, the way a
real-valued framework computes a 'convolution', produces a three-column
array:

    [ I*h' | I*h'' + Q*h' | Q*h'' ]

where ``*`` is valid-mode cross-correlation.  Subtracting the third column
from the first yields the real part of the true complex cross-correlation,
while the middle column is its imaginary part:

    (I*h' - Q*h'') + j (I*h'' + Q*h')

:func:`complex_oracle` computes the same quantity with direct complex
arithmetic and serves as the independent verifier.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import tensor as T
from .errors import DimensionError
from .tensor import Tensor

__all__ = [
    "IqSequence",
    "ComplexFilter",
    "three_column_xcorr",
    "complex_xcorr",
    "complex_oracle",
]


@dataclass(frozen=True)
class IqSequence:
    """N pairs (I_n, Q_n); ``values`` has shape (N, 2)."""

    values: np.ndarray

    def __post_init__(self):
        v = np.ascontiguousarray(self.values, np.float32)
        if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 1:
            raise DimensionError(f"IqSequence needs shape (N, 2), got {v.shape}")
        object.__setattr__(self, "values", v)

    @classmethod
    def from_complex(cls, z: np.ndarray) -> "IqSequence":
        z = np.asarray(z)
        return cls(np.stack([z.real, z.imag], axis=-1))

    def to_complex(self) -> np.ndarray:
        return self.values[:, 0].astype(np.float64) + 1j * self.values[:, 1].astype(np.float64)

    def __len__(self):
        return self.values.shape[0]


@dataclass(frozen=True)
class ComplexFilter:
    """M complex taps stored as (h'_m, h''_m) pairs; ``taps`` has shape (M, 2)."""

    taps: np.ndarray

    def __post_init__(self):
        t = np.ascontiguousarray(self.taps, np.float32)
        if t.ndim != 2 or t.shape[1] != 2 or t.shape[0] < 1:
            raise DimensionError(f"ComplexFilter needs shape (M, 2), got {t.shape}")
        object.__setattr__(self, "taps", t)

    @classmethod
    def from_complex(cls, h: np.ndarray) -> "ComplexFilter":
        h = np.asarray(h)
        return cls(np.stack([h.real, h.imag], axis=-1))

    def to_complex(self) -> np.ndarray:
        return self.taps[:, 0].astype(np.float64) + 1j * self.taps[:, 1].astype(np.float64)

    def __len__(self):
        return self.taps.shape[0]


def _check_lengths(n: int, m: int):
    if m > n:
        raise DimensionError(f"filter length {m} exceeds sequence length {n}")


def three_column_tensor(z: Tensor, h: Tensor) -> Tensor:
    """Differentiable three-column form; ``z`` is (N, 2), ``h`` is (M, 2).

    Realized as one valid 2-D cross-correlation: the Nx2 array is
    zero-padded to Nx4 so the kernel can slide across the width axis, and
    the kernel columns are reversed, which is exactly the alignment a
    framework's sliding window produces for the three overlap positions.
    Returns a (3, N-M+1) tensor with rows [I*h', I*h''+Q*h', Q*h''].
    """
    n, m = z.shape[0], h.shape[0]
    _check_lengths(n, m)
    padded = T.reshape(T.pad_last(z, 1, 1), (1, n, 4))
    kernel = T.reshape(T.stack([h[:, 1], h[:, 0]], axis=1), (1, 1, m, 2))
    cols = T.xcorr2d_valid(padded, kernel)          # (1, N-M+1, 3)
    return T.transpose_last2(T.reshape(cols, (n - m + 1, 3)))


def three_column_xcorr(z: IqSequence, h: ComplexFilter) -> Tensor:
    """Three-column real cross-correlation of an I/Q sequence with a filter."""
    return three_column_tensor(Tensor(z.values), Tensor(h.taps))


def complex_xcorr_tensor(z: Tensor, h: Tensor) -> Tensor:
    """Differentiable complex cross-correlation; returns (N-M+1, 2)."""
    cols = three_column_tensor(z, h)
    i_out = cols[0] - cols[2]
    q_out = cols[1]
    return T.stack([i_out, q_out], axis=1)


def complex_xcorr(z: IqSequence, h: ComplexFilter) -> IqSequence:
    """Complex cross-correlation computed via the column recombination."""
    out = complex_xcorr_tensor(Tensor(z.values), Tensor(h.taps))
    return IqSequence(out.data)


def complex_oracle(z: IqSequence, h: ComplexFilter) -> IqSequence:
    """Direct complex arithmetic: out_n = sum_m Z_{n+m-1} h_m (no trick)."""
    _check_lengths(len(z), len(h))
    zc = z.to_complex()
    hc = h.to_complex()
    out = np.array([np.sum(zc[n:n + len(h)] * hc) for n in range(len(z) - len(h) + 1)])
    return IqSequence(np.stack([out.real, out.imag], axis=-1))
