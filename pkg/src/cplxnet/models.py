"""The three architectures: CNN2, CNN2-257 and Complex.

CNN2 (the classic two-conv baseline):
    conv(256 filters, 1x3) -> ReLU -> dropout ->
    conv(80 filters, 2x3)  -> ReLU -> dropout ->
    dense(256) -> ReLU -> dropout -> dense(11)

CNN2-257 widens the first dense layer to 257.  Complex swaps the first
conv for a complex-convolution layer of 256 three-tap complex filters,
whose (I, Q) recombined output feeds the identical CNN2 tail.  With these
widths CNN2-257 carries ~0.3% more parameters than Complex, which sits
just above CNN2 (exact counts from :func:`param_count`).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from . import tensor as T
from .errors import ConfigError, DimensionError, FormatError
from .nn import ComplexConv, Conv2D, Dense
from .tensor import Tensor

__all__ = ["ModelSpec", "Model", "spec_for", "build", "param_count", "ARCH_NAMES"]

ARCH_NAMES = ("CNN2", "CNN2-257", "Complex")

_CKPT_MAGIC = b"CPLX"
_CKPT_VERSION = 1


@dataclass(frozen=True)
class ModelSpec:
    name: str
    dense1: int
    complex_first: bool
    conv1_filters: int = 256
    conv1_kernel: tuple = (1, 3)
    complex_taps: int = 3
    conv2_filters: int = 80
    conv2_kernel: tuple = (2, 3)
    num_classes: int = 11
    input_shape: tuple = (2, 128)
    dropout: float = 0.5

    @property
    def flat_size(self) -> int:
        h, w = self.input_shape
        w1 = w - self.conv1_kernel[1] + 1 if not self.complex_first else w - self.complex_taps + 1
        w2 = w1 - self.conv2_kernel[1] + 1
        return self.conv2_filters * w2


def spec_for(name: str) -> ModelSpec:
    if name == "CNN2":
        return ModelSpec(name, dense1=256, complex_first=False)
    if name == "CNN2-257":
        return ModelSpec(name, dense1=257, complex_first=False)
    if name == "Complex":
        return ModelSpec(name, dense1=256, complex_first=True)
    raise ConfigError(f"unknown architecture {name!r}; expected one of {ARCH_NAMES}")


def param_count(spec: ModelSpec) -> int:
    """Exact trainable parameter count (weights + biases), from the spec alone."""
    if spec.complex_first:
        conv1 = spec.conv1_filters * spec.complex_taps * 2 + spec.conv1_filters * 2
    else:
        kh, kw = spec.conv1_kernel
        conv1 = spec.conv1_filters * kh * kw + spec.conv1_filters
    kh, kw = spec.conv2_kernel
    conv2 = spec.conv2_filters * spec.conv1_filters * kh * kw + spec.conv2_filters
    d1 = spec.flat_size * spec.dense1 + spec.dense1
    d2 = spec.dense1 * spec.num_classes + spec.num_classes
    return conv1 + conv2 + d1 + d2


class Model:
    def __init__(self, spec: ModelSpec, seed: int):
        self.spec = spec
        self.seed = seed
        rng = np.random.default_rng(seed)
        if spec.complex_first:
            self.conv1 = ComplexConv(spec.conv1_filters, spec.complex_taps, rng)
        else:
            self.conv1 = Conv2D(spec.conv1_filters, 1, spec.conv1_kernel, rng)
        self.conv2 = Conv2D(spec.conv2_filters, spec.conv1_filters, spec.conv2_kernel, rng)
        self.dense1 = Dense(spec.flat_size, spec.dense1, rng)
        self.dense2 = Dense(spec.dense1, spec.num_classes, rng)
        self._drop_rng = np.random.default_rng(np.random.SeedSequence([seed, 0xD0]))

    def params(self):
        return (
            self.conv1.params() + self.conv2.params()
            + self.dense1.params() + self.dense2.params()
        )

    def num_params(self) -> int:
        return sum(p.size for p in self.params())

    def forward(self, x, training: bool = False) -> Tensor:
        """(B, 2, 128) batch -> (B, 11) logits."""
        if not isinstance(x, Tensor):
            x = Tensor(x)
        if x.ndim != 3 or x.shape[1:] != self.spec.input_shape:
            raise DimensionError(
                f"expected (B, {self.spec.input_shape[0]}, {self.spec.input_shape[1]}), got {x.shape}"
            )
        b = x.shape[0]
        p = self.spec.dropout
        if self.spec.complex_first:
            h = self.conv1(x)                                  # (B, 256, 2, 126)
        else:
            h = self.conv1(T.reshape(x, (b, 1, *self.spec.input_shape)))
        h = T.dropout(T.relu(h), p, training, self._drop_rng)
        h = T.dropout(T.relu(self.conv2(h)), p, training, self._drop_rng)
        h = T.reshape(h, (b, self.spec.flat_size))
        h = T.dropout(T.relu(self.dense1(h)), p, training, self._drop_rng)
        return self.dense2(h)

    def predict(self, x: np.ndarray, batch_size: int = 1024) -> np.ndarray:
        """Class ids for an (n, 2, 128) array, evaluated without a tape."""
        out = np.empty(x.shape[0], np.int64)
        with T.no_grad():
            for s in range(0, x.shape[0], batch_size):
                logits = self.forward(Tensor(x[s:s + batch_size]), training=False)
                out[s:s + batch_size] = logits.data.argmax(axis=1)
        return out

    # -- checkpoint io ----------------------------------------------------
    def save(self, path):
        with open(path, "wb") as fh:
            fh.write(_CKPT_MAGIC)
            fh.write(struct.pack("<I", _CKPT_VERSION))
            name = self.spec.name.encode()
            fh.write(struct.pack("<H", len(name)))
            fh.write(name)
            fh.write(struct.pack("<Q", self.seed))
            params = self.params()
            fh.write(struct.pack("<I", len(params)))
            for p in params:
                fh.write(struct.pack("<B", p.ndim))
                fh.write(struct.pack(f"<{p.ndim}I", *p.shape))
                fh.write(p.data.astype("<f4").tobytes())

    @classmethod
    def load(cls, path) -> "Model":
        with open(path, "rb") as fh:
            magic = fh.read(4)
            if magic != _CKPT_MAGIC:
                raise FormatError(f"bad checkpoint magic {magic!r} at offset 0")
            (version,) = struct.unpack("<I", fh.read(4))
            if version != _CKPT_VERSION:
                raise FormatError(f"unsupported checkpoint version {version}")
            (nlen,) = struct.unpack("<H", fh.read(2))
            name = fh.read(nlen).decode()
            (seed,) = struct.unpack("<Q", fh.read(8))
            model = cls(spec_for(name), seed)
            (nparams,) = struct.unpack("<I", fh.read(4))
            params = model.params()
            if nparams != len(params):
                raise FormatError(
                    f"checkpoint holds {nparams} parameter blobs, spec needs {len(params)}"
                )
            for p in params:
                (ndim,) = struct.unpack("<B", fh.read(1))
                shape = struct.unpack(f"<{ndim}I", fh.read(4 * ndim))
                if shape != p.shape:
                    raise FormatError(f"parameter shape {shape} != expected {p.shape}")
                raw = fh.read(4 * int(np.prod(shape)))
                if len(raw) != 4 * int(np.prod(shape)):
                    raise FormatError("truncated checkpoint payload")
                p.data[...] = np.frombuffer(raw, "<f4").reshape(shape)
        return model


def build(spec_or_name, seed: int = 0) -> Model:
    """Instantiate an initialized model; deterministic for a given seed."""
    spec = spec_for(spec_or_name) if isinstance(spec_or_name, str) else spec_or_name
    if spec.name not in ARCH_NAMES:
        raise ConfigError(f"unknown architecture {spec.name!r}")
    return Model(spec, seed)
