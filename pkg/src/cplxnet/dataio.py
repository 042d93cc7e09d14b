"""IQDS dataset container and SNR-stratified splitting.

File layout (all little-endian):

    magic  "IQDS"
    u32    version (1)
    u64    frame_count
    u16    mod_count, then per mod: u16 name_len + utf-8 bytes
    u16    snr_count, then snr_count x i16 snr values (dB)
    frames: per frame  u16 mod_id, i16 snr_db,
            128 interleaved (I, Q) float32 pairs (1024 bytes)

Write then read is byte-identical; parse errors name the byte offset.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, FormatError

__all__ = ["Dataset", "SplitSpec", "write_iqds", "read_iqds", "split",
           "original_split", "exp1_split", "exp2_split", "PARADIGMS"]

_MAGIC = b"IQDS"
_VERSION = 1
_FRAME_DTYPE = np.dtype([("mod", "<u2"), ("snr", "<i2"), ("iq", "<f4", (256,))])


@dataclass
class Dataset:
    samples: np.ndarray        # (n, 2, 128) float32
    labels: np.ndarray         # (n,) uint16 indices into mod_names
    snrs: np.ndarray           # (n,) int16 dB
    mod_names: tuple
    snr_values: tuple

    def __post_init__(self):
        self.samples = np.ascontiguousarray(self.samples, np.float32)
        self.labels = np.asarray(self.labels, np.uint16)
        self.snrs = np.asarray(self.snrs, np.int16)
        self.mod_names = tuple(self.mod_names)
        self.snr_values = tuple(int(s) for s in self.snr_values)
        if self.samples.ndim != 3 or self.samples.shape[1:] != (2, 128):
            raise FormatError(f"samples must be (n, 2, 128), got {self.samples.shape}")

    def __len__(self):
        return self.samples.shape[0]

    def subset(self, idx) -> "Dataset":
        return Dataset(self.samples[idx], self.labels[idx], self.snrs[idx],
                       self.mod_names, self.snr_values)


def write_iqds(ds: Dataset, path):
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<I", _VERSION))
        fh.write(struct.pack("<Q", len(ds)))
        fh.write(struct.pack("<H", len(ds.mod_names)))
        for name in ds.mod_names:
            b = name.encode()
            fh.write(struct.pack("<H", len(b)))
            fh.write(b)
        fh.write(struct.pack("<H", len(ds.snr_values)))
        fh.write(struct.pack(f"<{len(ds.snr_values)}h", *ds.snr_values))
        rec = np.empty(len(ds), _FRAME_DTYPE)
        rec["mod"] = ds.labels
        rec["snr"] = ds.snrs
        rec["iq"] = ds.samples.transpose(0, 2, 1).reshape(len(ds), 256)
        rec.tofile(fh)


def _need(fh, n, what):
    buf = fh.read(n)
    if len(buf) != n:
        raise FormatError(f"truncated file reading {what} at offset {fh.tell() - len(buf)}")
    return buf


def read_iqds(path) -> Dataset:
    with open(path, "rb") as fh:
        magic = _need(fh, 4, "magic")
        if magic != _MAGIC:
            raise FormatError(f"bad magic {magic!r} at offset 0")
        (version,) = struct.unpack("<I", _need(fh, 4, "version"))
        if version != _VERSION:
            raise FormatError(f"unsupported version {version} at offset 4")
        (count,) = struct.unpack("<Q", _need(fh, 8, "frame count"))
        (n_mod,) = struct.unpack("<H", _need(fh, 2, "mod count"))
        mod_names = []
        for _ in range(n_mod):
            (ln,) = struct.unpack("<H", _need(fh, 2, "name length"))
            mod_names.append(_need(fh, ln, "mod name").decode())
        (n_snr,) = struct.unpack("<H", _need(fh, 2, "snr count"))
        snr_values = struct.unpack(f"<{n_snr}h", _need(fh, 2 * n_snr, "snr table"))
        payload = _need(fh, count * _FRAME_DTYPE.itemsize, "frame records")
        if fh.read(1):
            raise FormatError(f"trailing bytes after {count} frames at offset {fh.tell() - 1}")
    rec = np.frombuffer(payload, _FRAME_DTYPE)
    if rec["mod"].size and rec["mod"].max() >= n_mod:
        raise FormatError(f"mod id {rec['mod'].max()} outside name table of {n_mod}")
    if rec["snr"].size and not np.isin(rec["snr"], snr_values).all():
        raise FormatError("frame snr value missing from header snr table")
    samples = rec["iq"].reshape(count, 128, 2).transpose(0, 2, 1)
    return Dataset(samples, rec["mod"], rec["snr"], tuple(mod_names), snr_values)


# ---------------------------------------------------------------------------
# splits
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SplitSpec:
    train_snrs: tuple
    test_snrs: tuple
    fraction: float | None   # within-cell train fraction, None = by SNR only
    seed: int = 0


def original_split(seed: int = 0) -> SplitSpec:
    return SplitSpec(tuple(range(-20, 20, 2)), tuple(range(-20, 20, 2)), 0.5, seed)


def exp1_split(seed: int = 0) -> SplitSpec:
    return SplitSpec(tuple(range(-20, 0, 2)), tuple(range(0, 20, 2)), None, seed)


def exp2_split(seed: int = 0) -> SplitSpec:
    return SplitSpec(tuple(range(0, 20, 2)), tuple(range(-20, 0, 2)), None, seed)


PARADIGMS = {"original": original_split, "exp1": exp1_split, "exp2": exp2_split}


def split(ds: Dataset, spec: SplitSpec):
    """(train, test) datasets; deterministic in ``spec.seed``, disjoint frames."""
    present = set(int(s) for s in np.unique(ds.snrs))
    for s in set(spec.train_snrs) | set(spec.test_snrs):
        if s not in present:
            raise ConfigError(f"requested SNR {s} dB absent from dataset")
    rng = np.random.default_rng(spec.seed)
    if spec.fraction is None:
        train_idx = np.flatnonzero(np.isin(ds.snrs, spec.train_snrs))
        test_idx = np.flatnonzero(np.isin(ds.snrs, spec.test_snrs))
        train_idx = rng.permutation(train_idx)
        test_idx = rng.permutation(test_idx)
    else:
        train_parts, test_parts = [], []
        for mod in range(len(ds.mod_names)):
            for snr in spec.train_snrs:
                cell = np.flatnonzero((ds.labels == mod) & (ds.snrs == snr))
                cell = rng.permutation(cell)
                k = int(round(len(cell) * spec.fraction))
                train_parts.append(cell[:k])
                test_parts.append(cell[k:])
        train_idx = rng.permutation(np.concatenate(train_parts))
        test_idx = rng.permutation(np.concatenate(test_parts))
    if len(train_idx) == 0 or len(test_idx) == 0:
        raise ConfigError(
            f"split left an empty side (train {len(train_idx)}, test {len(test_idx)}); "
            "the dataset is too small for this paradigm"
        )
    return ds.subset(train_idx), ds.subset(test_idx)
