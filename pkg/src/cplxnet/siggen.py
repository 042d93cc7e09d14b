"""Synthetic I/Q modulation dataset generator.

Eleven schemes (8 digital, 3 analog) across an SNR grid of -20..18 dB in
2 dB steps, frames of 128 complex samples with random initial phase,
carrier frequency offset and sample-clock offset, plus complex AWGN.

This approximates the semantics of the classic open 2x128 modulation
corpus; it does not reproduce its GNU-Radio channel (no fading, synthetic
multi-tone audio instead of speech).  Adequate for trend-level training
experiments, not waveform-accurate replication.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DimensionError

__all__ = [
    "MOD_NAMES",
    "SNR_GRID",
    "ModScheme",
    "ChannelConfig",
    "euler_components",
    "modulate",
    "modulate_symbols",
    "matched_filter_demod",
    "apply_channel",
    "generate_dataset",
    "rrc_taps",
]

# alphabetical; shared with the dataset container so class ids agree
MOD_NAMES = (
    "8PSK", "AM-DSB", "AM-SSB", "BPSK", "CPFSK", "GFSK",
    "PAM4", "QAM16", "QAM64", "QPSK", "WBFM",
)
SNR_GRID = tuple(range(-20, 20, 2))

SPS = 8                 # samples per symbol
RRC_BETA = 0.35
RRC_SPAN = 32           # symbols each side; long enough for <1e-3 residual ISI
FRAME_LEN = 128
_GEN_MARGIN = 16        # extra samples so clock resampling can interpolate


def _unit_energy(points: np.ndarray) -> np.ndarray:
    return points / np.sqrt(np.mean(np.abs(points) ** 2))


_PSK8 = _unit_energy(np.exp(1j * (2 * np.pi * np.arange(8) / 8 + np.pi / 8)))
_BPSK = np.array([-1.0 + 0j, 1.0 + 0j])
_QPSK = _unit_energy(np.array([1 + 1j, -1 + 1j, -1 - 1j, 1 - 1j]))
_PAM4 = _unit_energy(np.array([-3.0, -1.0, 1.0, 3.0], dtype=complex))
_QAM16 = _unit_energy(np.array([a + 1j * b for a in (-3, -1, 1, 3) for b in (-3, -1, 1, 3)]))
_QAM64 = _unit_energy(
    np.array([a + 1j * b for a in range(-7, 8, 2) for b in range(-7, 8, 2)])
)

_CONSTELLATIONS = {
    "8PSK": _PSK8,
    "BPSK": _BPSK,
    "PAM4": _PAM4,
    "QAM16": _QAM16,
    "QAM64": _QAM64,
    "QPSK": _QPSK,
}

_ANALOG = ("AM-DSB", "AM-SSB", "WBFM")


@dataclass(frozen=True)
class ModScheme:
    name: str

    def __post_init__(self):
        if self.name not in MOD_NAMES:
            raise ConfigError(f"unknown modulation {self.name!r}")

    @property
    def kind(self) -> str:
        return "analog" if self.name in _ANALOG else "digital"

    @property
    def index(self) -> int:
        return MOD_NAMES.index(self.name)


@dataclass(frozen=True)
class ChannelConfig:
    snr_db: float           # may be +inf to disable noise
    initial_phase: float = 0.0
    cfo: float = 0.0        # cycles per sample
    clock_offset_ppm: float = 0.0

    @classmethod
    def sample(cls, snr_db: float, rng: np.random.Generator) -> "ChannelConfig":
        return cls(
            snr_db=snr_db,
            initial_phase=rng.uniform(0.0, 2 * np.pi),
            cfo=rng.uniform(-1e-3, 1e-3),
            clock_offset_ppm=rng.uniform(-50.0, 50.0),
        )


def euler_components(a: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """Amplitude/phase series -> (N, 2) I/Q array: I = a cos(phi), Q = a sin(phi)."""
    a = np.asarray(a, np.float64)
    phi = np.asarray(phi, np.float64)
    if a.shape != phi.shape:
        raise DimensionError(f"amplitude {a.shape} vs phase {phi.shape}")
    return np.stack([a * np.cos(phi), a * np.sin(phi)], axis=-1)


def rrc_taps(sps: int = SPS, span: int = RRC_SPAN, beta: float = RRC_BETA) -> np.ndarray:
    """Root-raised-cosine impulse response, unit energy."""
    t = np.arange(-span * sps, span * sps + 1, dtype=np.float64) / sps
    taps = np.empty_like(t)
    for i, ti in enumerate(t):
        if abs(ti) < 1e-12:
            taps[i] = 1.0 - beta + 4 * beta / np.pi
        elif abs(abs(ti) - 1.0 / (4 * beta)) < 1e-9:
            taps[i] = (beta / np.sqrt(2)) * (
                (1 + 2 / np.pi) * np.sin(np.pi / (4 * beta))
                + (1 - 2 / np.pi) * np.cos(np.pi / (4 * beta))
            )
        else:
            num = np.sin(np.pi * ti * (1 - beta)) + 4 * beta * ti * np.cos(np.pi * ti * (1 + beta))
            den = np.pi * ti * (1 - (4 * beta * ti) ** 2)
            taps[i] = num / den
    return taps / np.sqrt(np.sum(taps ** 2))


def _gaussian_pulse(sps: int, bt: float = 0.3, span: int = 2) -> np.ndarray:
    # Gaussian frequency pulse used by GFSK, normalized to unit area
    t = np.arange(-span * sps, span * sps + 1, dtype=np.float64) / sps
    sigma = np.sqrt(np.log(2)) / (2 * np.pi * bt)
    g = np.exp(-(t ** 2) / (2 * sigma ** 2))
    return g / g.sum()


def _audio_source(n: int, rng: np.random.Generator) -> np.ndarray:
    """Synthetic multi-tone 'speech': three random sinusoids, unit RMS."""
    freqs = rng.uniform(0.005, 0.04, size=3)
    phases = rng.uniform(0, 2 * np.pi, size=3)
    amps = rng.uniform(0.5, 1.0, size=3)
    t = np.arange(n)
    x = np.sum(amps[:, None] * np.cos(2 * np.pi * freqs[:, None] * t + phases[:, None]), axis=0)
    return x / np.sqrt(np.mean(x ** 2))


def _upsample(symbols: np.ndarray, sps: int) -> np.ndarray:
    up = np.zeros(len(symbols) * sps, dtype=complex)
    up[::sps] = symbols
    return up


def modulate_symbols(scheme: ModScheme, rng: np.random.Generator, n_out: int,
                     sps: int = SPS):
    """Like :func:`modulate` but also returns demod metadata.

    Returns ``(wave, symbols, scale)`` where ``wave[k*sps]`` is the symbol
    instant of ``symbols[k]`` (linear schemes) and ``scale`` is the factor
    the unit-power normalization applied to the shaped waveform.
    Only linear digital schemes carry symbols; others return ``None``.
    """
    name = scheme.name
    if name in _CONSTELLATIONS:
        const = _CONSTELLATIONS[name]
        n_sym = int(np.ceil(n_out / sps)) + 4 * RRC_SPAN
        syms = const[rng.integers(0, len(const), size=n_sym)]
        shaped = np.convolve(_upsample(syms, sps), rrc_taps(sps))
        delay = RRC_SPAN * sps
        start_sym = RRC_SPAN          # skip edge transient
        start = delay + start_sym * sps
        wave = shaped[start:start + n_out]
        scale = 1.0 / np.sqrt(np.mean(np.abs(wave) ** 2))
        return wave * scale, syms[start_sym:], scale

    if name in ("CPFSK", "GFSK"):
        h_index = 0.5
        n_sym = int(np.ceil(n_out / sps)) + 8
        nrz = 2.0 * rng.integers(0, 2, size=n_sym) - 1.0
        freq = np.repeat(nrz, sps)
        if name == "GFSK":
            g = _gaussian_pulse(sps)
            freq = np.convolve(freq, g)[len(g) // 2: len(g) // 2 + len(freq)]
        phase = np.pi * h_index * np.cumsum(freq) / sps
        wave = np.exp(1j * phase)[2 * sps:2 * sps + n_out]
        return wave, None, 1.0

    audio = _audio_source(n_out + 64, rng)
    if name == "AM-DSB":
        x = (1.0 + 0.5 * audio[:n_out]).astype(complex)
    elif name == "AM-SSB":
        x = _analytic(audio)[:n_out]
    else:  # WBFM
        kf = 0.05  # cycles/sample peak-ish deviation
        phase = 2 * np.pi * kf * np.cumsum(audio)
        x = np.exp(1j * phase)[:n_out]
    scale = 1.0 / np.sqrt(np.mean(np.abs(x) ** 2))
    return x * scale, None, scale


def _analytic(x: np.ndarray) -> np.ndarray:
    """FFT-based analytic signal (real input -> x + j*Hilbert(x))."""
    n = len(x)
    spec = np.fft.fft(x)
    h = np.zeros(n)
    h[0] = 1.0
    if n % 2 == 0:
        h[n // 2] = 1.0
        h[1:n // 2] = 2.0
    else:
        h[1:(n + 1) // 2] = 2.0
    return np.fft.ifft(spec * h)


def modulate(scheme: ModScheme, rng: np.random.Generator, n_out: int = FRAME_LEN,
             sps: int = SPS) -> np.ndarray:
    """Unit-average-power complex baseband waveform of ``n_out`` samples."""
    wave, _, _ = modulate_symbols(scheme, rng, n_out, sps)
    return wave


def matched_filter_demod(wave: np.ndarray, n_sym: int, sps: int = SPS) -> np.ndarray:
    """Matched-filter + symbol-instant decimation for linear schemes.

    Assumes ``wave[k*sps]`` are the symbol instants (the alignment
    :func:`modulate_symbols` produces).  Output is rescaled to unit average
    symbol energy so it can be compared against the constellations.
    """
    taps = rrc_taps(sps)
    delay = (len(taps) - 1) // 2
    mf = np.convolve(wave, taps)
    y = mf[delay:delay + n_sym * sps:sps]
    return y / np.sqrt(np.mean(np.abs(y) ** 2))


def apply_channel(x: np.ndarray, cfg: ChannelConfig, rng: np.random.Generator) -> np.ndarray:
    """Clock-offset resample, CFO mix, phase rotation, then AWGN at the SNR."""
    out = np.asarray(x, dtype=complex)
    if cfg.clock_offset_ppm:
        r = 1.0 + cfg.clock_offset_ppm * 1e-6
        t = np.arange(len(out)) * r
        t = t[t <= len(out) - 1]
        out = np.interp(t, np.arange(len(out)), out.real) + 1j * np.interp(
            t, np.arange(len(out)), out.imag
        )
    n = np.arange(len(out))
    out = out * np.exp(1j * (2 * np.pi * cfg.cfo * n + cfg.initial_phase))
    if np.isfinite(cfg.snr_db):
        p_sig = np.mean(np.abs(out) ** 2)
        p_noise = p_sig * 10.0 ** (-cfg.snr_db / 10.0)
        noise = np.sqrt(p_noise / 2.0) * (
            rng.standard_normal(len(out)) + 1j * rng.standard_normal(len(out))
        )
        out = out + noise
    return out


def _frame_rng(seed: int, mod_i: int, snr_i: int, k: int) -> np.random.Generator:
    # per-frame derived stream: parallel and serial generation agree
    return np.random.default_rng(np.random.SeedSequence([seed, mod_i, snr_i, k]))


def generate_frame(scheme: ModScheme, snr_db: float, rng: np.random.Generator) -> np.ndarray:
    """One (2, 128) float32 frame: I row then Q row."""
    wave = modulate(scheme, rng, FRAME_LEN + _GEN_MARGIN)
    cfg = ChannelConfig.sample(snr_db, rng)
    rx = apply_channel(wave, cfg, rng)[:FRAME_LEN]
    return np.stack([rx.real, rx.imag]).astype(np.float32)


def generate_dataset(per_class_per_snr: int, seed: int):
    """count x 11 x 20 labeled frames, reproducible from ``seed``."""
    from .dataio import Dataset  # local import to avoid a cycle

    if per_class_per_snr < 1:
        raise ConfigError("per_class_per_snr must be >= 1")
    n = per_class_per_snr * len(MOD_NAMES) * len(SNR_GRID)
    samples = np.empty((n, 2, FRAME_LEN), np.float32)
    labels = np.empty(n, np.uint16)
    snrs = np.empty(n, np.int16)
    i = 0
    for mod_i, name in enumerate(MOD_NAMES):
        scheme = ModScheme(name)
        for snr_i, snr in enumerate(SNR_GRID):
            for k in range(per_class_per_snr):
                rng = _frame_rng(seed, mod_i, snr_i, k)
                samples[i] = generate_frame(scheme, snr, rng)
                labels[i] = mod_i
                snrs[i] = snr
                i += 1
    return Dataset(samples, labels, snrs, MOD_NAMES, SNR_GRID)
