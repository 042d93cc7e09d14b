import numpy as np
import pytest

from cplxnet.errors import ConfigError, DimensionError
from cplxnet.siggen import (MOD_NAMES, SNR_GRID, ChannelConfig, ModScheme,
                            apply_channel, euler_components, generate_dataset,
                            matched_filter_demod, modulate, modulate_symbols)


class TestEuler:
    def test_zero_phase(self):
        iq = euler_components(np.ones(8), np.zeros(8))
        assert np.allclose(iq[:, 0], 1) and np.allclose(iq[:, 1], 0)

    def test_quarter_turn(self):
        iq = euler_components(np.ones(4), np.full(4, np.pi / 2))
        assert np.abs(iq[:, 0]).max() < 1e-12 and np.allclose(iq[:, 1], 1)

    def test_pythagorean_identity(self):
        rng = np.random.default_rng(0)
        a = rng.uniform(0, 3, 200)
        phi = rng.uniform(-10, 10, 200)
        iq = euler_components(a, phi)
        assert np.abs(iq[:, 0] ** 2 + iq[:, 1] ** 2 - a ** 2).max() < 1e-6

    def test_length_mismatch(self):
        with pytest.raises(DimensionError):
            euler_components(np.ones(3), np.ones(4))


class TestSchemes:
    def test_eleven_schemes_eight_digital(self):
        assert len(MOD_NAMES) == 11
        kinds = [ModScheme(n).kind for n in MOD_NAMES]
        assert kinds.count("digital") == 8 and kinds.count("analog") == 3

    def test_alphabetical_order(self):
        assert list(MOD_NAMES) == sorted(MOD_NAMES)

    def test_unknown_scheme(self):
        with pytest.raises(ConfigError):
            ModScheme("OFDM")


class TestModulate:
    def test_bpsk_loopback(self):
        rng = np.random.default_rng(1)
        wave, syms, _ = modulate_symbols(ModScheme("BPSK"), rng, 2048)
        n_sym = 2048 // 8
        y = matched_filter_demod(wave, n_sym)
        bits_out = (y.real > 0).astype(int)
        bits_in = (syms[:n_sym].real > 0).astype(int)
        assert np.array_equal(bits_out, bits_in)

    def test_qpsk_constellation_snap(self):
        rng = np.random.default_rng(2)
        wave, syms, _ = modulate_symbols(ModScheme("QPSK"), rng, 2048)
        n_sym = 2048 // 8
        y = matched_filter_demod(wave, n_sym)
        # the matched filter has no signal history at the frame edges, so
        # compare the interior symbols, renormalized over the same slice
        skip = 32
        y = y[skip:n_sym - skip]
        y = y / np.sqrt(np.mean(np.abs(y) ** 2))
        ref = syms[skip:n_sym - skip]
        assert np.abs(y - ref).max() < 1e-3

    @pytest.mark.parametrize("name", MOD_NAMES)
    def test_unit_average_power(self, name):
        rng = np.random.default_rng(3)
        wave = modulate(ModScheme(name), rng, 10_000)
        power = np.mean(np.abs(wave) ** 2)
        assert abs(power - 1.0) < 0.01


class TestChannel:
    def test_clean_channel_identity(self):
        rng = np.random.default_rng(4)
        x = rng.normal(size=32) + 1j * rng.normal(size=32)
        out = apply_channel(x, ChannelConfig(snr_db=np.inf), rng)
        assert np.abs(out - x).max() < 1e-12

    def test_phase_pi_flips_sign(self):
        rng = np.random.default_rng(5)
        x = rng.normal(size=32) + 1j * rng.normal(size=32)
        out = apply_channel(x, ChannelConfig(snr_db=np.inf, initial_phase=np.pi), rng)
        assert np.abs(out + x).max() < 1e-12

    def test_zero_db_noise_power(self):
        rng = np.random.default_rng(6)
        n = 100_000
        x = np.exp(1j * rng.uniform(0, 2 * np.pi, n))  # unit power
        out = apply_channel(x, ChannelConfig(snr_db=0.0), rng)
        noise_power = np.mean(np.abs(out - x) ** 2)
        assert abs(noise_power - 1.0) < 0.05


class TestDataset:
    def test_counts(self):
        ds = generate_dataset(1, seed=0)
        assert len(ds) == 11 * 20
        assert ds.samples.shape == (220, 2, 128)

    def test_cell_balance_and_shapes(self, tiny_dataset):
        ds = tiny_dataset
        assert len(ds) == 2 * 11 * 20
        for mod in range(11):
            for snr in SNR_GRID:
                assert np.sum((ds.labels == mod) & (ds.snrs == snr)) == 2

    def test_determinism(self):
        a = generate_dataset(1, seed=9)
        b = generate_dataset(1, seed=9)
        assert np.array_equal(a.samples, b.samples)
        assert np.array_equal(a.labels, b.labels)

    def test_high_snr_rms_sane(self, tiny_dataset):
        ds = tiny_dataset
        mask = ds.snrs >= 10
        rms = np.sqrt(np.mean(ds.samples[mask] ** 2, axis=(1, 2)))
        assert rms.min() >= 0.5 and rms.max() <= 2.0

    def test_bad_count(self):
        with pytest.raises(ConfigError):
            generate_dataset(0, seed=0)
