"""FFT correctness against a brute-force oracle, spectrum conventions,
and cosine reconstruction."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_dft

from ioperiod import SampledSignal, Spectrum, dft, fft, reconstruct


def _sampled(values, fs=1.0, t0=0.0):
    return SampledSignal(t0=t0, ts=1.0 / fs, samples=np.asarray(values, float))


class TestFft:
    @pytest.mark.parametrize("n", [2, 3, 4, 5, 6, 7, 8, 12, 16, 31, 32, 100, 128])
    def test_matches_oracle(self, n, rng):
        x = rng.normal(size=n)
        got = fft(x)
        want = brute_dft(x)
        scale = max(np.abs(want).max(), 1.0)
        assert np.abs(got - want).max() / scale < 1e-12

    def test_large_prime_factor_length(self, rng):
        # 7605 = 3^2 * 5 * 169: exercises the chirp-z path at real size
        x = rng.normal(size=7605)
        got = fft(x)
        want = brute_dft(x)
        assert np.abs(got - want).max() / np.abs(want).max() < 1e-9

    def test_complex_input(self, rng):
        x = rng.normal(size=24) + 1j * rng.normal(size=24)
        assert np.abs(fft(x) - brute_dft(x)).max() < 1e-9

    def test_trivial_lengths(self):
        assert fft([5.0])[0] == 5.0
        with pytest.raises(ValueError):
            fft([])

    @given(st.integers(2, 64))
    @settings(max_examples=30, deadline=None)
    def test_linearity(self, n):
        rng = np.random.default_rng(n)
        x, y = rng.normal(size=n), rng.normal(size=n)
        a, b = 2.5, -1.25
        assert np.allclose(fft(a * x + b * y), a * fft(x) + b * fft(y), atol=1e-9)

    @given(st.integers(2, 64))
    @settings(max_examples=30, deadline=None)
    def test_conjugate_symmetry_for_real_input(self, n):
        rng = np.random.default_rng(n + 1)
        x = rng.normal(size=n)
        spec = fft(x)
        for k in range(1, n):
            assert spec[n - k] == pytest.approx(np.conj(spec[k]), abs=1e-9)

    @given(st.integers(2, 128))
    @settings(max_examples=40, deadline=None)
    def test_parseval(self, n):
        rng = np.random.default_rng(n + 2)
        x = rng.normal(size=n)
        spec = fft(x)
        time_energy = float(np.sum(x ** 2))
        freq_energy = float(np.sum(np.abs(spec) ** 2)) / n
        assert freq_energy == pytest.approx(time_energy, rel=1e-9)


class TestSpectrum:
    def test_constant_signal_is_dc_only(self):
        c = 3.5
        spec = dft(_sampled([c] * 8))
        assert spec.amplitudes[0] == pytest.approx(8 * c)
        assert np.all(spec.amplitudes[1:] < 1e-9 * 8 * c)

    def test_single_tone(self):
        n = 16
        x = np.cos(2 * np.pi * np.arange(n) / n)
        spec = dft(_sampled(x))
        assert spec.amplitudes[1] == pytest.approx(n / 2)
        others = np.delete(spec.amplitudes[1:], 0)
        assert np.all(others < 1e-9)

    def test_frequency_grid(self):
        spec = dft(_sampled(np.zeros(10), fs=5.0))
        assert np.allclose(spec.frequencies, np.arange(6) * 0.5)
        assert spec.bin_width == pytest.approx(0.5)

    def test_adjusted_amplitudes_even_n(self):
        # interior bins double; DC and the Nyquist bin do not
        rng = np.random.default_rng(0)
        x = rng.normal(size=12)
        spec = dft(_sampled(x))
        assert spec.adjusted_amplitudes[0] == pytest.approx(spec.amplitudes[0])
        assert np.allclose(spec.adjusted_amplitudes[1:6], 2 * spec.amplitudes[1:6])
        assert spec.adjusted_amplitudes[6] == pytest.approx(spec.amplitudes[6])

    def test_adjusted_amplitudes_odd_n(self):
        rng = np.random.default_rng(1)
        x = rng.normal(size=11)
        spec = dft(_sampled(x))
        assert np.allclose(spec.adjusted_amplitudes[1:], 2 * spec.amplitudes[1:])

    def test_needs_two_samples(self):
        with pytest.raises(ValueError):
            dft(_sampled([1.0]))

    def test_csv_export(self, tmp_path):
        spec = dft(_sampled([1.0, 2.0, 3.0, 4.0]))
        path = tmp_path / "spec.csv"
        spec.to_csv(path, amplitude_scale=10.0)
        lines = path.read_text().strip().split("\n")
        assert lines[0] == "k,f_k,amplitude,adjusted_amplitude,phase"
        assert len(lines) == 4  # header + bins 0..2
        first = lines[1].split(",")
        assert float(first[2]) == pytest.approx(spec.amplitudes[0] * 10.0)


class TestReconstruct:
    @pytest.mark.parametrize("n", [2, 3, 8, 17, 50])
    def test_all_bins_round_trip(self, n, rng):
        x = rng.normal(size=n)
        sampled = _sampled(x, fs=2.0, t0=5.0)
        spec = dft(sampled)
        back = reconstruct(spec, np.arange(n // 2 + 1), sampled.times)
        assert np.abs(back - x).max() / max(np.abs(x).max(), 1.0) < 1e-9

    def test_dc_only_gives_mean(self, rng):
        x = rng.normal(size=20)
        sampled = _sampled(x)
        spec = dft(sampled)
        back = reconstruct(spec, [0], sampled.times)
        assert np.allclose(back, x.mean())

    def test_zero_order_hold_between_samples(self):
        x = np.array([0.0, 4.0, 0.0, 4.0])
        sampled = _sampled(x)
        spec = dft(sampled)
        # a time inside a sampling interval snaps to that interval's sample
        mid = reconstruct(spec, np.arange(3), [1.4])
        at_sample = reconstruct(spec, np.arange(3), [1.0])
        assert mid[0] == pytest.approx(at_sample[0])

    def test_top_component_plus_offset(self):
        # dominant-cosine readback: offset bin plus the fundamental of a
        # 7-pulse train spanning 76.05 s at 100 Hz lands at 0.092 Hz
        fs, span, pulses = 100.0, 76.05, 7
        period = span / pulses
        t = np.arange(int(span * fs) + 1) / fs
        x = ((t % period) < 0.2 * period).astype(float)
        sampled = _sampled(x[:7605], fs=fs)
        spec = dft(sampled)
        k_fund = np.argmax(spec.adjusted_amplitudes[1:]) + 1
        assert k_fund == pulses
        assert spec.frequencies[k_fund] == pytest.approx(0.092, abs=5e-4)
        back = reconstruct(spec, [0, k_fund], sampled.times)
        # offset equals the duty cycle, the cosine rides on top of it
        assert back.mean() == pytest.approx(x[:7605].mean(), rel=1e-6)

    def test_out_of_range_bin_rejected(self):
        spec = dft(_sampled([1.0, 2.0, 3.0, 4.0]))
        with pytest.raises(ValueError):
            reconstruct(spec, [3], [0.0])
