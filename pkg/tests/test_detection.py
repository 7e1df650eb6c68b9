"""Z-score outlier filtering, harmonic suppression, and confidence classes."""
import numpy as np
import pytest

from oracles import population_std

from ioperiod import (
    Candidate,
    CandidateSet,
    Confidence,
    DegenerateSpectrumError,
    Spectrum,
    classify,
    detect,
    find_candidates,
    suppress_harmonics,
    zscores,
)


def make_spectrum(adjusted, fs=1.0, n=None):
    """Hand-built single-sided spectrum from adjusted amplitudes (k=0 first)."""
    adjusted = np.asarray(adjusted, dtype=np.float64)
    if n is None:
        n = 2 * (adjusted.shape[0] - 1)
    k = np.arange(adjusted.shape[0], dtype=np.float64)
    return Spectrum(
        fs=fs, n=n, t0=0.0,
        frequencies=k * fs / n,
        amplitudes=adjusted / 2.0,
        phases=np.zeros_like(adjusted),
        adjusted_amplitudes=adjusted,
    )


def cand(f, amp, k=1, z=5.0):
    return Candidate(k=k, frequency=f, amplitude=amp, zscore=z)


def cset(*entries):
    return CandidateSet(entries=tuple(entries), mean_amplitude=1.0, std_amplitude=1.0)


class TestZscores:
    def test_hand_computed_vector(self):
        # non-DC amplitudes [0, 0, 0, 10]: mean 2.5, population std 4.33
        spec = make_spectrum([99.0, 0.0, 0.0, 0.0, 10.0])
        zset = zscores(spec)
        z = [c.zscore for c in zset.entries]
        assert z[:3] == pytest.approx([-0.577, -0.577, -0.577], abs=5e-4)
        assert z[3] == pytest.approx(1.732, abs=5e-4)
        assert zset.std_amplitude == pytest.approx(population_std([0, 0, 0, 10]))

    def test_dc_bin_excluded(self):
        spec = make_spectrum([1e9, 1.0, 2.0, 3.0, 4.0])
        zset = zscores(spec)
        assert zset.mean_amplitude == pytest.approx(2.5)

    def test_degenerate_spectrum(self):
        with pytest.raises(DegenerateSpectrumError):
            zscores(make_spectrum([5.0, 2.0, 2.0, 2.0, 2.0]))

    def test_uses_population_std(self, rng):
        amps = rng.uniform(0, 10, 9)
        spec = make_spectrum(np.concatenate([[0.0], amps]))
        zset = zscores(spec)
        assert zset.std_amplitude == pytest.approx(population_std(amps))


class TestFindCandidates:
    def test_unique_outlier(self):
        zset = cset(
            cand(0.1, 1.0, k=1, z=1.0), cand(0.2, 1.0, k=2, z=1.0),
            cand(0.3, 5.0, k=3, z=5.0), cand(0.4, 1.0, k=4, z=1.0),
        )
        kept = find_candidates(zset, spectrum_n=10)
        assert [c.k for c in kept.entries] == [3]

    def test_z_min_gate(self):
        # the relative tolerance alone would keep the max, but z < 3 drops it
        zset = cset(cand(0.1, 1.0, k=1, z=2.9), cand(0.2, 0.5, k=2, z=1.0))
        kept = find_candidates(zset, spectrum_n=10)
        assert len(kept) == 0

    def test_tolerance_band_keeps_near_max(self):
        zset = cset(
            cand(0.1, 1.0, k=1, z=10.0), cand(0.2, 0.9, k=2, z=8.5),
            cand(0.3, 0.5, k=3, z=7.0),
        )
        kept = find_candidates(zset, spectrum_n=10, tolerance=0.8)
        assert [c.k for c in kept.entries] == [1, 2]

    def test_nyquist_bin_excluded_from_max(self):
        # n=8: bin 4 is the Nyquist bin; its large z must not set the bar
        zset = cset(
            cand(0.1, 1.0, k=1, z=4.0), cand(0.2, 1.0, k=2, z=1.0),
            cand(0.3, 1.0, k=3, z=1.0), cand(0.4, 9.0, k=4, z=9.0),
        )
        kept = find_candidates(zset, spectrum_n=8)
        assert [c.k for c in kept.entries] == [1, 4]


class TestSuppressHarmonics:
    def test_single_octave(self):
        kept, suppressed = suppress_harmonics(
            cset(cand(0.01, 2.0, k=1), cand(0.02, 1.0, k=2)), bin_width=0.001)
        assert kept.frequencies() == (0.01,)
        assert suppressed == (0.02,)

    def test_singleton_unchanged(self):
        kept, suppressed = suppress_harmonics(
            cset(cand(0.09, 1.0, k=7)), bin_width=0.001)
        assert kept.frequencies() == (0.09,)
        assert suppressed == ()

    def test_full_chain_collapses(self):
        kept, suppressed = suppress_harmonics(
            cset(cand(0.01, 3.0, k=1), cand(0.02, 2.0, k=2), cand(0.04, 1.0, k=4)),
            bin_width=0.001)
        assert kept.frequencies() == (0.01,)
        assert suppressed == (0.02, 0.04)

    def test_non_power_of_two_multiple_survives(self):
        kept, suppressed = suppress_harmonics(
            cset(cand(0.01, 2.0, k=1), cand(0.03, 1.0, k=3)), bin_width=0.001)
        assert kept.frequencies() == (0.01, 0.03)
        assert suppressed == ()

    def test_tolerance_is_half_bin(self):
        bw = 0.01
        near = 0.02 + 0.4 * bw     # within half a bin of 2x
        far = 0.02 + 0.6 * bw      # outside
        kept, suppressed = suppress_harmonics(
            cset(cand(0.01, 2.0, k=1), cand(near, 1.0, k=2)), bin_width=bw)
        assert suppressed == (near,)
        kept, suppressed = suppress_harmonics(
            cset(cand(0.01, 2.0, k=1), cand(far, 1.0, k=2)), bin_width=bw)
        assert suppressed == ()


class TestClassify:
    def test_single_candidate_high(self):
        result = classify(cset(cand(0.09, 1.0, k=7)))
        assert result.confidence == Confidence.HIGH
        assert result.frequency == pytest.approx(0.09)
        assert result.period == pytest.approx(1 / 0.09)

    def test_two_candidates_moderate_amplitude_wins(self):
        # two close peaks: the stronger, lower one gives a period of 8.29 s
        result = classify(cset(cand(0.1206, 5.0, k=201), cand(0.1326, 4.0, k=221)))
        assert result.confidence == Confidence.MODERATE
        assert result.frequency == pytest.approx(0.1206)
        assert result.period == pytest.approx(8.29, abs=0.005)

    def test_two_candidates_distant_peaks(self):
        result = classify(cset(cand(1 / 25.73, 7.0, k=2), cand(0.16, 3.0, k=9)))
        assert result.confidence == Confidence.MODERATE
        assert result.period == pytest.approx(25.73, abs=0.005)

    def test_amplitude_tie_breaks_to_lower_frequency(self):
        result = classify(cset(cand(0.1, 5.0, k=1), cand(0.3, 5.0, k=3)))
        assert result.frequency == pytest.approx(0.1)

    def test_three_candidates_low_no_frequency(self):
        result = classify(cset(cand(0.1, 1.0, k=1), cand(0.2, 1.0, k=2),
                               cand(0.3, 1.0, k=3)))
        assert result.confidence == Confidence.LOW
        assert result.frequency is None
        assert result.period is None

    def test_zero_candidates(self):
        result = classify(cset())
        assert result.confidence == Confidence.NO_CANDIDATE
        assert result.frequency is None


class TestDetect:
    def test_full_chain_on_spectrum(self):
        # one strong bin plus its octave: harmonic suppressed, High
        adjusted = np.full(51, 0.1)
        adjusted[0] = 40.0
        adjusted[5] = 10.0
        adjusted[10] = 9.0
        spec = make_spectrum(adjusted, fs=1.0, n=100)
        result = detect(spec)
        assert result.confidence == Confidence.HIGH
        assert result.frequency == pytest.approx(spec.frequencies[5])
        assert result.suppressed_harmonics == (pytest.approx(spec.frequencies[10]),)

    def test_degenerate_spectrum_no_candidate(self):
        spec = make_spectrum(np.full(9, 2.0))
        result = detect(spec)
        assert result.confidence == Confidence.NO_CANDIDATE

    def test_result_serialization(self):
        adjusted = np.full(51, 0.1)
        adjusted[5] = 10.0
        spec = make_spectrum(adjusted, fs=1.0, n=100)
        out = detect(spec).to_dict(amplitude_scale=2.0)
        assert out["confidence"] == "high"
        assert out["candidates"][0]["amplitude"] == pytest.approx(20.0)
