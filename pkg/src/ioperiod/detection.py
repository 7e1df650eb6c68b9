"""Dominant-frequency extraction: Z-score outliers, harmonic suppression,
and confidence classification."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from .spectral import Spectrum

DEFAULT_TOLERANCE = 0.8
DEFAULT_Z_MIN = 3.0


class Confidence(str, Enum):
    HIGH = "high"
    MODERATE = "moderate"
    LOW = "low"
    NO_CANDIDATE = "no_candidate"


class DegenerateSpectrumError(ValueError):
    """All non-DC amplitudes are equal; Z-scores are undefined."""


@dataclass(frozen=True)
class Candidate:
    k: int
    frequency: float
    amplitude: float
    zscore: float


@dataclass(frozen=True)
class CandidateSet:
    entries: tuple[Candidate, ...]
    mean_amplitude: float
    std_amplitude: float

    def __len__(self) -> int:
        return len(self.entries)

    def frequencies(self) -> tuple[float, ...]:
        return tuple(c.frequency for c in self.entries)


@dataclass(frozen=True)
class PeriodicityResult:
    """Outcome of the dominant-frequency search on one spectrum."""

    frequency: float | None
    period: float | None
    confidence: Confidence
    candidates: CandidateSet
    suppressed_harmonics: tuple[float, ...] = field(default_factory=tuple)

    def to_dict(self, amplitude_scale: float = 1.0) -> dict:
        return {
            "frequency_hz": self.frequency,
            "period_s": self.period,
            "confidence": self.confidence.value,
            "candidates": [
                {
                    "k": c.k,
                    "frequency_hz": c.frequency,
                    "amplitude": c.amplitude * amplitude_scale,
                    "zscore": c.zscore,
                }
                for c in self.candidates.entries
            ],
            "suppressed": list(self.suppressed_harmonics),
        }


def zscores(spectrum: Spectrum) -> CandidateSet:
    """Z-score every non-DC bin of the single-sided spectrum.

    Uses the mean and population standard deviation of the adjusted
    amplitudes over k in [1, n/2].
    """
    amps = spectrum.adjusted_amplitudes[1:]
    if amps.shape[0] < 2:
        raise ValueError("need at least two non-DC bins")
    mean = float(amps.mean())
    std = float(amps.std())
    if std == 0.0:
        raise DegenerateSpectrumError("all amplitudes equal; no outliers exist")
    z = (amps - mean) / std
    freqs = spectrum.frequencies[1:]
    entries = tuple(
        Candidate(k=k + 1, frequency=float(freqs[k]), amplitude=float(amps[k]),
                  zscore=float(z[k]))
        for k in range(amps.shape[0])
    )
    return CandidateSet(entries=entries, mean_amplitude=mean, std_amplitude=std)


def find_candidates(
    zset: CandidateSet,
    spectrum_n: int,
    tolerance: float = DEFAULT_TOLERANCE,
    z_min: float = DEFAULT_Z_MIN,
) -> CandidateSet:
    """Keep bins whose Z-score is both >= tolerance * max(z) and >= z_min.

    The maximum is taken over k in [1, n/2), i.e. excluding the even-n
    Nyquist bin, matching the filter as defined.
    """
    below_nyquist = [c for c in zset.entries if c.k < spectrum_n / 2]
    pool = below_nyquist or list(zset.entries)
    z_max = max(c.zscore for c in pool)
    cut = tolerance * z_max
    kept = tuple(c for c in zset.entries if c.zscore >= cut and c.zscore >= z_min)
    return CandidateSet(entries=kept, mean_amplitude=zset.mean_amplitude,
                        std_amplitude=zset.std_amplitude)


def suppress_harmonics(
    candidates: CandidateSet, bin_width: float
) -> tuple[CandidateSet, tuple[float, ...]]:
    """Drop candidates that are power-of-two multiples of a surviving one.

    A candidate f_j is a harmonic of a kept f_i when f_j = 2^m * f_i (m >= 1)
    within half a bin width; survivors are the lowest member of each chain.
    """
    tol = bin_width / 2.0
    kept: list[Candidate] = []
    suppressed: list[float] = []
    for c in sorted(candidates.entries, key=lambda c: c.frequency):
        is_harmonic = False
        for base in kept:
            if base.frequency <= 0:
                continue
            mult = 2.0 * base.frequency
            while mult <= c.frequency + tol:
                if abs(c.frequency - mult) <= tol:
                    is_harmonic = True
                    break
                mult *= 2.0
            if is_harmonic:
                break
        if is_harmonic:
            suppressed.append(c.frequency)
        else:
            kept.append(c)
    kept_set = CandidateSet(
        entries=tuple(sorted(kept, key=lambda c: c.k)),
        mean_amplitude=candidates.mean_amplitude,
        std_amplitude=candidates.std_amplitude,
    )
    return kept_set, tuple(suppressed)


def classify(
    candidates: CandidateSet, suppressed: tuple[float, ...] = ()
) -> PeriodicityResult:
    """Map the post-suppression candidate count to a confidence class.

    One candidate is a high-confidence dominant frequency; with two, the
    higher-amplitude one wins (ties break toward the lower frequency, whose
    longer period is the more actionable); three or more mean the signal is
    probably not periodic.
    """
    n = len(candidates)
    if n == 0:
        return PeriodicityResult(None, None, Confidence.NO_CANDIDATE, candidates, suppressed)
    if n == 1:
        f = candidates.entries[0].frequency
        return PeriodicityResult(f, 1.0 / f, Confidence.HIGH, candidates, suppressed)
    if n == 2:
        best = min(candidates.entries, key=lambda c: (-c.amplitude, c.frequency))
        return PeriodicityResult(
            best.frequency, 1.0 / best.frequency, Confidence.MODERATE, candidates, suppressed
        )
    return PeriodicityResult(None, None, Confidence.LOW, candidates, suppressed)


def detect(
    spectrum: Spectrum,
    tolerance: float = DEFAULT_TOLERANCE,
    z_min: float = DEFAULT_Z_MIN,
) -> PeriodicityResult:
    """Full extraction chain: Z-scores, candidate filter, harmonic
    suppression, confidence classification.

    A degenerate spectrum (all amplitudes equal, e.g. a constant signal)
    yields a NO_CANDIDATE result rather than an error.
    """
    try:
        zset = zscores(spectrum)
    except DegenerateSpectrumError:
        empty = CandidateSet(entries=(), mean_amplitude=math.nan, std_amplitude=0.0)
        return PeriodicityResult(None, None, Confidence.NO_CANDIDATE, empty)
    cands = find_candidates(zset, spectrum.n, tolerance=tolerance, z_min=z_min)
    kept, suppressed = suppress_harmonics(cands, spectrum.bin_width)
    return classify(kept, suppressed)
