"""Discretization of the bandwidth signal and its abstraction error.

The continuous signal is point-sampled at a fixed rate over a time window;
the relative volume mismatch between the zero-order-hold reconstruction and
the continuous signal quantifies how faithful the discretization is.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .trace import BandwidthSignal

#: |sampling_error| beyond this value indicates the signal was under-sampled
#: and the analysis should not be trusted.
BAD_SAMPLING_THRESHOLD = 0.01


class SamplingQualityWarning(UserWarning):
    """Raised as a warning when the abstraction error flags bad sampling."""


class NoVolumeError(ValueError):
    """The window contains no I/O volume, so the error ratio is undefined."""


def snap_floor(x: float) -> int:
    """floor() that forgives values a hair below an integer (float products)."""
    n = math.floor(x)
    if x - n > 1.0 - 1e-9:
        n += 1
    return n


def _snap_floor_array(x: np.ndarray) -> np.ndarray:
    n = np.floor(x)
    n += (x - n) > (1.0 - 1e-9)
    return n.astype(np.int64)


@dataclass(frozen=True)
class SampledSignal:
    """Evenly spaced bandwidth samples: samples[n] taken at t0 + n*ts."""

    t0: float
    ts: float
    samples: np.ndarray

    def __post_init__(self):
        samples = np.ascontiguousarray(self.samples, dtype=np.float64)
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        if self.ts <= 0:
            raise ValueError("sampling interval must be positive")

    @property
    def fs(self) -> float:
        return 1.0 / self.ts

    @property
    def n(self) -> int:
        return self.samples.shape[0]

    @property
    def duration(self) -> float:
        """Length of the covered window, n*ts."""
        return self.n * self.ts

    @property
    def times(self) -> np.ndarray:
        return self.t0 + np.arange(self.n) * self.ts


def discretize(
    signal: BandwidthSignal,
    fs: float,
    window: tuple[float, float] | None = None,
    mode: str = "point",
) -> SampledSignal:
    """Sample the signal at rate fs over the window (default: signal domain).

    ``mode="point"`` takes the instantaneous value at each sample instant
    (right-limit at breakpoints).  ``mode="mean"`` instead averages the
    signal over each sampling bin, which preserves volume exactly.
    Windows extending beyond the signal domain sample zeros there.
    """
    if fs <= 0:
        raise ValueError("sampling frequency must be positive")
    t_lo, t_hi = window if window is not None else signal.domain
    if t_hi <= t_lo:
        raise ValueError("empty sampling window")
    n = snap_floor((t_hi - t_lo) * fs)
    if n < 1:
        raise ValueError("window shorter than one sampling interval")
    ts = 1.0 / fs
    if mode == "point":
        samples = signal.value_at(t_lo + np.arange(n) * ts)
    elif mode == "mean":
        edges = t_lo + np.arange(n + 1) * ts
        left = np.maximum(signal.times[:-1][:, None], edges[None, :-1])
        right = np.minimum(signal.times[1:][:, None], edges[None, 1:])
        overlap = np.maximum(right - left, 0.0)
        samples = (signal.values @ overlap) * fs
    else:
        raise ValueError(f"unknown sampling mode {mode!r}")
    return SampledSignal(t0=float(t_lo), ts=ts, samples=samples)


def sampling_error(signal: BandwidthSignal, sampled: SampledSignal) -> float:
    """Relative volume mismatch (V_s - V_0) / V_0 of the discretization.

    V_s is the zero-order-hold volume of the samples and V_0 the exact
    integral of the continuous signal over the covered window.
    """
    v_s = sampled.ts * float(sampled.samples.sum())
    v_0 = signal.integral(sampled.t0, sampled.t0 + sampled.duration)
    if v_0 == 0.0:
        raise NoVolumeError("no I/O volume in the sampled window")
    return (v_s - v_0) / v_0
