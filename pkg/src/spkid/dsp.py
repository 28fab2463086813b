"""Shared numeric kernels: DFT, Hanning window, autocorrelation pitch, resonators."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.signal


def dft(x, n: int | None = None) -> np.ndarray:
    """Complex spectrum of a sequence, optionally zero padded to length n."""
    x = np.asarray(x)
    if x.size == 0:
        raise ValueError("dft of an empty sequence")
    return np.fft.fft(x, n=n)


def hanning(m: int) -> np.ndarray:
    """Hanning window w[n] = 0.5 - 0.5*cos(2*pi*n/(M-1))."""
    if m < 1:
        raise ValueError("window length must be >= 1")
    return np.hanning(m)


def autocorr_pitch(x, min_period: int, max_period: int) -> int:
    """Lag of the autocorrelation maximum within [min_period, max_period].

    The search range is clipped to the available lags; raises if the
    signal is too short to cover min_period.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.size == 0:
        raise ValueError("empty signal")
    if min_period < 1 or max_period < min_period:
        raise ValueError(f"invalid period range [{min_period}, {max_period}]")
    hi = min(max_period, x.size - 1)
    if min_period > hi:
        raise ValueError(f"signal of length {x.size} too short for lag {min_period}")
    nfft = 1 << int(np.ceil(np.log2(2 * x.size)))
    spectrum = np.fft.rfft(x, nfft)
    r = np.fft.irfft(spectrum * np.conj(spectrum), nfft)[: x.size]
    return int(np.argmax(r[min_period : hi + 1])) + min_period


def moving_average(x, win: int) -> np.ndarray:
    """Centered moving average with edge correction (divide by actual overlap)."""
    x = np.asarray(x, dtype=np.float64)
    if win < 1:
        raise ValueError("window must be >= 1")
    if x.size == 0:
        raise ValueError("empty signal")
    kernel = np.ones(win)
    sums = np.convolve(x, kernel, mode="same")
    counts = np.convolve(np.ones(x.size), kernel, mode="same")
    return sums / counts


@dataclass(frozen=True)
class ResonatorCoeffs:
    """Two-pole resonator y[n] = gain*x[n] + b1*y[n-1] + b2*y[n-2]."""

    center_hz: float
    bandwidth_hz: float
    sample_rate: int
    b1: float
    b2: float
    gain: float

    @property
    def pole_radius(self) -> float:
        return math.sqrt(-self.b2)


def resonator(center_hz: float, bandwidth_hz: float, sample_rate: int) -> ResonatorCoeffs:
    """Stable two-pole resonator with unity DC gain (pole radius < 1)."""
    if bandwidth_hz <= 0:
        raise ValueError("bandwidth must be positive for a stable resonator")
    if sample_rate <= 0:
        raise ValueError("sample_rate must be positive")
    r = math.exp(-math.pi * bandwidth_hz / sample_rate)
    theta = 2.0 * math.pi * center_hz / sample_rate
    b1 = 2.0 * r * math.cos(theta)
    b2 = -r * r
    gain = 1.0 - b1 - b2
    return ResonatorCoeffs(center_hz, bandwidth_hz, sample_rate, b1, b2, gain)


def zero_frequency_resonator(sample_rate: int) -> ResonatorCoeffs:
    # Radius-1 integrator pair at 0 Hz; only ever used followed by trend removal.
    return ResonatorCoeffs(0.0, 0.0, sample_rate, b1=2.0, b2=-1.0, gain=1.0)


def resonate(x, coeffs: ResonatorCoeffs) -> np.ndarray:
    """Run a signal through a two-pole resonator (zero initial state)."""
    x = np.asarray(x, dtype=np.float64)
    if x.size == 0:
        raise ValueError("empty signal")
    return scipy.signal.lfilter([coeffs.gain], [1.0, -coeffs.b1, -coeffs.b2], x)
