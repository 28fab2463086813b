"""MFCC baseline: sliding Hanning-windowed frames over voiced regions.

Pipeline per frame: Hanning window -> zero-padded 512-point power spectrum ->
26 triangular mel filters spanning 0..sr/2 -> floored log energies -> DCT-II
-> 13 cepstral coefficients (c0..c12 by default).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .corpus import VoicedRegion
from .dsp import dft, hanning
from .psdct import KIND_MFCC, FeatureVector, dct2


@dataclass(frozen=True)
class MfccConfig:
    frame_ms: float = 20.0
    shift_ms: float = 10.0
    n_fft: int = 512
    n_filters: int = 26
    log_floor: float = 1e-10
    n_coeffs: int = 13
    use_c0: bool = True  # False selects c1..c13 instead of c0..c12


def hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


@lru_cache(maxsize=None)
def mel_filterbank(sample_rate: int, n_fft: int, n_filters: int) -> np.ndarray:
    """Triangular filters on the mel scale, (n_filters, n_fft//2 + 1).

    Continuous triangles evaluated at the bin frequencies: overlapping
    neighbors sum to exactly 1 between the first and last centers.
    """
    n_bins = n_fft // 2 + 1
    bin_hz = np.arange(n_bins) * (sample_rate / n_fft)
    edges_hz = mel_to_hz(np.linspace(0.0, float(hz_to_mel(sample_rate / 2.0)), n_filters + 2))
    fb = np.zeros((n_filters, n_bins))
    for i in range(n_filters):
        left, center, right = edges_hz[i], edges_hz[i + 1], edges_hz[i + 2]
        rising = (bin_hz - left) / (center - left)
        falling = (right - bin_hz) / (right - center)
        fb[i] = np.clip(np.minimum(rising, falling), 0.0, None)
    return fb


def frame_length(sample_rate: int, frame_ms: float = 20.0) -> int:
    return int(round(frame_ms * sample_rate / 1000.0))


def frame_signal(region: VoicedRegion, frame_ms: float = 20.0, shift_ms: float = 10.0) -> np.ndarray:
    """Slice a region into full frames; a trailing partial frame is dropped."""
    flen = frame_length(region.sample_rate, frame_ms)
    shift = int(round(shift_ms * region.sample_rate / 1000.0))
    x = region.samples
    if x.size < flen:
        return np.empty((0, flen))
    offsets = range(0, x.size - flen + 1, shift)
    return np.stack([x[o : o + flen] for o in offsets])


def mfcc_feature(frame, sample_rate: int, config: MfccConfig = MfccConfig()) -> FeatureVector:
    """Cepstral coefficients of one frame of exactly frame_ms samples."""
    x = np.asarray(frame, dtype=np.float64)
    expected = frame_length(sample_rate, config.frame_ms)
    if x.size != expected:
        raise ValueError(f"frame of {x.size} samples, expected {expected}")
    spectrum = dft(x * hanning(x.size), n=config.n_fft)
    power = np.abs(spectrum[: config.n_fft // 2 + 1]) ** 2
    energies = mel_filterbank(sample_rate, config.n_fft, config.n_filters) @ power
    log_energies = np.log(np.maximum(energies, config.log_floor))
    coeffs = dct2(log_energies)
    if config.use_c0:
        values = coeffs[: config.n_coeffs]
    else:
        values = coeffs[1 : config.n_coeffs + 1]
    return FeatureVector(values.copy(), KIND_MFCC)


def mfcc_features_for_region(region: VoicedRegion, config: MfccConfig = MfccConfig()) -> list[FeatureVector]:
    frames = frame_signal(region, config.frame_ms, config.shift_ms)
    return [mfcc_feature(frame, region.sample_rate, config) for frame in frames]
