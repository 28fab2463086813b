"""Truncated DCT features of unit-energy pitch cycles, plus retained-energy stats.

A cycle is normalized to unit energy and transformed with the orthonormal
DCT-II; the first coefficient (the frame mean) is dropped and the next K kept.
No pre-emphasis and no shaping window: the frames already start and end on
waveform peaks, matching the transform's basis endpoints.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .gci import PitchCycle

KIND_PSDCT = "psdct"
KIND_MFCC = "mfcc"

DEFAULT_NUM_COEFFS = 15


@dataclass(frozen=True, eq=False)
class FeatureVector:
    """Fixed-dimension real feature vector tagged with its feature kind."""

    values: np.ndarray
    kind: str

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=np.float64))
        if self.values.ndim != 1 or self.values.size == 0:
            raise ValueError("feature values must be a non-empty 1-D vector")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("feature values must be finite")

    @property
    def dim(self) -> int:
        return self.values.size


@lru_cache(maxsize=None)
def _dct_basis(m: int) -> np.ndarray:
    # rows: c[k] = s(k) * sum_n x[n] cos(pi*(2n+1)*k / 2M), s(0)=sqrt(1/M), s(k)=sqrt(2/M)
    n = np.arange(m)
    basis = np.cos(np.pi * (2.0 * n[None, :] + 1.0) * n[:, None] / (2.0 * m))
    basis *= np.sqrt(2.0 / m)
    basis[0] *= np.sqrt(0.5)
    return basis


def dct2(frame) -> np.ndarray:
    """Orthonormal DCT-II; Parseval holds (sum c^2 = sum x^2)."""
    x = np.asarray(frame, dtype=np.float64)
    if x.size == 0:
        raise ValueError("empty frame")
    return _dct_basis(x.size) @ x


def normalize_energy(frame) -> np.ndarray:
    """Scale a frame to unit energy. Zero-energy frames are a caller bug."""
    x = np.asarray(frame, dtype=np.float64)
    energy = float(np.dot(x, x))
    if energy <= 0.0:
        raise ValueError("zero-energy frame; caller must filter these out")
    return x / np.sqrt(energy)


def psdct_feature(cycle: PitchCycle, n_coeffs: int = DEFAULT_NUM_COEFFS) -> FeatureVector:
    """Coefficients 1..K of the unit-energy cycle's DCT (index 0 dropped)."""
    m = len(cycle)
    if m <= n_coeffs:
        raise ValueError(f"cycle of {m} samples too short for {n_coeffs} coefficients")
    coeffs = dct2(normalize_energy(cycle.samples))
    return FeatureVector(coeffs[1 : n_coeffs + 1].copy(), KIND_PSDCT)


def mec(cycles: list[PitchCycle], n_coeffs: int, include_dc: bool = True) -> float:
    """Mean fraction of cycle energy captured by coefficients 1..K.

    The denominator is the full unit-energy frame's coefficient energy
    (= 1 by Parseval, computed explicitly); with include_dc=False the mean
    coefficient is excluded from the denominator as well.
    """
    if not cycles:
        raise ValueError("empty cycle list")
    ratios = []
    for cycle in cycles:
        m = len(cycle)
        if m <= n_coeffs:
            raise ValueError(f"cycle of {m} samples too short for {n_coeffs} coefficients")
        c2 = dct2(normalize_energy(cycle.samples)) ** 2
        denom = float(np.sum(c2)) if include_dc else float(np.sum(c2[1:]))
        ratios.append(float(np.sum(c2[1 : n_coeffs + 1])) / denom)
    return float(np.mean(ratios))
