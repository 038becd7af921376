"""Recursive silence-frame noise estimate with low-band tracking.

The noise magnitude is refreshed only on frames judged to be silence and is
rescaled on every frame by the ratio of the frame's 0-50 Hz magnitude to the
stored estimate's, so that level changes between silences are followed.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

ALPHA_DENOM_FLOOR = 1e-12


@dataclass(frozen=True)
class NoiseState:
    """Stored noise magnitude from the most recent silence frame."""

    base_magnitude: np.ndarray = field(repr=False)
    last_silence_index: int = 0
    forgetting: float = 0.9
    init_frames: int = 6
    initialized: bool = True

    def __post_init__(self):
        base = np.asarray(self.base_magnitude, dtype=np.float64)
        if np.any(base < 0) or not np.all(np.isfinite(base)):
            raise ValueError("base_magnitude must be finite and non-negative")
        if not 0.0 < self.forgetting < 1.0:
            raise ValueError("forgetting factor must lie in (0, 1)")
        if self.init_frames < 1:
            raise ValueError("init_frames must be >= 1")
        object.__setattr__(self, "base_magnitude", base)


@dataclass(frozen=True)
class LowBand:
    """Speech-free low-frequency band used for the tracking factor."""

    bin_indices: np.ndarray
    hz_low: float = 0.0
    hz_high: float = 50.0

    @classmethod
    def for_fft(cls, fft_size: int, sample_rate: float, hz_high: float = 50.0) -> "LowBand":
        k = np.arange(fft_size // 2 + 1)
        bins = k[k * sample_rate / fft_size <= hz_high]
        return cls(bin_indices=bins, hz_high=hz_high)


def init_noise(initial_spectra, init_frames: int = 6, forgetting: float = 0.9) -> NoiseState:
    """Mean magnitude over the first ``init_frames`` spectra."""
    spectra = np.asarray(initial_spectra)
    if spectra.ndim != 2 or spectra.shape[0] < init_frames:
        raise ValueError("insufficient initialization frames")
    base = np.mean(np.abs(spectra[:init_frames]), axis=0)
    return NoiseState(
        base_magnitude=base,
        last_silence_index=init_frames - 1,
        forgetting=forgetting,
        init_frames=init_frames,
    )


def silence_ratio_db(spectrum, state: NoiseState) -> float:
    """Frame-to-noise energy ratio in dB (``inf`` when the estimate is zero)."""
    num = float(np.sum(np.abs(spectrum) ** 2))
    den = float(np.sum(state.base_magnitude**2))
    if den <= 0.0:
        return np.inf
    if num <= 0.0:
        return -np.inf
    return 10.0 * np.log10(num / den)


def classify_silence(spectrum, state: NoiseState, threshold_db: float = 3.0) -> bool:
    return silence_ratio_db(spectrum, state) < threshold_db


def update_silence_noise(state: NoiseState, spectrum, index: int | None = None) -> NoiseState:
    """Blend a silence frame's magnitude into the stored estimate."""
    nu = state.forgetting
    base = nu * state.base_magnitude + (1.0 - nu) * np.abs(spectrum)
    last = state.last_silence_index + 1 if index is None else index
    return replace(state, base_magnitude=base, last_silence_index=last)


def tracking_factor(spectrum, state: NoiseState, band: LowBand,
                    alpha_min: float = 0.1, alpha_max: float = 10.0) -> float:
    k = band.bin_indices
    den = float(np.sum(state.base_magnitude[k]))
    if den < ALPHA_DENOM_FLOOR:
        return 1.0
    alpha = float(np.sum(np.abs(np.asarray(spectrum)[k]))) / den
    return min(max(alpha, alpha_min), alpha_max)


def current_noise(state: NoiseState, alpha: float) -> np.ndarray:
    return alpha * state.base_magnitude
