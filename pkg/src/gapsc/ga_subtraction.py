"""Geometric-approach spectral subtraction gain.

Treating the noisy, clean and noise spectral vectors as a triangle gives

    G^2 = (1 - c_YV^2) / (1 - c_XV^2),
    c_YV = (beta + 1 - sigma) / (2 sqrt(beta)),
    c_XV = (beta - 1 - sigma) / (2 sqrt(sigma)),

with ``beta`` the posterior and ``sigma`` the a priori SNR. Both squared
cosines are kept just below 1 so the ratio never blows up.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

NOISE_POWER_FLOOR = 1e-12
SNR_FLOOR = 1e-12
SIGMA_FLOOR = 1e-6


@dataclass
class GainContext:
    """Gain limits plus the decision-directed memory of the previous frame."""

    smoothing: float = 0.98
    gain_floor: float = 0.05
    gain_cap: float = 1.0
    cos_clamp_eps: float = 1e-6
    prev_gain: np.ndarray | None = field(default=None, repr=False)
    prev_beta: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if not 0.0 <= self.gain_floor <= self.gain_cap:
            raise ValueError("need 0 <= gain_floor <= gain_cap")
        if not 0.0 <= self.smoothing < 1.0:
            raise ValueError("smoothing must lie in [0, 1)")
        if not 0.0 < self.cos_clamp_eps < 1.0:
            raise ValueError("cos_clamp_eps must lie in (0, 1)")

    def remember(self, gain: np.ndarray, beta: np.ndarray) -> None:
        self.prev_gain = np.asarray(gain, dtype=np.float64)
        self.prev_beta = np.asarray(beta, dtype=np.float64)


@dataclass(frozen=True)
class GaParams:
    beta: np.ndarray
    sigma: np.ndarray
    gain: np.ndarray


def posterior_snr(noisy_mag, noise_mag) -> np.ndarray:
    noisy_mag = np.asarray(noisy_mag, dtype=np.float64)
    noise_mag = np.asarray(noise_mag, dtype=np.float64)
    return noisy_mag**2 / np.maximum(noise_mag**2, NOISE_POWER_FLOOR)


def a_priori_snr(beta, ctx: GainContext) -> np.ndarray:
    """Decision-directed a priori SNR; zero memory on the first frame."""
    beta = np.asarray(beta, dtype=np.float64)
    if ctx.prev_gain is None or ctx.prev_beta is None:
        memory = np.zeros_like(beta)
    else:
        memory = ctx.prev_gain**2 * ctx.prev_beta
    a = ctx.smoothing
    sigma = a * memory + (1.0 - a) * np.maximum(beta - 1.0, 0.0)
    return np.maximum(sigma, SIGMA_FLOOR)


def ga_gain(beta, sigma, ctx: GainContext) -> np.ndarray:
    beta = np.maximum(np.asarray(beta, dtype=np.float64), SNR_FLOOR)
    sigma = np.maximum(np.asarray(sigma, dtype=np.float64), SNR_FLOOR)
    c_yv = (beta + 1.0 - sigma) / (2.0 * np.sqrt(beta))
    c_xv = (beta - 1.0 - sigma) / (2.0 * np.sqrt(sigma))
    top = 1.0 - ctx.cos_clamp_eps
    c_yv2 = np.minimum(c_yv * c_yv, top)
    c_xv2 = np.minimum(c_xv * c_xv, top)
    gain = np.sqrt((1.0 - c_yv2) / (1.0 - c_xv2))
    return np.clip(gain, ctx.gain_floor, ctx.gain_cap)


def is_conjugate_even(values, rtol: float = 1e-12) -> bool:
    """True when ``values[k] == values[N-k]`` for 1 <= k < N."""
    values = np.asarray(values)
    mirrored = np.roll(values[..., ::-1], 1, axis=-1)
    return bool(np.allclose(values, mirrored, rtol=rtol, atol=0.0))


def apply_gain(noisy, gain) -> np.ndarray:
    """Scale each bin's magnitude by ``gain``, keeping the noisy phase."""
    noisy = np.asarray(noisy)
    gain = np.asarray(gain, dtype=np.float64)
    if gain.shape[-1] != noisy.shape[-1]:
        raise ValueError("gain length does not match spectrum length")
    if not is_conjugate_even(gain):
        raise ValueError("gain breaks conjugate symmetry")
    return gain * noisy


def gain_full(gain_half: np.ndarray, fft_size: int) -> np.ndarray:
    """Mirror a gain over bins ``0..N//2`` onto the full ``N``-point grid."""
    k = np.arange(fft_size)
    return gain_half[..., np.minimum(k, fft_size - k)]
