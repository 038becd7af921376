"""Phase spectrum compensation.

An anti-symmetric offset is added to each conjugate bin pair before taking
the phase. Pairs whose magnitude is small next to the offset get pushed
towards opposite phases and largely cancel when the real part of the
inverse transform is taken; strong bins barely move.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_LAMBDA = 3.74


@dataclass(frozen=True)
class PscConfig:
    lam: float = DEFAULT_LAMBDA

    def __post_init__(self):
        if not self.lam >= 0.0:
            raise ValueError("lambda must be non-negative")


def antisymmetry_mask(fft_size: int) -> np.ndarray:
    """+1 on the lower conjugate half, -1 on the upper, 0 at DC and Nyquist."""
    if fft_size < 2:
        raise ValueError("fft_size must be >= 2")
    k = np.arange(fft_size)
    psi = np.zeros(fft_size)
    psi[(2 * k > 0) & (2 * k < fft_size)] = 1.0
    psi[2 * k > fft_size] = -1.0
    return psi


def rms_noise_scalar(z) -> np.ndarray | float:
    """Root-mean-square magnitude over the last axis."""
    z = np.asarray(z)
    out = np.sqrt(np.mean(np.abs(z) ** 2, axis=-1))
    return float(out) if np.ndim(out) == 0 else out


def compensation_function(psi, dhat, config: PscConfig) -> np.ndarray:
    """``lam * psi * dhat``; ``dhat`` may be one value per frame."""
    psi = np.asarray(psi, dtype=np.float64)
    dhat = np.asarray(dhat, dtype=np.float64)
    return config.lam * psi * dhat[..., None] if dhat.ndim else config.lam * psi * dhat


def compensate_phase(z, phi) -> np.ndarray:
    """Keep ``|z|`` and take the phase of ``z + phi``.

    Bins with ``phi == 0`` are passed through untouched rather than
    re-synthesized from magnitude and angle.
    """
    z = np.asarray(z, dtype=np.complex128)
    phi = np.asarray(phi, dtype=np.float64)
    if z.shape[-1] != phi.shape[-1]:
        raise ValueError("spectrum and compensation lengths differ")
    moved = np.abs(z) * np.exp(1j * np.angle(z + phi))
    return np.where(phi == 0.0, z, moved)
