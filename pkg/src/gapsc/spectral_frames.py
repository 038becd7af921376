"""Windowed framing, FFT analysis and envelope-normalized overlap-add.

Frames are stored as rows of a 2-D array ``(n_frames, frame_len)`` and
spectra as rows of ``(n_frames, fft_size)`` complex arrays; the single-frame
functions accept either a 1-D frame or a stack of frames.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from ._kernels import overlap_sum

logger = logging.getLogger(__name__)

ENVELOPE_FLOOR = 1e-8


class NonFiniteSignalError(FloatingPointError, ValueError):
    """Samples contain NaN or infinity."""


@dataclass(frozen=True)
class AmsConfig:
    """Parameters of one analysis-modification-synthesis pass.

    Parameters
    ----------
    frame_len : int
        Analysis frame length in samples.
    hop : int
        Frame advance in samples.
    fft_size : int
        Transform length; frames are zero-padded up to it.
    window_kind : str
        Only ``"hamming_periodic"`` is supported.
    sample_rate : int
        Sampling rate in Hz.
    """

    frame_len: int = 96
    hop: int = 48
    fft_size: int = 256
    window_kind: str = "hamming_periodic"
    sample_rate: int = 8000

    def __post_init__(self):
        if not 0 < self.hop <= self.frame_len <= self.fft_size:
            raise ValueError(
                f"need 0 < hop <= frame_len <= fft_size, got hop={self.hop}, "
                f"frame_len={self.frame_len}, fft_size={self.fft_size}"
            )
        if self.window_kind != "hamming_periodic":
            raise ValueError(f"unsupported window kind {self.window_kind!r}")
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")

    @property
    def window(self) -> np.ndarray:
        return hamming_periodic(self.frame_len)


@dataclass(frozen=True)
class AudioSignal:
    """Mono float64 samples with their sample rate."""

    samples: np.ndarray = field(repr=False)
    sample_rate: int = 8000

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise ValueError("AudioSignal holds mono samples (1-D array)")
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")
        if not np.all(np.isfinite(samples)):
            raise NonFiniteSignalError("samples must be finite")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    def __len__(self) -> int:
        return self.samples.shape[0]

    @property
    def duration(self) -> float:
        return len(self) / self.sample_rate


def hamming_periodic(length: int) -> np.ndarray:
    """DFT-even Hamming window ``0.54 - 0.46 cos(2 pi n / length)``."""
    n = np.arange(length)
    return 0.54 - 0.46 * np.cos(2.0 * np.pi * n / length)


def frame_count(n_samples: int, config: AmsConfig) -> int:
    """Number of frames ``segment_signal`` yields for ``n_samples``."""
    if n_samples < config.frame_len:
        raise ValueError("signal too short")
    full, rem = divmod(n_samples - config.frame_len, config.hop)
    return full + 1 + (1 if rem else 0)


def segment_signal(signal: AudioSignal, config: AmsConfig) -> np.ndarray:
    """Split a signal into hop-spaced frames, zero-padding the tail frame.

    Returns
    -------
    ndarray, shape (n_frames, frame_len)
        Row ``t`` holds samples starting at ``t * hop``.
    """
    x = signal.samples if isinstance(signal, AudioSignal) else np.asarray(signal, float)
    n_frames = frame_count(x.shape[0], config)
    padded_len = (n_frames - 1) * config.hop + config.frame_len
    padded = np.zeros(padded_len)
    padded[: x.shape[0]] = x
    starts = np.arange(n_frames) * config.hop
    idx = starts[:, None] + np.arange(config.frame_len)[None, :]
    return padded[idx]


def apply_window(frames: np.ndarray, config: AmsConfig) -> np.ndarray:
    frames = np.asarray(frames, dtype=np.float64)
    if frames.shape[-1] != config.frame_len:
        raise ValueError(
            f"frame length {frames.shape[-1]} does not match frame_len {config.frame_len}"
        )
    return frames * config.window


def forward_spectrum(frames: np.ndarray, config: AmsConfig) -> np.ndarray:
    """Unnormalized ``fft_size``-point DFT of (windowed) frames."""
    return np.fft.fft(frames, n=config.fft_size, axis=-1)


def imag_residue(spectra: np.ndarray) -> float:
    """Largest imaginary magnitude left by an inverse transform of ``spectra``."""
    if spectra.size == 0:
        return 0.0
    return float(np.max(np.abs(np.fft.ifft(spectra, axis=-1).imag)))


def inverse_frame(spectra: np.ndarray, config: AmsConfig, diagnostics: dict | None = None) -> np.ndarray:
    """Real part of the 1/N-normalized inverse DFT, cut to ``frame_len``.

    If ``diagnostics`` is given, the largest discarded imaginary magnitude is
    stored under ``"imag_residue"``.
    """
    full = np.fft.ifft(spectra, n=config.fft_size, axis=-1)
    if diagnostics is not None:
        residue = float(np.max(np.abs(full.imag))) if full.size else 0.0
        diagnostics["imag_residue"] = residue
        logger.debug("inverse_frame imaginary residue %.3e", residue)
    return np.ascontiguousarray(full.real[..., : config.frame_len])


def window_envelope(n_frames: int, config: AmsConfig, total_len: int | None = None) -> np.ndarray:
    """Summed analysis window ``sum_t w[n - t*hop]``."""
    span = (n_frames - 1) * config.hop + config.frame_len
    tiled = np.broadcast_to(config.window, (n_frames, config.frame_len))
    return overlap_sum(tiled, config.hop, max(span, total_len or 0))


def overlap_add(frames: np.ndarray, config: AmsConfig, total_len: int) -> AudioSignal:
    """Sum frames at their hop offsets and divide by the window envelope.

    The envelope division makes analysis-window-then-resynthesis an identity
    wherever at least one frame covers the sample.
    """
    frames = np.asarray(frames, dtype=np.float64)
    if frames.ndim != 2 or frames.shape[0] == 0:
        raise ValueError("overlap_add needs a non-empty (n_frames, frame_len) stack")
    if frames.shape[1] != config.frame_len:
        raise ValueError("frame length does not match config")
    n_frames = frames.shape[0]
    span = (n_frames - 1) * config.hop + config.frame_len
    out = overlap_sum(frames, config.hop, max(span, total_len))
    env = window_envelope(n_frames, config, total_len)
    out = out / np.maximum(env, ENVELOPE_FLOOR)
    return AudioSignal(out[:total_len], config.sample_rate)


def analyze(signal: AudioSignal, config: AmsConfig) -> np.ndarray:
    """Segment, window and transform a whole signal: ``(n_frames, fft_size)``."""
    return forward_spectrum(apply_window(segment_signal(signal, config), config), config)


def synthesize(spectra: np.ndarray, config: AmsConfig, total_len: int,
               diagnostics: dict | None = None) -> AudioSignal:
    """Inverse of :func:`analyze` for a possibly modified spectrum stack."""
    return overlap_add(inverse_frame(spectra, config, diagnostics), config, total_len)
