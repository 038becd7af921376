"""Mono WAV reading and writing (PCM 16-bit and IEEE float 32-bit)."""

from __future__ import annotations

import os
import warnings

import numpy as np
from scipy.io import wavfile

from .spectral_frames import AudioSignal

EXPECTED_RATE = 8000
PCM16_SCALE = 32768.0


class WavFormatError(ValueError):
    """The file is not a mono PCM16 / float32 RIFF-WAVE file."""


def read_wav(path) -> AudioSignal:
    """Load a mono WAV file as float samples in [-1, 1].

    16-bit PCM is divided by 32768; float32 data is passed through unchanged.
    A sample rate other than 8 kHz only triggers a warning.
    """
    if not os.path.isfile(path):
        raise FileNotFoundError(f"no such file: {path}")
    try:
        rate, data = wavfile.read(path)
    except ValueError as exc:
        raise WavFormatError(f"{path}: {exc}") from exc
    if data.ndim != 1:
        if data.ndim == 2 and data.shape[1] == 1:
            data = data[:, 0]
        else:
            raise WavFormatError(f"{path}: mono required, got {data.shape[1]} channels")
    if data.dtype == np.int16:
        samples = data.astype(np.float64) / PCM16_SCALE
    elif data.dtype == np.float32:
        samples = data.astype(np.float64)
    else:
        raise WavFormatError(
            f"{path}: unsupported sample format {data.dtype} "
            "(need PCM 16-bit or IEEE float 32-bit)"
        )
    if rate != EXPECTED_RATE:
        warnings.warn(f"{path}: sample rate {rate} Hz, expected {EXPECTED_RATE} Hz", stacklevel=2)
    return AudioSignal(samples, int(rate))


def quantize_pcm16(samples) -> np.ndarray:
    """Clamp to [-1, 1], scale by 32768 and round half away from zero."""
    x = np.clip(np.asarray(samples, dtype=np.float64), -1.0, 1.0) * PCM16_SCALE
    q = np.sign(x) * np.floor(np.abs(x) + 0.5)
    return np.clip(q, -32768, 32767).astype(np.int16)


def write_wav(signal: AudioSignal, path, format: str = "pcm16") -> None:
    samples = np.asarray(signal.samples, dtype=np.float64)
    if not np.all(np.isfinite(samples)):
        raise ValueError("cannot write non-finite samples")
    if format == "pcm16":
        data = quantize_pcm16(samples)
    elif format == "float32":
        data = samples.astype(np.float32)
    else:
        raise ValueError(f"unknown WAV format {format!r}")
    wavfile.write(path, int(signal.sample_rate), data)
