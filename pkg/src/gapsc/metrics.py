"""Noise mixing, SNR-improvement scores and spectrogram export."""

from __future__ import annotations

import csv
from dataclasses import asdict, dataclass

import numpy as np

from .spectral_frames import AmsConfig, AudioSignal, analyze

SEG_FRAME = 256
SEG_MIN_DB = -10.0
SEG_MAX_DB = 35.0
SILENT_FRAME_ENERGY = 1e-10
OVERALL_CAP_DB = 100.0
RESIDUAL_FLOOR = 1e-20
SPECTROGRAM_FLOOR_DB = -120.0


@dataclass(frozen=True)
class MetricReport:
    snrseg_improvement_db: float
    overall_snr_improvement_db: float
    frames_scored: int

    def as_dict(self) -> dict:
        return asdict(self)


def _samples(x) -> np.ndarray:
    return x.samples if isinstance(x, AudioSignal) else np.asarray(x, dtype=np.float64)


def _check_lengths(*signals) -> None:
    lengths = {len(_samples(s)) for s in signals}
    if len(lengths) != 1:
        raise ValueError(f"signal lengths differ: {sorted(lengths)}")


def mean_power(x) -> float:
    x = _samples(x)
    return float(np.mean(x * x))


def mix_at_snr(clean: AudioSignal, noise: AudioSignal, snr_db: float) -> AudioSignal:
    """Add ``noise`` (truncated to the clean length) scaled to hit ``snr_db``."""
    if clean.sample_rate != noise.sample_rate:
        raise ValueError("clean and noise sample rates differ")
    if len(noise) < len(clean):
        raise ValueError("noise is shorter than the clean signal")
    v = noise.samples[: len(clean)]
    p_clean = mean_power(clean)
    p_noise = mean_power(v)
    if p_clean <= 0.0 or p_noise <= 0.0:
        raise ValueError("clean and noise must both have non-zero power")
    g = noise_gain(p_clean, p_noise, snr_db)
    return AudioSignal(clean.samples + g * v, clean.sample_rate)


def noise_gain(p_clean: float, p_noise: float, snr_db: float) -> float:
    return float(np.sqrt(p_clean / (p_noise * 10.0 ** (snr_db / 10.0))))


def segmental_snr(clean, test, frame_len: int = SEG_FRAME) -> tuple[float, int]:
    """Mean clamped per-frame SNR over non-overlapping frames.

    A trailing partial frame is dropped unless the signal is shorter than one
    frame. Returns ``(snrseg_db, frames_scored)``.
    """
    c = _samples(clean)
    x = _samples(test)
    _check_lengths(c, x)
    n_frames = max(len(c) // frame_len, 1)
    usable = min(n_frames * frame_len, len(c))
    c = c[:usable].reshape(n_frames, -1)
    x = x[:usable].reshape(n_frames, -1)
    energy = np.sum(c * c, axis=1)
    residual = np.sum((c - x) ** 2, axis=1)
    keep = energy >= SILENT_FRAME_ENERGY
    if not np.any(keep):
        raise ValueError("no frame of the clean reference carries energy")
    with np.errstate(divide="ignore"):
        per_frame = 10.0 * np.log10(energy[keep] / residual[keep])
    per_frame = np.clip(per_frame, SEG_MIN_DB, SEG_MAX_DB)
    return float(np.mean(per_frame)), int(np.count_nonzero(keep))


def overall_snr(clean, test) -> float:
    c = _samples(clean)
    x = _samples(test)
    _check_lengths(c, x)
    energy = float(np.sum(c * c))
    if energy <= 0.0:
        raise ValueError("clean reference has zero energy")
    residual = float(np.sum((c - x) ** 2))
    if residual <= RESIDUAL_FLOOR:
        return OVERALL_CAP_DB
    return 10.0 * np.log10(energy / residual)


def segmental_snr_improvement(clean, noisy, enhanced, frame_len: int = SEG_FRAME) -> float:
    _check_lengths(clean, noisy, enhanced)
    return segmental_snr(clean, enhanced, frame_len)[0] - segmental_snr(clean, noisy, frame_len)[0]


def overall_snr_improvement(clean, noisy, enhanced) -> float:
    _check_lengths(clean, noisy, enhanced)
    return overall_snr(clean, enhanced) - overall_snr(clean, noisy)


def evaluate(clean, noisy, enhanced, frame_len: int = SEG_FRAME) -> MetricReport:
    _check_lengths(clean, noisy, enhanced)
    seg_noisy, frames = segmental_snr(clean, noisy, frame_len)
    seg_enh, _ = segmental_snr(clean, enhanced, frame_len)
    report = MetricReport(
        snrseg_improvement_db=seg_enh - seg_noisy,
        overall_snr_improvement_db=overall_snr_improvement(clean, noisy, enhanced),
        frames_scored=frames,
    )
    if not (np.isfinite(report.snrseg_improvement_db) and np.isfinite(report.overall_snr_improvement_db)):
        raise FloatingPointError("metric evaluation produced a non-finite value")
    return report


# --------------------------------------------------------------------------
# spectrogram
# --------------------------------------------------------------------------

def spectrogram(signal: AudioSignal, config: AmsConfig) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Magnitude spectrogram in dB over the non-redundant bins.

    Returns ``(times_s, freqs_hz, db)`` where ``db`` is float32 with shape
    ``(n_frames, fft_size // 2 + 1)`` and floored at -120 dB. Times are frame
    centres.
    """
    spectra = analyze(signal, config)[:, : config.fft_size // 2 + 1]
    mag = np.abs(spectra)
    with np.errstate(divide="ignore"):
        db = 20.0 * np.log10(mag)
    db = np.maximum(db, SPECTROGRAM_FLOOR_DB).astype(np.float32)
    rate = signal.sample_rate
    freqs = np.arange(config.fft_size // 2 + 1) * rate / config.fft_size
    times = (np.arange(db.shape[0]) * config.hop + config.frame_len / 2) / rate
    return times, freqs, db


def spectrogram_export(signal: AudioSignal, config: AmsConfig, path) -> np.ndarray:
    """Write the dB spectrogram as CSV and return the matrix.

    The first column is the frame-centre time in seconds; the header holds
    the bin centre frequencies in Hz. Cells use 9 significant digits, enough
    to reproduce float32 values exactly.
    """
    times, freqs, db = spectrogram(signal, config)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["time_s"] + [f"{f:.9g}" for f in freqs])
        for t, row in zip(times, db):
            writer.writerow([f"{t:.9g}"] + [f"{v:.9g}" for v in row])
    return db


def read_spectrogram_csv(path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    freqs = np.array([float(v) for v in rows[0][1:]])
    body = np.array([[float(v) for v in r] for r in rows[1:]], dtype=np.float64)
    body = body.reshape(-1, len(freqs) + 1)
    return body[:, 0], freqs, body[:, 1:].astype(np.float32)
