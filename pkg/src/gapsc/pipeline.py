"""Two-stage enhancement: geometric magnitude subtraction, then phase compensation.

Each stage is a complete analysis-modification-synthesis pass. Stage 1
tracks the noise and rescales magnitudes with the noisy phase kept; its
time-domain output is re-framed from scratch and stage 2 perturbs the phase
of every conjugate pair before the real-part resynthesis.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .ga_subtraction import apply_gain
from .noise_estimation import LowBand
from .phase_compensation import (
    PscConfig,
    antisymmetry_mask,
    compensate_phase,
    compensation_function,
    rms_noise_scalar,
)
from .spectral_frames import AmsConfig, AudioSignal, analyze, frame_count, synthesize

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class NoiseParams:
    init_frames: int = 6
    forgetting: float = 0.9
    silence_db: float = 3.0
    alpha_min: float = 0.1
    alpha_max: float = 10.0
    band_hz: float = 50.0

    def __post_init__(self):
        if self.init_frames < 1:
            raise ValueError("init_frames must be >= 1")
        if not 0.0 < self.forgetting < 1.0:
            raise ValueError("forgetting factor must lie in (0, 1)")
        if not 0.0 < self.alpha_min <= self.alpha_max:
            raise ValueError("need 0 < alpha_min <= alpha_max")


@dataclass(frozen=True)
class GainParams:
    smoothing: float = 0.98
    gain_floor: float = 0.05
    gain_cap: float = 1.0
    cos_clamp_eps: float = 1e-6

    def __post_init__(self):
        if not 0.0 <= self.gain_floor <= self.gain_cap:
            raise ValueError("need 0 <= gain_floor <= gain_cap")
        if not 0.0 <= self.smoothing < 1.0:
            raise ValueError("smoothing must lie in [0, 1)")


@dataclass(frozen=True)
class PipelineConfig:
    stage1: AmsConfig = field(default_factory=AmsConfig)
    stage2: AmsConfig = field(default_factory=AmsConfig)
    noise: NoiseParams = field(default_factory=NoiseParams)
    gain: GainParams = field(default_factory=GainParams)
    psc: PscConfig = field(default_factory=PscConfig)

    def minimum_length(self) -> int:
        """Shortest input yielding ``init_frames + 1`` stage-1 frames."""
        return self.stage1.frame_len + (self.noise.init_frames - 1) * self.stage1.hop + 1


@dataclass
class Stage1Trace:
    """Per-frame internals of a stage-1 pass, for reports and tests."""

    gains: np.ndarray = field(repr=False)
    noise: np.ndarray = field(repr=False)
    alphas: np.ndarray = field(repr=False)
    silence: np.ndarray = field(repr=False)

    @property
    def n_frames(self) -> int:
        return self.alphas.shape[0]


def _symmetric_magnitude(spectra: np.ndarray) -> np.ndarray:
    """``|Y|`` with the upper half mirrored from the lower, bit-exactly."""
    n = spectra.shape[-1]
    half = np.abs(spectra[..., : n // 2 + 1])
    k = np.arange(n)
    return np.ascontiguousarray(half[..., np.minimum(k, n - k)])


def enhance_stage1(noisy: AudioSignal, config: PipelineConfig = PipelineConfig(),
                   return_trace: bool = False, backend: str | None = None):
    """Noise-tracked geometric subtraction; returns the intermediate signal.

    With ``return_trace=True`` a ``(signal, Stage1Trace)`` pair is returned.
    """
    ams = config.stage1
    n = len(noisy)
    if n < ams.frame_len or frame_count(n, ams) < config.noise.init_frames + 1:
        raise ValueError(
            f"signal too short: need at least {config.minimum_length()} samples, got {n}"
        )
    spectra = analyze(noisy, ams)
    mag = _symmetric_magnitude(spectra)
    band = LowBand.for_fft(ams.fft_size, noisy.sample_rate, config.noise.band_hz)
    gains, noise, alphas, silence = _kernels.stage1_gains(
        mag,
        band.bin_indices,
        init_frames=config.noise.init_frames,
        forgetting=config.noise.forgetting,
        silence_db=config.noise.silence_db,
        alpha_min=config.noise.alpha_min,
        alpha_max=config.noise.alpha_max,
        smoothing=config.gain.smoothing,
        gain_floor=config.gain.gain_floor,
        gain_cap=config.gain.gain_cap,
        cos_eps=config.gain.cos_clamp_eps,
        backend=backend,
    )
    z = synthesize(apply_gain(spectra, gains), ams, n)
    z = AudioSignal(z.samples, noisy.sample_rate)
    logger.debug("stage 1: %d frames, %d silence, mean alpha %.3f",
                 alphas.shape[0], int(silence.sum()), float(alphas.mean()))
    if return_trace:
        return z, Stage1Trace(gains=gains, noise=noise, alphas=alphas, silence=silence)
    return z


def enhance_stage2(intermediate: AudioSignal, config: PipelineConfig = PipelineConfig(),
                   diagnostics: dict | None = None) -> AudioSignal:
    """Phase spectrum compensation on a fresh framing of ``intermediate``."""
    ams = config.stage2
    spectra = analyze(intermediate, ams)
    psi = antisymmetry_mask(ams.fft_size)
    dhat = rms_noise_scalar(spectra)
    phi = compensation_function(psi, dhat, config.psc)
    xhat = compensate_phase(spectra, phi)
    out = synthesize(xhat, ams, len(intermediate), diagnostics)
    return AudioSignal(out.samples, intermediate.sample_rate)


def enhance(noisy: AudioSignal, config: PipelineConfig = PipelineConfig(),
            backend: str | None = None) -> AudioSignal:
    return enhance_stage2(enhance_stage1(noisy, config, backend=backend), config)
