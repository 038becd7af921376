"""Speech enhancement by noise-tracked geometric spectral subtraction
followed by phase spectrum compensation."""

from .ga_subtraction import GainContext, a_priori_snr, apply_gain, ga_gain, posterior_snr
from .metrics import (
    MetricReport,
    evaluate,
    mix_at_snr,
    overall_snr_improvement,
    segmental_snr_improvement,
    spectrogram_export,
)
from .noise_estimation import LowBand, NoiseState, init_noise
from .phase_compensation import PscConfig, antisymmetry_mask, compensate_phase
from .pipeline import PipelineConfig, enhance, enhance_stage1, enhance_stage2
from .spectral_frames import AmsConfig, AudioSignal
from .wavio import read_wav, write_wav

__version__ = "0.1.0"

__all__ = [
    "AmsConfig",
    "AudioSignal",
    "GainContext",
    "LowBand",
    "MetricReport",
    "NoiseState",
    "PipelineConfig",
    "PscConfig",
    "a_priori_snr",
    "antisymmetry_mask",
    "apply_gain",
    "compensate_phase",
    "enhance",
    "enhance_stage1",
    "enhance_stage2",
    "evaluate",
    "ga_gain",
    "init_noise",
    "mix_at_snr",
    "overall_snr_improvement",
    "posterior_snr",
    "read_wav",
    "segmental_snr_improvement",
    "spectrogram_export",
    "write_wav",
]
