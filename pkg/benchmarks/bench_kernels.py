"""Time the numba and numpy paths of the hot loops.

    python benchmarks/bench_kernels.py --seconds 10 --repeat 5
"""

import argparse
import timeit

import numpy as np

from gapsc import _kernels
from gapsc.noise_estimation import LowBand
from gapsc.pipeline import PipelineConfig, enhance
from gapsc.spectral_frames import AmsConfig, AudioSignal, analyze, segment_signal

PARAMS = dict(init_frames=6, forgetting=0.9, silence_db=3.0, alpha_min=0.1, alpha_max=10.0,
              smoothing=0.98, gain_floor=0.05, gain_cap=1.0, cos_eps=1e-6)


def test_signal(seconds, seed=0):
    rng = np.random.default_rng(seed)
    t = np.arange(int(seconds * 8000)) / 8000
    voiced = sum(np.sin(2 * np.pi * 150 * h * t) / h for h in range(1, 7))
    return AudioSignal(0.3 * voiced + 0.3 * rng.standard_normal(t.size))


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--seconds", type=float, default=10.0, help="length of the test signal")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    if not _kernels.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    sig = test_signal(args.seconds)
    cfg = AmsConfig()
    mag = np.abs(analyze(sig, cfg))
    band = LowBand.for_fft(cfg.fft_size, cfg.sample_rate).bin_indices
    frames = segment_signal(sig, cfg)
    out_len = len(sig) + cfg.frame_len

    cases = {
        "stage1_gains": lambda b: _kernels.stage1_gains(mag, band, backend=b, **PARAMS),
        "overlap_sum": lambda b: _kernels.overlap_sum(frames, cfg.hop, out_len, backend=b),
        "enhance (end to end)": lambda b: enhance(sig, PipelineConfig(), backend=b),
    }

    print(f"signal: {args.seconds:g} s at 8 kHz, {mag.shape[0]} frames x {mag.shape[1]} bins")
    print(f"{'case':<22s} {'numpy [ms]':>12s} {'numba [ms]':>12s} {'speedup':>9s}")
    for name, fn in cases.items():
        fn("numba")  # compile outside the timed region
        ref = fn("numpy")
        got = fn("numba")
        a = ref[0] if isinstance(ref, tuple) else getattr(ref, "samples", ref)
        b = got[0] if isinstance(got, tuple) else getattr(got, "samples", got)
        assert np.allclose(a, b, rtol=1e-9, atol=1e-10), f"{name}: backends disagree"
        t_np = min(timeit.repeat(lambda: fn("numpy"), number=1, repeat=args.repeat)) * 1e3
        t_nb = min(timeit.repeat(lambda: fn("numba"), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:<22s} {t_np:12.2f} {t_nb:12.2f} {t_np / t_nb:8.1f}x")


if __name__ == "__main__":
    main()
