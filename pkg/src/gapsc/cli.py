"""Command-line entry point: ``gapsc {enhance,mix,metrics,spectrogram,batch}``.

Exit codes: 0 success, 1 usage error, 2 I/O or format error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict

import numpy as np

from . import _kernels
from .metrics import evaluate, mix_at_snr, spectrogram_export
from .noise_estimation import LowBand
from .phase_compensation import PscConfig
from .pipeline import GainParams, NoiseParams, PipelineConfig, enhance_stage1, enhance_stage2
from .spectral_frames import AmsConfig
from .wavio import WavFormatError, read_wav, write_wav

logger = logging.getLogger("gapsc")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_NUMERIC = 3

SNR_SWEEP_DB = (-20.0, -15.0, -10.0, -5.0, 0.0, 5.0, 10.0)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_enhance_options(p: argparse.ArgumentParser) -> None:
    defaults = PipelineConfig()
    p.add_argument("--lambda", dest="lam", type=float, default=defaults.psc.lam,
                   help="phase compensation constant (0 disables stage 2)")
    p.add_argument("--nu", type=float, default=defaults.noise.forgetting,
                   help="forgetting factor of the silence-frame noise recursion")
    p.add_argument("--init-frames", type=int, default=defaults.noise.init_frames,
                   help="leading frames averaged into the first noise estimate")
    p.add_argument("--silence-db", type=float, default=defaults.noise.silence_db,
                   help="frame-to-noise energy ratio below which a frame counts as silence")
    p.add_argument("--frame", type=int, default=defaults.stage1.frame_len)
    p.add_argument("--hop", type=int, default=defaults.stage1.hop)
    p.add_argument("--fft", type=int, default=defaults.stage1.fft_size)
    p.add_argument("--gain-floor", type=float, default=defaults.gain.gain_floor)
    p.add_argument("--gain-cap", type=float, default=defaults.gain.gain_cap)
    p.add_argument("--smoothing", type=float, default=defaults.gain.smoothing,
                   help="decision-directed weight of the a priori SNR estimate")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gapsc", description="Geometric spectral subtraction with phase compensation.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("enhance", help="enhance a noisy WAV file")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)
    _add_enhance_options(p)
    p.add_argument("--format", choices=("pcm16", "float32"), default="pcm16")
    p.add_argument("--report", help="write a JSON run report here")

    p = sub.add_parser("mix", help="add noise to clean speech at a target SNR")
    p.add_argument("--clean", required=True)
    p.add_argument("--noise", required=True)
    p.add_argument("--snr", type=float, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("pcm16", "float32"), default="float32")

    p = sub.add_parser("metrics", help="SNRSeg and overall SNR improvement")
    p.add_argument("--clean", required=True)
    p.add_argument("--noisy", required=True)
    p.add_argument("--enhanced", required=True)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("spectrogram", help="export a dB spectrogram as CSV")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--fft", type=int, default=256)
    p.add_argument("--hop", type=int, default=48)
    p.add_argument("--frame", type=int, default=96)

    p = sub.add_parser("batch", help="mix/enhance/score every manifest row")
    p.add_argument("--manifest", required=True,
                   help="CSV with clean,noise,snr columns; empty snr runs -20..10 dB")
    _add_enhance_options(p)
    p.add_argument("--out", help="results CSV (default: stdout)")
    p.add_argument("--save-dir", help="also write mixtures and enhanced files here")
    p.add_argument("--workers", type=int, default=1)
    return parser


def config_from_args(args) -> PipelineConfig:
    try:
        ams = AmsConfig(frame_len=args.frame, hop=args.hop, fft_size=args.fft)
        return PipelineConfig(
            stage1=ams,
            stage2=ams,
            noise=NoiseParams(init_frames=args.init_frames, forgetting=args.nu,
                              silence_db=args.silence_db),
            gain=GainParams(smoothing=args.smoothing, gain_floor=args.gain_floor,
                            gain_cap=args.gain_cap),
            psc=PscConfig(lam=args.lam),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _with_rate(config: PipelineConfig, rate: int) -> PipelineConfig:
    if config.stage1.sample_rate == rate:
        return config
    s1 = AmsConfig(config.stage1.frame_len, config.stage1.hop, config.stage1.fft_size, sample_rate=rate)
    s2 = AmsConfig(config.stage2.frame_len, config.stage2.hop, config.stage2.fft_size, sample_rate=rate)
    return PipelineConfig(s1, s2, config.noise, config.gain, config.psc)


def run_enhance(noisy, config: PipelineConfig):
    config = _with_rate(config, noisy.sample_rate)
    try:
        z, trace = enhance_stage1(noisy, config, return_trace=True)
    except ValueError as exc:
        if isinstance(exc, FloatingPointError):
            raise
        raise WavFormatError(str(exc)) from exc
    diagnostics = {}
    out = enhance_stage2(z, config, diagnostics)
    return out, trace, diagnostics


def _cmd_enhance(args) -> int:
    config = config_from_args(args)
    noisy = read_wav(args.inp)
    out, trace, diag = run_enhance(noisy, config)
    write_wav(out, args.out, args.format)
    if args.report:
        band = LowBand.for_fft(config.stage1.fft_size, noisy.sample_rate, config.noise.band_hz)
        report = {
            "input": os.fspath(args.inp),
            "output": os.fspath(args.out),
            "sample_rate": noisy.sample_rate,
            "n_samples": len(noisy),
            "backend": "numba" if _kernels.USE_NUMBA else "numpy",
            "config": asdict(config),
            "stage1": {
                "frames": trace.n_frames,
                "silence_frames": int(trace.silence.sum()),
                "low_band_bins": band.bin_indices.tolist(),
                "alpha_mean": float(np.mean(trace.alphas)),
                "alpha_min": float(np.min(trace.alphas)),
                "alpha_max": float(np.max(trace.alphas)),
                "gain_mean": float(np.mean(trace.gains)),
            },
            "stage2": {"imag_residue": diag.get("imag_residue", 0.0)},
            "input_rms": float(np.sqrt(np.mean(noisy.samples**2))),
            "output_rms": float(np.sqrt(np.mean(out.samples**2))),
        }
        with open(args.report, "w") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
    return EXIT_OK


def _cmd_mix(args) -> int:
    clean = read_wav(args.clean)
    noise = read_wav(args.noise)
    try:
        mixed = mix_at_snr(clean, noise, args.snr)
    except ValueError as exc:
        raise WavFormatError(str(exc)) from exc
    write_wav(mixed, args.out, args.format)
    return EXIT_OK


def _cmd_metrics(args) -> int:
    clean, noisy, enhanced = (read_wav(p) for p in (args.clean, args.noisy, args.enhanced))
    try:
        report = evaluate(clean, noisy, enhanced)
    except FloatingPointError:
        raise
    except ValueError as exc:
        raise WavFormatError(str(exc)) from exc
    if args.json:
        print(json.dumps(report.as_dict(), sort_keys=True))
    else:
        print(f"SNRSeg improvement:      {report.snrseg_improvement_db:8.3f} dB")
        print(f"Overall SNR improvement: {report.overall_snr_improvement_db:8.3f} dB")
        print(f"Frames scored:           {report.frames_scored:8d}")
    return EXIT_OK


def _cmd_spectrogram(args) -> int:
    sig = read_wav(args.inp)
    try:
        config = AmsConfig(frame_len=min(args.frame, args.fft), hop=args.hop, fft_size=args.fft,
                           sample_rate=sig.sample_rate)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    try:
        spectrogram_export(sig, config, args.out)
    except ValueError as exc:
        raise WavFormatError(str(exc)) from exc
    return EXIT_OK


def read_manifest(path) -> list[tuple[str, str, float]]:
    """Parse ``clean,noise,snr`` rows; paths resolve against the manifest's folder."""
    root = os.path.dirname(os.path.abspath(path))
    jobs = []
    with open(path, newline="") as fh:
        for i, row in enumerate(csv.reader(fh)):
            row = [c.strip() for c in row]
            if not row or not any(row) or row[0].startswith("#"):
                continue
            if i == 0 and row[0].lower() == "clean":
                continue
            if len(row) < 2:
                raise WavFormatError(f"{path}:{i + 1}: expected clean,noise[,snr]")
            clean, noise = (os.path.join(root, p) for p in row[:2])
            snr_cell = row[2] if len(row) > 2 else ""
            if snr_cell in ("", "sweep"):
                jobs.extend((clean, noise, s) for s in SNR_SWEEP_DB)
            else:
                try:
                    jobs.append((clean, noise, float(snr_cell)))
                except ValueError as exc:
                    raise WavFormatError(f"{path}:{i + 1}: bad snr {snr_cell!r}") from exc
    return jobs


def _batch_job(job, config: PipelineConfig, save_dir):
    clean_path, noise_path, snr = job
    clean = read_wav(clean_path)
    noise = read_wav(noise_path)
    try:
        noisy = mix_at_snr(clean, noise, snr)
    except ValueError as exc:
        raise WavFormatError(f"{clean_path} + {noise_path}: {exc}") from exc
    enhanced, _, _ = run_enhance(noisy, config)
    report = evaluate(clean, noisy, enhanced)
    if save_dir:
        stem = f"{os.path.splitext(os.path.basename(clean_path))[0]}_{os.path.splitext(os.path.basename(noise_path))[0]}_{snr:+g}dB"
        write_wav(noisy, os.path.join(save_dir, stem + "_noisy.wav"), "float32")
        write_wav(enhanced, os.path.join(save_dir, stem + "_enhanced.wav"), "float32")
    return report


def _cmd_batch(args) -> int:
    config = config_from_args(args)
    jobs = read_manifest(args.manifest)
    if args.save_dir:
        os.makedirs(args.save_dir, exist_ok=True)
    if args.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            reports = list(pool.map(_batch_job, jobs, [config] * len(jobs), [args.save_dir] * len(jobs)))
    else:
        reports = [_batch_job(job, config, args.save_dir) for job in jobs]

    fields = ["clean", "noise", "snr_db", "snrseg_improvement_db",
              "overall_snr_improvement_db", "frames_scored"]
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        writer = csv.writer(fh)
        writer.writerow(fields)
        for (clean, noise, snr), rep in zip(jobs, reports):
            writer.writerow([clean, noise, f"{snr:g}", f"{rep.snrseg_improvement_db:.6f}",
                             f"{rep.overall_snr_improvement_db:.6f}", rep.frames_scored])
    finally:
        if args.out:
            fh.close()
    return EXIT_OK


COMMANDS = {
    "enhance": _cmd_enhance,
    "mix": _cmd_mix,
    "metrics": _cmd_metrics,
    "spectrogram": _cmd_spectrogram,
    "batch": _cmd_batch,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"gapsc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FloatingPointError as exc:
        print(f"gapsc: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (OSError, WavFormatError) as exc:
        print(f"gapsc: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
