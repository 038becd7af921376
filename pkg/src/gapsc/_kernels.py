"""Hot loops with a numba path and a pure-numpy path.

Set ``GAPSC_DISABLE_NUMBA=1`` to force the numpy path (also used when numba
is not importable). Both paths compute the same thing; the numpy one is
written in terms of the public per-frame operations and serves as the
reference in the test suite.
"""

from __future__ import annotations

import os

import numpy as np

from . import ga_subtraction as ga
from . import noise_estimation as ne

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is an install requirement
    njit = None

_DISABLED = os.environ.get("GAPSC_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}
HAVE_NUMBA = njit is not None
USE_NUMBA = HAVE_NUMBA and not _DISABLED


def _resolve(backend: str | None) -> str:
    if backend is None:
        return "numba" if USE_NUMBA else "numpy"
    if backend not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba backend requested but numba is not installed")
    return backend


# --------------------------------------------------------------------------
# stage 1: noise tracking + geometric gain, frame-sequential
# --------------------------------------------------------------------------

def _stage1_numpy(mag, band, init_frames, forgetting, silence_db, alpha_min, alpha_max,
                  smoothing, gain_floor, gain_cap, cos_eps):
    n_frames, n_bins = mag.shape
    gains = np.empty((n_frames, n_bins))
    noise = np.empty((n_frames, n_bins))
    alphas = np.empty(n_frames)
    silence = np.zeros(n_frames, dtype=np.bool_)
    lowband = ne.LowBand(bin_indices=band)
    state = ne.init_noise(mag, init_frames=init_frames, forgetting=forgetting)
    ctx = ga.GainContext(smoothing=smoothing, gain_floor=gain_floor, gain_cap=gain_cap,
                         cos_clamp_eps=cos_eps)
    for t in range(n_frames):
        y = mag[t]
        if t < init_frames:
            silence[t] = True
        elif ne.classify_silence(y, state, silence_db):
            silence[t] = True
            state = ne.update_silence_noise(state, y, index=t)
        alpha = ne.tracking_factor(y, state, lowband, alpha_min, alpha_max)
        v = ne.current_noise(state, alpha)
        beta = ga.posterior_snr(y, v)
        sigma = ga.a_priori_snr(beta, ctx)
        g = ga.ga_gain(beta, sigma, ctx)
        ctx.remember(g, beta)
        gains[t] = g
        noise[t] = v
        alphas[t] = alpha
    return gains, noise, alphas, silence


def _stage1_numba_impl(mag, band, init_frames, forgetting, silence_db, alpha_min, alpha_max,
                       smoothing, gain_floor, gain_cap, cos_eps):
    n_frames, n_bins = mag.shape
    gains = np.empty((n_frames, n_bins))
    noise = np.empty((n_frames, n_bins))
    alphas = np.empty(n_frames)
    silence = np.zeros(n_frames, dtype=np.bool_)
    base = np.zeros(n_bins)
    for t in range(init_frames):
        for k in range(n_bins):
            base[k] += mag[t, k]
    for k in range(n_bins):
        base[k] /= init_frames
    prev_g = np.zeros(n_bins)
    prev_b = np.zeros(n_bins)
    top = 1.0 - cos_eps
    for t in range(n_frames):
        if t < init_frames:
            silence[t] = True
        else:
            num = 0.0
            den = 0.0
            for k in range(n_bins):
                num += mag[t, k] * mag[t, k]
                den += base[k] * base[k]
            if den > 0.0:
                if num <= 0.0:
                    quiet = True
                else:
                    quiet = 10.0 * np.log10(num / den) < silence_db
            else:
                quiet = False
            if quiet:
                silence[t] = True
                for k in range(n_bins):
                    base[k] = forgetting * base[k] + (1.0 - forgetting) * mag[t, k]
        band_y = 0.0
        band_v = 0.0
        for i in range(band.shape[0]):
            band_y += mag[t, band[i]]
            band_v += base[band[i]]
        if band_v < 1e-12:
            alpha = 1.0
        else:
            alpha = min(max(band_y / band_v, alpha_min), alpha_max)
        alphas[t] = alpha
        for k in range(n_bins):
            v = alpha * base[k]
            noise[t, k] = v
            beta = mag[t, k] * mag[t, k] / max(v * v, 1e-12)
            sigma = smoothing * (prev_g[k] * prev_g[k] * prev_b[k]) \
                + (1.0 - smoothing) * max(beta - 1.0, 0.0)
            sigma = max(sigma, 1e-6)
            b = max(beta, 1e-12)
            s = max(sigma, 1e-12)
            c_yv = (b + 1.0 - s) / (2.0 * np.sqrt(b))
            c_xv = (b - 1.0 - s) / (2.0 * np.sqrt(s))
            c_yv2 = min(c_yv * c_yv, top)
            c_xv2 = min(c_xv * c_xv, top)
            g = np.sqrt((1.0 - c_yv2) / (1.0 - c_xv2))
            g = min(max(g, gain_floor), gain_cap)
            gains[t, k] = g
            prev_g[k] = g
            prev_b[k] = beta
    return gains, noise, alphas, silence


def _overlap_sum_numpy(frames, hop, out_len):
    n_frames, frame_len = frames.shape
    out = np.zeros(out_len)
    for t in range(n_frames):
        out[t * hop : t * hop + frame_len] += frames[t]
    return out


def _overlap_sum_numba_impl(frames, hop, out_len):
    n_frames, frame_len = frames.shape
    out = np.zeros(out_len)
    for t in range(n_frames):
        start = t * hop
        for n in range(frame_len):
            out[start + n] += frames[t, n]
    return out


if HAVE_NUMBA:
    _stage1_numba = njit(cache=True)(_stage1_numba_impl)
    _overlap_sum_numba = njit(cache=True)(_overlap_sum_numba_impl)
else:  # pragma: no cover
    _stage1_numba = _overlap_sum_numba = None


def stage1_gains(mag, band, *, init_frames, forgetting, silence_db, alpha_min, alpha_max,
                 smoothing, gain_floor, gain_cap, cos_eps, backend=None):
    """Run the noise tracker and gain rule over a magnitude stack.

    Parameters
    ----------
    mag : ndarray, shape (n_frames, n_bins)
        Noisy magnitudes, frame-major.
    band : ndarray of int
        Bin indices of the low band driving the tracking factor.

    Returns
    -------
    gains, noise, alphas, silence
        Per-frame gain and noise estimate ``(n_frames, n_bins)``, the
        tracking factor and the silence decision per frame.
    """
    mag = np.ascontiguousarray(mag, dtype=np.float64)
    band = np.ascontiguousarray(band, dtype=np.int64)
    if mag.shape[0] < init_frames:
        raise ValueError("insufficient initialization frames")
    args = (mag, band, int(init_frames), float(forgetting), float(silence_db),
            float(alpha_min), float(alpha_max), float(smoothing), float(gain_floor),
            float(gain_cap), float(cos_eps))
    if _resolve(backend) == "numba":
        return _stage1_numba(*args)
    return _stage1_numpy(*args)


def overlap_sum(frames, hop, out_len, backend=None):
    frames = np.ascontiguousarray(frames, dtype=np.float64)
    if _resolve(backend) == "numba":
        return _overlap_sum_numba(frames, int(hop), int(out_len))
    return _overlap_sum_numpy(frames, int(hop), int(out_len))
