"""Synthetic test signals shared by the test modules."""

import numpy as np

FS = 8000


def harmonic(duration=2.0, f0=150.0, n_harmonics=5, lead_in=0.2, amp=0.3, fs=FS):
    """Fundamental plus ``n_harmonics`` overtones (1/h amplitudes), silent lead-in."""
    t = np.arange(int(round(duration * fs))) / fs
    x = sum(np.sin(2 * np.pi * f0 * h * t) / h for h in range(1, n_harmonics + 2))
    x = amp * x
    x[: int(round(lead_in * fs))] = 0.0
    return x


def white(n, seed=0, scale=1.0):
    return scale * np.random.default_rng(seed).standard_normal(n)


def at_snr(clean, noise, snr_db):
    g = np.sqrt(np.mean(clean**2) / (np.mean(noise**2) * 10 ** (snr_db / 10)))
    return clean + g * noise


def dft_matrix(n):
    k = np.arange(n)
    return np.exp(-2j * np.pi * np.outer(k, k) / n)


def interior_rel_rms(ref, test, margin):
    a = np.asarray(ref)[margin : len(ref) - margin]
    b = np.asarray(test)[margin : len(test) - margin]
    return np.sqrt(np.mean((a - b) ** 2)) / np.sqrt(np.mean(a**2))
