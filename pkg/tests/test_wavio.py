import struct
import warnings

import numpy as np
import pytest
from scipy.io import wavfile

from gapsc.spectral_frames import AudioSignal
from gapsc.wavio import WavFormatError, quantize_pcm16, read_wav, write_wav


def riff(fmt_tag, channels, rate, bits, payload):
    block = channels * bits // 8
    fmt = struct.pack("<HHIIHH", fmt_tag, channels, rate, rate * block, block, bits)
    body = b"WAVE" + b"fmt " + struct.pack("<I", len(fmt)) + fmt + b"data" + struct.pack("<I", len(payload)) + payload
    return b"RIFF" + struct.pack("<I", len(body)) + body


def test_pcm16_normalization(tmp_path):
    p = tmp_path / "a.wav"
    wavfile.write(p, 8000, np.array([32767, -32768, 0, 16384], dtype=np.int16))
    sig = read_wav(p)
    np.testing.assert_array_equal(sig.samples, [32767 / 32768, -1.0, 0.0, 0.5])
    assert sig.samples[0] == pytest.approx(0.99997, abs=1e-5)
    assert sig.sample_rate == 8000


def test_silent_file(tmp_path):
    p = tmp_path / "z.wav"
    wavfile.write(p, 8000, np.zeros(100, dtype=np.int16))
    assert np.all(read_wav(p).samples == 0)


def test_float32_round_trip_bit_identical(tmp_path):
    x = np.random.default_rng(0).uniform(-1, 1, 1000).astype(np.float32)
    p = tmp_path / "f.wav"
    write_wav(AudioSignal(x.astype(np.float64)), p, "float32")
    back = read_wav(p).samples.astype(np.float32)
    assert back.tobytes() == x.tobytes()


@pytest.mark.parametrize("x", [np.zeros(64), np.r_[np.ones(32), -np.ones(32)]], ids=["zero", "full"])
def test_pcm16_write(tmp_path, x):
    p = tmp_path / "p.wav"
    write_wav(AudioSignal(x), p, "pcm16")
    _, data = wavfile.read(p)
    assert data.dtype == np.int16
    np.testing.assert_array_equal(data, np.clip(np.round(x * 32768), -32768, 32767))


def test_pcm16_int_round_trip(tmp_path):
    q = np.arange(-32768, 32768, 7, dtype=np.int16)
    p = tmp_path / "q.wav"
    wavfile.write(p, 8000, q)
    write_wav(read_wav(p), tmp_path / "q2.wav", "pcm16")
    np.testing.assert_array_equal(wavfile.read(tmp_path / "q2.wav")[1], q)


def test_quantize_clamps_and_rounds_half_away():
    x = np.array([2.0, -2.0, 0.5 / 32768, -0.5 / 32768, 1.5 / 32768, -1.5 / 32768])
    np.testing.assert_array_equal(quantize_pcm16(x), [32767, -32768, 1, -1, 2, -2])


def test_write_rejects_bad_format(tmp_path):
    with pytest.raises(ValueError):
        write_wav(AudioSignal(np.zeros(4)), tmp_path / "x.wav", "mp3")


def test_stereo_rejected(tmp_path):
    p = tmp_path / "s.wav"
    wavfile.write(p, 8000, np.zeros((10, 2), dtype=np.int16))
    with pytest.raises(WavFormatError, match="mono required"):
        read_wav(p)


def test_alaw_names_format(tmp_path):
    p = tmp_path / "alaw.wav"
    p.write_bytes(riff(6, 1, 8000, 8, bytes(16)))
    with pytest.raises(WavFormatError, match="ALAW"):
        read_wav(p)


def test_pcm8_rejected(tmp_path):
    p = tmp_path / "u8.wav"
    wavfile.write(p, 8000, np.full(10, 128, dtype=np.uint8))
    with pytest.raises(WavFormatError, match="uint8"):
        read_wav(p)


def test_other_rate_warns(tmp_path):
    p = tmp_path / "r.wav"
    wavfile.write(p, 16000, np.zeros(10, dtype=np.int16))
    with pytest.warns(UserWarning, match="16000"):
        sig = read_wav(p)
    assert sig.sample_rate == 16000


def test_8k_no_warning(tmp_path):
    p = tmp_path / "r.wav"
    wavfile.write(p, 8000, np.zeros(10, dtype=np.int16))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        read_wav(p)


def test_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        read_wav(tmp_path / "nope.wav")


def test_unwritable(tmp_path):
    with pytest.raises(OSError):
        write_wav(AudioSignal(np.zeros(4)), tmp_path / "no" / "dir.wav")
