import struct
import wave

import numpy as np
import pytest


@pytest.fixture
def make_wav(tmp_path):
    """Write raw PCM bytes into a WAV container under tmp_path."""

    def _make(name, pcm: bytes, rate=16000, sampwidth=2, channels=1):
        path = tmp_path / name
        path.parent.mkdir(parents=True, exist_ok=True)
        with wave.open(str(path), "wb") as fh:
            fh.setnchannels(channels)
            fh.setsampwidth(sampwidth)
            fh.setframerate(rate)
            fh.writeframes(pcm)
        return path

    return _make


@pytest.fixture
def make_tone_wav(make_wav):
    """A decodable 16-bit mono clip of the given duration."""

    def _make(name, seconds=1.0, rate=16000):
        n = int(round(seconds * rate))
        t = np.arange(n, dtype=np.float64) / rate
        pcm = (np.sin(2 * np.pi * 220.0 * t) * 12000).astype("<i2")
        return make_wav(name, pcm.tobytes(), rate=rate)

    return _make


@pytest.fixture
def make_codebook(tmp_path):
    """Write a CDBK file from a (k, dim) centroid array."""

    def _make(name, centroids):
        arr = np.ascontiguousarray(np.asarray(centroids), dtype="<f4")
        path = tmp_path / name
        path.parent.mkdir(parents=True, exist_ok=True)
        header = struct.pack("<4sIII", b"CDBK", 1, arr.shape[0], arr.shape[1])
        path.write_bytes(header + arr.tobytes())
        return path

    return _make
