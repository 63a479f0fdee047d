"""WAV decoding: PCM to mono float32 at 16 kHz."""

from __future__ import annotations

import wave

import numpy as np

from .config import SAMPLE_RATE
from .errors import UndecodableAudio


def _decode_pcm(raw: bytes, sampwidth: int, n_channels: int) -> np.ndarray:
    if sampwidth == 1:
        # 8-bit WAV is unsigned
        samples = np.frombuffer(raw, dtype=np.uint8).astype(np.float32)
        samples = (samples - 128.0) / 128.0
    elif sampwidth == 2:
        samples = np.frombuffer(raw, dtype="<i2").astype(np.float32) / 32768.0
    elif sampwidth == 3:
        triples = np.frombuffer(raw, dtype=np.uint8).reshape(-1, 3)
        as_int = (
            triples[:, 0].astype(np.int32)
            | (triples[:, 1].astype(np.int32) << 8)
            | (triples[:, 2].astype(np.int32) << 16)
        )
        as_int = np.where(as_int >= 1 << 23, as_int - (1 << 24), as_int)
        samples = as_int.astype(np.float32) / float(1 << 23)
    elif sampwidth == 4:
        samples = np.frombuffer(raw, dtype="<i4").astype(np.float32) / float(1 << 31)
    else:
        raise UndecodableAudio(f"unsupported sample width {sampwidth}")
    if n_channels > 1:
        samples = samples.reshape(-1, n_channels).mean(axis=1)
    return samples


def read_wav_mono_16k(path) -> np.ndarray:
    """Decode a PCM WAV file to mono float32 sampled at 16 kHz."""
    try:
        with wave.open(str(path), "rb") as wav:
            n_channels = wav.getnchannels()
            sampwidth = wav.getsampwidth()
            rate = wav.getframerate()
            n_frames = wav.getnframes()
            raw = wav.readframes(n_frames)
    except FileNotFoundError:
        raise
    except (wave.Error, EOFError, OSError) as exc:
        raise UndecodableAudio(f"{path}: {exc}") from exc
    if rate <= 0:
        raise UndecodableAudio(f"{path}: invalid sample rate {rate}")
    samples = _decode_pcm(raw, sampwidth, n_channels)
    if rate == SAMPLE_RATE or samples.size == 0:
        return samples
    n_out = int(round(samples.size * SAMPLE_RATE / rate))
    src_t = np.arange(samples.size, dtype=np.float64) / rate
    dst_t = np.arange(n_out, dtype=np.float64) / SAMPLE_RATE
    return np.interp(dst_t, src_t, samples.astype(np.float64)).astype(np.float32)
