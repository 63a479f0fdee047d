"""Frame-level feature extraction.

Two routes produce the same shape of output: a mock route that generates
deterministic pseudo-features (for pipelines and tests that must not
download a model), and a real route that runs a pretrained speech encoder
and takes one hidden layer. Both emit one frame per 20 ms of audio.
"""

from __future__ import annotations

import math
import zlib
from pathlib import Path

import numpy as np

from .audio import read_wav_mono_16k
from .config import FRAME_PERIOD_S, SAMPLES_PER_FRAME, ExtractorConfig
from .errors import ModelLoadFailure
from .featio import write_feature_file

_SEED_MASK = 0xFFFFFFFFFFFFFFFF


def _frame_rng(seed: int, name: str) -> np.random.Generator:
    # Per-utterance stream: the file's identity is folded in via crc32 so
    # every utterance gets distinct frames under one run-level seed.
    return np.random.default_rng(
        [seed & _SEED_MASK, zlib.crc32(name.encode("utf-8"))]
    )


def mock_features(duration_s: float, dim: int, seed: int = 0) -> np.ndarray:
    """Deterministic pseudo-features for a clip of the given duration.

    Emits floor(duration_s / 0.020) frames of standard-normal float32.
    """
    if duration_s < 0:
        raise ValueError(f"duration must be >= 0, got {duration_s}")
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    # round() dodges binary-float edges: 1.00 / 0.020 must give 50 frames.
    n_frames = math.floor(round(duration_s / FRAME_PERIOD_S, 9))
    rng = np.random.default_rng(seed & _SEED_MASK)
    return rng.standard_normal((n_frames, dim)).astype(np.float32)


def _mock_from_audio(samples: np.ndarray, name: str, config: ExtractorConfig) -> np.ndarray:
    n_frames = samples.shape[0] // SAMPLES_PER_FRAME
    rng = _frame_rng(config.seed, name)
    return rng.standard_normal((n_frames, config.mock_dim)).astype(np.float32)


def _model_features(samples: np.ndarray, config: ExtractorConfig) -> np.ndarray:
    try:
        import torch
        from transformers import AutoModel
    except Exception as exc:
        raise ModelLoadFailure(f"torch/transformers unavailable: {exc}") from exc
    try:
        model = AutoModel.from_pretrained(config.model, output_hidden_states=True)
        model.eval()
    except Exception as exc:
        raise ModelLoadFailure(f"could not load {config.model!r}: {exc}") from exc
    with torch.no_grad():
        wav = torch.from_numpy(np.ascontiguousarray(samples, dtype=np.float32))
        out = model(wav[None, :])
        hidden = out.hidden_states
        if config.layer >= len(hidden):
            raise ModelLoadFailure(
                f"layer {config.layer} out of range for {config.model!r} "
                f"({len(hidden)} hidden states)"
            )
        frames = hidden[config.layer][0].cpu().numpy()
    return np.ascontiguousarray(frames, dtype=np.float32)


def extract_features(audio_path, config: ExtractorConfig, out_path=None) -> np.ndarray:
    """Decode one audio file and return its frame features (n_frames, dim).

    When out_path is given the frames are also written there as a FEAT
    file (atomically), which is the normal mode for the CLI.
    """
    path = Path(audio_path)
    samples = read_wav_mono_16k(path)
    if config.mock_mode:
        frames = _mock_from_audio(samples, path.stem, config)
    else:
        frames = _model_features(samples, config)
    if out_path is not None:
        write_feature_file(frames, out_path)
    return frames
