"""Extraction configuration."""

from __future__ import annotations

from dataclasses import dataclass

SAMPLE_RATE = 16000
FRAME_PERIOD_S = 0.020
SAMPLES_PER_FRAME = int(SAMPLE_RATE * FRAME_PERIOD_S)  # 320

DEFAULT_MODEL = "facebook/hubert-base-ls960"
DEFAULT_LAYER = 6
DEFAULT_MOCK_DIM = 16


@dataclass
class ExtractorConfig:
    """How to turn audio into frame-level features.

    The frame period is fixed at 20 ms and audio is resampled to 16 kHz;
    both are part of the output contract, not tunables.
    """

    model: str = DEFAULT_MODEL
    layer: int = DEFAULT_LAYER
    mock_mode: bool = False
    mock_dim: int = DEFAULT_MOCK_DIM
    seed: int = 0

    def __post_init__(self):
        if self.layer < 0:
            raise ValueError(f"layer must be >= 0, got {self.layer}")
        if self.mock_dim < 1:
            raise ValueError(f"mock_dim must be >= 1, got {self.mock_dim}")
