"""Speech-to-units adapter: decode audio, extract frame features with a
pretrained encoder (or a deterministic mock), and optionally quantize them
against an existing codebook into discrete unit sequences."""

from .audio import read_wav_mono_16k
from .config import (
    DEFAULT_LAYER,
    DEFAULT_MOCK_DIM,
    DEFAULT_MODEL,
    FRAME_PERIOD_S,
    SAMPLE_RATE,
    SAMPLES_PER_FRAME,
    ExtractorConfig,
)
from .errors import (
    BadCodebook,
    DimensionMismatch,
    ExtractorError,
    ModelLoadFailure,
    UndecodableAudio,
)
from .featio import (
    read_codebook,
    write_feature_file,
    write_manifest,
    write_unit_records,
)
from .features import extract_features, mock_features
from .units import dedupe, extract_units, nearest_units

__all__ = [
    "BadCodebook",
    "DEFAULT_LAYER",
    "DEFAULT_MOCK_DIM",
    "DEFAULT_MODEL",
    "DimensionMismatch",
    "ExtractorConfig",
    "ExtractorError",
    "FRAME_PERIOD_S",
    "ModelLoadFailure",
    "SAMPLE_RATE",
    "SAMPLES_PER_FRAME",
    "UndecodableAudio",
    "dedupe",
    "extract_features",
    "extract_units",
    "mock_features",
    "nearest_units",
    "read_codebook",
    "read_wav_mono_16k",
    "write_feature_file",
    "write_manifest",
    "write_unit_records",
]

__version__ = "0.1.0"
