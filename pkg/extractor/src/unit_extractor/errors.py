"""Adapter error types."""


class ExtractorError(Exception):
    """Base for all adapter failures."""


class UndecodableAudio(ExtractorError):
    """Audio file missing, corrupt, or in an unsupported encoding."""


class ModelLoadFailure(ExtractorError):
    """Pretrained encoder could not be loaded (missing deps, weights, network)."""


class DimensionMismatch(ExtractorError):
    """Feature dimension does not match the codebook."""


class BadCodebook(ExtractorError):
    """Codebook file violates the CDBK byte layout."""
