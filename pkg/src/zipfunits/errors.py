"""Exception types raised across the toolkit.

Everything derives from ZipfUnitsError so callers (and the CLI) can catch
input/contract problems in one place and distinguish them from genuine bugs.
"""


class ZipfUnitsError(Exception):
    """Base class for all errors raised by this package."""


class IoFailure(ZipfUnitsError):
    """A file could not be written."""


class MalformedRecord(ZipfUnitsError):
    """A record file line (or table row) violates the format contract."""

    def __init__(self, path, line, message):
        self.path = str(path)
        self.line = line
        super().__init__(f"{self.path}:{line}: {message}")


class BadMagic(ZipfUnitsError):
    """Binary file does not start with the expected magic bytes."""


class BadVersion(ZipfUnitsError):
    """Binary file has an unsupported format version."""


class TruncatedPayload(ZipfUnitsError):
    """Binary file size does not match what its header promises."""


class NonFiniteValue(ZipfUnitsError):
    """A feature or centroid value is NaN or infinite."""


class InsufficientPoints(ZipfUnitsError):
    """Fewer data points than clusters requested."""

    def __init__(self, have, need):
        self.have = have
        self.need = need
        super().__init__(f"need at least {need} frames to train, have {have}")


class DimensionMismatch(ZipfUnitsError):
    """Feature dimensionality disagrees between inputs."""


class EmptyTable(ZipfUnitsError):
    """An operation requires a non-empty count table."""


class IncompatibleTables(ZipfUnitsError):
    """Tables differ in n-gram order or alphabet kind."""


class ZeroLength(ZipfUnitsError):
    """A sequence-length total required to be positive was zero."""


class BadBand(ZipfUnitsError):
    """Trim fractions do not describe a valid rank band."""


class TooFewPoints(ZipfUnitsError):
    """Fewer than two ranks survive trimming."""


class DegeneratePoints(ZipfUnitsError):
    """All ranks coincide, so a free-slope fit is undefined."""


class MissingReference(ZipfUnitsError):
    """The named reference group is absent from the input."""


class InsufficientData(ZipfUnitsError):
    """A group holds fewer records than the requested sample size."""

    def __init__(self, group, have, need):
        self.group = group
        self.have = have
        self.need = need
        super().__init__(f"group {group!r} has {have} records, need {need}")
