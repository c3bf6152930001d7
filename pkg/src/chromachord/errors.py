"""Exception hierarchy shared across the package."""


class ChromachordError(Exception):
    """Base class for all errors raised by chromachord."""


class WavDecodeError(ChromachordError):
    """A RIFF/WAVE stream is malformed.

    ``field`` names the header field (or chunk) that failed validation.
    """

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


class UnsupportedFormatError(ChromachordError):
    """The WAV stream is well formed but uses a codec we do not decode."""


class ConfigError(ChromachordError, ValueError):
    """A configuration object violates its invariants."""


class StructuralError(ChromachordError, ValueError):
    """Input arrays have the wrong shape or size for the operation."""


class NoRootError(ChromachordError):
    """Root search on an all-zero chroma vector."""


class ContractError(ChromachordError, ValueError):
    """An argument is outside the documented domain of a function."""
