"""Exception types shared across the package."""


class TcnfxError(Exception):
    """Base class for all tcnfx errors."""


class ConfigurationError(TcnfxError, ValueError):
    """A network configuration field is out of bounds or inconsistent."""


class ConfigTooLargeError(ConfigurationError):
    """The configuration requires more samples or memory than allowed."""


class InsufficientContextError(TcnfxError, ValueError):
    """An input segment is shorter than the kernel span it must cover."""


class InvalidInputError(TcnfxError, ValueError):
    """Audio input violates a boundary contract (NaN/Inf, channel mismatch)."""


class WavError(TcnfxError, ValueError):
    """A WAV file is malformed or uses an unsupported encoding."""


class PresetError(TcnfxError, ValueError):
    """A preset document cannot be parsed or has an unsupported version."""
