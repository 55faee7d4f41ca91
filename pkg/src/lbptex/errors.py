"""Exception hierarchy shared across the package.

Two top-level branches mirror the CLI exit codes: configuration and
manifest problems exit with status 2, data problems (corrupt images,
inconsistent label maps) exit with status 3.
"""


class LbptexError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(LbptexError):
    """Invalid configuration, arguments, or experiment setup (exit code 2)."""


class ManifestError(ConfigError):
    """Dataset manifest could not be parsed or violates its invariants."""


class DataError(LbptexError):
    """Input data is corrupt or inconsistent (exit code 3)."""


class ImageFormatError(DataError):
    """Image file is missing, truncated, or not a supported format."""


class DegenerateDataError(DataError):
    """Too little variation in the data to fit the requested model."""
