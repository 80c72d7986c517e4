"""Exception hierarchy shared across the toolkit.

Each error class carries the process exit code the CLI maps it to:
1 for configuration/usage problems, 2 for malformed input data, and
3 for violations of a documented constraint (e.g. the culling bound).
"""


class DnaPrepError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 2


class ConfigError(DnaPrepError):
    """Invalid configuration or unsupported option combination."""

    exit_code = 1


class DataError(DnaPrepError):
    """Malformed or insufficient input data."""

    exit_code = 2


class ConstraintError(DnaPrepError):
    """A documented hard bound was exceeded."""

    exit_code = 3


class ResourceLimitError(DnaPrepError):
    """An operation would exceed its enumeration/compute budget."""

    exit_code = 3
