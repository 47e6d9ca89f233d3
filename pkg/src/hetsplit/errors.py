"""Exception hierarchy shared across the package."""


class HetsplitError(Exception):
    """Base class for all package errors."""


class ConfigError(HetsplitError, ValueError):
    """An invalid configuration value or unknown configuration key."""


class DimensionError(HetsplitError, ValueError):
    """Array dimensions do not match what an operation requires."""


class InsufficientDataError(HetsplitError, ValueError):
    """Too few observations for a split, fold, or group."""


class DegenerateSplitError(HetsplitError, ValueError):
    """A training set with only one treatment arm."""


class MergeError(HetsplitError, ValueError):
    """Per-replication record batches cannot be merged."""
