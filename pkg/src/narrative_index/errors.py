"""Exception hierarchy shared across the pipeline.

The CLI maps these onto distinct exit codes, so loaders and providers
raise the most specific class that applies.
"""

from __future__ import annotations


class PipelineError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(PipelineError):
    """Invalid or inconsistent run configuration."""


class InputError(PipelineError):
    """A data file is missing, unreadable, or malformed."""


class ProviderError(PipelineError):
    """The embedding provider failed."""


class ProviderUnreachableError(ProviderError):
    """The external provider could not be contacted."""


class ProviderProtocolError(ProviderError):
    """The external provider answered, but not per the wire protocol."""


class DimensionMismatchError(ProviderError):
    """Vector dimensions disagree with the configured dimension."""
