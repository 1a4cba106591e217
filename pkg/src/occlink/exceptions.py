"""Exception hierarchy for the link toolkit.

Every error raised by this package derives from OccLinkError so callers can
catch one type at a pipeline boundary and still tell failure modes apart.
"""


class OccLinkError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(OccLinkError):
    """A configuration value violates an invariant (bad order, rate, size)."""


class ShapeError(OccLinkError):
    """An input sequence or array has an unusable length or dimension."""


class DomainError(OccLinkError):
    """A value lies outside the set an operation is defined on."""


class SyncFailureError(OccLinkError):
    """Preamble correlation peak fell below the detection threshold."""


class UnusableCaptureError(OccLinkError):
    """A capture carries no usable modulation (zero peak-to-peak)."""


class SingularSystemError(OccLinkError):
    """A least-squares system is numerically rank deficient."""
