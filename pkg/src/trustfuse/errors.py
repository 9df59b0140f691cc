"""Exception types shared across the package."""


class TrustFuseError(Exception):
    """Base class for all package errors."""


class DegenerateEvidence(TrustFuseError):
    """The Bayesian normalizing constant vanished; parameters are inconsistent."""


class TotalConflict(TrustFuseError):
    """Two (near-)certain contradictory bodies of evidence cannot be combined."""


class EmptyEvidence(TrustFuseError):
    """Fusion was requested for an area with no contributing users."""


class EpochClosed(TrustFuseError):
    """An observation was ingested for an epoch that is no longer open."""


class UnknownClass(TrustFuseError):
    """A user or factor class is missing from the semantic table."""


class ConfigError(TrustFuseError):
    """A configuration file failed validation."""
