"""Exception hierarchy shared by every module of the toolkit."""


class ToolkitError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(ToolkitError, ValueError):
    """Invalid configuration: bad registry, malformed config file, out-of-range key."""


class DomainError(ToolkitError, ValueError):
    """A physically or mathematically invalid argument."""


class CapacityError(DomainError):
    """An operation would exceed the truncated photon-number capacity."""


class RegistryMismatchError(ToolkitError, TypeError):
    """Two states defined over different mode registries were combined."""


class CoverageError(DomainError):
    """A spectral grid does not cover the support of the modelled amplitude."""


class DegenerateOutputError(DomainError):
    """An operation annihilated (almost) all of its input."""


class FitError(DomainError):
    """A least-squares fit could not be performed or did not converge."""
