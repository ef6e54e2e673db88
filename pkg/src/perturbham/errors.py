"""Exception types shared across the package."""


class PerturbError(Exception):
    """Base class for all library errors."""


class ConfigError(PerturbError):
    """Rejected input: an out-of-range parameter or infeasible configuration."""


class ContractError(PerturbError):
    """An operation's pre- or postcondition was violated by the caller."""
