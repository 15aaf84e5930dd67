"""Exception types raised by the simulator."""


class MDISimError(Exception):
    """Base class for all simulator errors."""


class DomainError(MDISimError, ValueError):
    """A parameter lies outside its physical range."""


class DegenerateSourceError(DomainError):
    """A source construction leaves no probability mass."""


class CapacityError(MDISimError):
    """The brute-force oracle was asked for more photons than it supports."""


class IllConditionedError(MDISimError, ArithmeticError):
    """A decoy-state bound has a vanishing or near-vanishing denominator."""


class UndefinedBoundError(MDISimError, ArithmeticError):
    """A bound cannot be evaluated because an input bound is not positive."""


class ConfigError(MDISimError, ValueError):
    """A configuration file is malformed or has invalid values."""
