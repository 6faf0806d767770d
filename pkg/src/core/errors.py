from typing import Optional, Tuple


class EchoLabError(Exception):
    """Base class for every error raised by echo-lab."""


class ConfigError(EchoLabError):
    """An experiment config key is unknown or holds an invalid value."""

    def __init__(self, message: str, key: Optional[str] = None):
        super().__init__(message)
        self.key = key


class DomainError(EchoLabError, ValueError):
    """An argument lies outside the domain of a library operation."""


class BasisMismatchError(DomainError):
    """Operands were built on different spin bases."""


class NumericalError(EchoLabError):
    """A numerical contract (unitarity, normalization, conditioning) was broken."""


class NonUnitaryError(NumericalError):
    pass


class NormDriftError(NumericalError):
    pass


class EigendecompositionError(NumericalError):
    def __init__(self, label: str, shape: Tuple[int, ...], reason: str):
        super().__init__(f"eigendecomposition of {label} {shape} failed: {reason}")
        self.label = label
        self.shape = shape


class UnrecoverableGeometryError(NumericalError):
    """The wave-packet envelopes do not overlap enough to fit the fringe term."""
