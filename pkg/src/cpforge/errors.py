"""Exception types raised across the package."""


class CPForgeError(Exception):
    """Base class for all package errors."""


class NonHermitianInput(CPForgeError, ValueError):
    """A matrix that must be Hermitian is not, beyond tolerance."""


class DimensionMismatch(CPForgeError, ValueError):
    """Operands have incompatible shapes or Hilbert-space dimensions."""


class ParamOutOfRange(CPForgeError, ValueError):
    """A map parameter lies outside its admissible interval."""


class DomainError(CPForgeError, ValueError):
    """A state lies too far outside the Bloch ball for a closed-form measure."""


class WeightSumError(CPForgeError, ValueError):
    """Pauli channel weights do not sum to one."""


class UnsupportedK(CPForgeError, ValueError):
    """Requested ebit count is outside the supported range."""


class NoSolution(CPForgeError, RuntimeError):
    """A search that is guaranteed to succeed did not (internal error)."""


class ParseError(CPForgeError, ValueError):
    """A channel file could not be decoded."""
