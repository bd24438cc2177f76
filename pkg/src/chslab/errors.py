"""Exception types shared across the package."""


class ChslabError(Exception):
    """Base class for all package errors."""


class DimensionOverflow(ChslabError):
    """A flat Hilbert-space dimension would exceed the configured cap."""


class EnumerationTooLarge(ChslabError):
    """A combinatorial enumeration would exceed the configured cap."""


class ShapeMismatch(ChslabError):
    """Operands live on incompatible register shapes."""


class BadRegisterIndex(ChslabError):
    """A register index is out of range for the given shape."""


class NotPSD(ChslabError):
    """An input required to be positive semdefinite has a negative eigenvalue."""


class EigsFailed(ChslabError):
    """The spectral routine did not converge."""


class NotCollisionFree(ChslabError):
    """A type with repeated elements was passed where a set is required."""


class PreconditionViolated(ChslabError):
    """A load-bearing precondition (e.g. prefix collision-freeness) fails."""


class ParameterError(ChslabError):
    """Parameters are outside the operation's admissible range."""


class NotUnitary(ChslabError):
    """A matrix required to be unitary is not, within tolerance."""


class ConfigInvalid(ChslabError):
    """An experiment configuration failed validation."""
