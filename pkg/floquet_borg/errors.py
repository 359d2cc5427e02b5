class FloquetBorgError(Exception):
    """Base class for every error raised by floquet-borg."""


class NumericalError(FloquetBorgError, ArithmeticError):
    """A matrix kernel could not honour its numerical contract."""


class NonFinite(NumericalError):
    """An input contains NaN or Inf entries."""


class NoConvergence(NumericalError):
    """An eigenvalue iteration exhausted its budget."""


class Singular(NumericalError):
    """A matrix is singular or too ill-conditioned for the requested operation."""


class NotHermitian(NumericalError):
    """A matrix deviates from its adjoint beyond tolerance."""


class NotPositiveDefinite(NumericalError):
    """A Hermitian matrix has a non-positive eigenvalue."""


class DomainError(FloquetBorgError, ValueError):
    """An argument lies outside the domain of the operation."""


class InvalidDimension(DomainError):
    """A period, block size or extension factor is smaller than one."""


class ZeroTau(DomainError):
    """The Floquet parameter is zero."""


class OffCircle(DomainError):
    """The Floquet parameter does not lie on the unit circle."""


class InvalidResolution(DomainError):
    """A sampling resolution is below the supported minimum."""


class InvalidProblem(DomainError):
    """An extremal problem has invalid parameters."""


class IndexOutOfRange(DomainError):
    """An index argument lies outside its admissible range."""


class DegenerateAngles(DomainError):
    """Two quasi-momenta have equal cosines."""


class PreconditionError(FloquetBorgError, ValueError):
    """A theorem hypothesis required by a detector is not satisfied."""


class CouplingNotOne(PreconditionError):
    """The coupling constant differs from one."""


class HypothesisNotMet(PreconditionError):
    """The operator does not have a single symmetric band with unimodular multipliers."""
