"""Exception hierarchy shared by the simulator, the oracle and the CLI."""


class QScatterError(Exception):
    """Base class for package errors."""


class DomainError(QScatterError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ValidationError(QScatterError, ValueError):
    """Data failed a consistency check (non-unitary gate, bad samples, ...)."""


class PreconditionError(QScatterError, RuntimeError):
    """A physics precondition of the protocol is not met."""


class PerfectReflectionError(DomainError):
    """M11 = 0: transmission vanishes and R, T cannot be extracted."""


class AsymmetryError(PreconditionError):
    """Phase-shift extraction requested for amplitudes that do not come
    from a parity-symmetric potential."""


class UndefinedPhaseError(DomainError):
    """Reference momentum amplitude too small to carry a phase."""


class ConfigError(QScatterError, ValueError):
    """A run-descriptor file violates the documented schema."""


class ToleranceFailure(QScatterError):
    """A comparison exceeded its configured tolerance."""
