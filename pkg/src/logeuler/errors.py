"""Exception hierarchy shared by all modules."""


class LogEulerError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(LogEulerError, ValueError):
    """Malformed EOS, scenario or command-line configuration."""


class NonpositiveDensity(LogEulerError, ValueError):
    pass


class NonpositiveSoundSpeed(LogEulerError, ValueError):
    pass


class ZeroCurvature(LogEulerError, ArithmeticError):
    pass


class AssumptionViolation(LogEulerError, ValueError):
    """A structural hypothesis (subluminal floor, margin, coefficient gate) fails."""


class OutOfRange(LogEulerError, ValueError):
    pass


class GridTooSmall(LogEulerError, ValueError):
    pass


class BlowupDetected(LogEulerError, RuntimeError):
    pass


class CflViolation(LogEulerError, ValueError):
    pass


class QuadratureFailure(LogEulerError, RuntimeError):
    pass


class SuperluminalState(LogEulerError, ValueError):
    pass


class RootNotBracketed(LogEulerError, ValueError):
    pass


class InvalidSymState(LogEulerError, ValueError):
    pass


class RecoveryFailure(LogEulerError, RuntimeError):
    """Conservative-to-primitive inversion found no admissible root.

    ``index`` is the offending cell (or ``None`` for scalar input) and
    ``bracket`` the last density bracket that was examined.
    """

    def __init__(self, message, *, index=None, state=None, bracket=None):
        super().__init__(message)
        self.index = index
        self.state = state
        self.bracket = bracket


class InadmissibleTarget(RecoveryFailure):
    """A root was found but the recovered state leaves the admissible set."""
