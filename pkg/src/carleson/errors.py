"""Exception hierarchy shared by all modules."""


class CarlesonError(Exception):
    """Base class for every error raised by the package."""


class ParameterError(CarlesonError, ValueError):
    """A family or operation parameter is outside its validity range."""


class InvalidCurveError(CarlesonError, ValueError):
    """Samples do not describe a simple closed curve."""


class DomainMismatchError(CarlesonError, ValueError):
    """Two objects that must share a domain do not."""


class OutsideDomainError(CarlesonError, ValueError):
    """A point was passed outside the domain of a map or measure."""


class NotQuasiconformalError(CarlesonError, ValueError):
    """A Beltrami coefficient reached modulus one somewhere on the grid."""


class ConfigError(CarlesonError, ValueError):
    """An experiment configuration cannot be built or validated."""


class ConvergenceError(CarlesonError, RuntimeError):
    """An iterative solver did not reach its tolerance.

    ``history`` carries the residual (or iterate) trace so callers can
    inspect how far the iteration got.
    """

    def __init__(self, message, history=None):
        super().__init__(message)
        self.history = [] if history is None else list(history)
