"""Exception hierarchy shared by the library and the command line"""


class TorsionError(Exception):
    """Base class for every error raised by this package"""

    exit_code = 2


class InputError(TorsionError, ValueError):
    """Input data violates a documented precondition"""

    exit_code = 2


class InvariantViolation(TorsionError):
    """An identity or oracle agreement that must hold has failed"""

    exit_code = 3


class SeriesError(InputError):
    """Invalid truncated power-series operation"""


class ChernRingError(InputError):
    """Invalid graded-ring, bundle or intersection data"""


class SingularityError(InputError):
    """Germ is unsupported or has a non-isolated singularity"""


class FitError(InputError):
    """Least-squares problem cannot be solved reliably"""

    def __init__(self, message: str, conditioning: float | None = None):
        super().__init__(message)
        self.conditioning = conditioning
